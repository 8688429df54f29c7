#include "waveglue/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace waveglue {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse(os.str());
}

void Config::apply_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("override must be key=value: " + kv);
  values_[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
}

std::string Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("missing config key: " + key);
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& dflt) const {
  auto it = values_.find(key);
  return it == values_.end() ? dflt : it->second;
}

double Config::get_double(const std::string& key) const { return std::stod(get(key)); }
double Config::get_double_or(const std::string& key, double dflt) const {
  auto it = values_.find(key);
  return it == values_.end() ? dflt : std::stod(it->second);
}
int Config::get_int(const std::string& key) const { return std::stoi(get(key)); }
int Config::get_int_or(const std::string& key, int dflt) const {
  auto it = values_.find(key);
  return it == values_.end() ? dflt : std::stoi(it->second);
}
bool Config::get_bool_or(const std::string& key, bool dflt) const {
  auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  return it->second == "true" || it->second == "1" || it->second == "yes";
}
std::vector<int> Config::get_int_list_or(const std::string& key,
                                         const std::vector<int>& dflt) const {
  auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  std::vector<int> out;
  std::istringstream is(it->second);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace waveglue
