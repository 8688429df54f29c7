#pragma once

#include <map>
#include <string>
#include <vector>

namespace waveglue {

/// Flat "key = value" configuration with [section] headers; section keys are
/// namespaced as "section.key". '#' starts a comment.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  /// apply a "key=value" override string
  void apply_override(const std::string& kv);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double dflt) const;
  int get_int(const std::string& key) const;
  int get_int_or(const std::string& key, int dflt) const;
  bool get_bool_or(const std::string& key, bool dflt) const;
  std::vector<int> get_int_list_or(const std::string& key, const std::vector<int>& dflt) const;

  const std::map<std::string, std::string>& items() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace waveglue
