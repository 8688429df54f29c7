#include "waveglue/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace waveglue {

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_matrix(f, m);
}

Eigen::MatrixXd read_matrix(std::istream& is) {
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0)
    throw std::runtime_error("matrix_io: bad header");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(is >> m(i, j))) throw std::runtime_error("matrix_io: truncated data");
  return m;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_matrix(f);
}

}  // namespace waveglue
