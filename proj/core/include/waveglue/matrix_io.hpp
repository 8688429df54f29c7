#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

namespace waveglue {

/// Plain-text matrix format: first line "rows cols", then one row per line,
/// entries printed with 17 significant digits so a round trip is bit exact.
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& is);
Eigen::MatrixXd read_matrix_file(const std::string& path);

}  // namespace waveglue
