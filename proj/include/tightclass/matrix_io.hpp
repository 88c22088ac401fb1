#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Dense>

namespace tightclass {

// Plain-text dense matrix format:
//   line 1: "<rows> <cols>"
//   then <rows> lines of <cols> values separated by single spaces.
// Values are written with 17 significant digits so that reading a written
// file reproduces every double exactly. Vectors use a header of "1 <N>".

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Throws Error(ErrorKind::Parse) with the offending line number.
Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

}  // namespace tightclass
