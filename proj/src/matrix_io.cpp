#include "tightclass/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tightclass/error.hpp"

namespace tightclass {
namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what);
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

// Splits on single spaces; an empty field means doubled, leading or trailing
// separators, which the format does not allow.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(' ', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  if (field.empty()) return false;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buffer[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", m(i, j));
      if (j > 0) out << ' ';
      out << buffer;
    }
    out << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string() + " for writing");
  write_matrix(out, m);
  if (!out) throw Error(ErrorKind::InvalidArgument, "write failed: " + path.string());
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) parse_error(1, "missing header");
  const auto header = split_fields(strip_cr(line));
  long long rows = 0;
  long long cols = 0;
  if (header.size() != 2 || !parse_number(header[0], rows) || !parse_number(header[1], cols) ||
      rows <= 0 || cols <= 0) {
    parse_error(1, "header must be two positive integers \"rows cols\"");
  }

  Eigen::MatrixXd m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    const std::size_t line_no = static_cast<std::size_t>(i) + 2;
    if (!std::getline(in, line)) parse_error(line_no, "expected " + std::to_string(rows) + " rows");
    const auto fields = split_fields(strip_cr(line));
    if (static_cast<long long>(fields.size()) != cols) {
      parse_error(line_no, "expected " + std::to_string(cols) + " values, got " +
                               std::to_string(fields.size()));
    }
    for (long long j = 0; j < cols; ++j) {
      double value = 0.0;
      if (!parse_number(fields[j], value)) {
        parse_error(line_no, "bad value \"" + std::string(fields[j]) + "\"");
      }
      m(i, j) = value;
    }
  }
  std::size_t line_no = static_cast<std::size_t>(rows) + 2;
  while (std::getline(in, line)) {
    if (!strip_cr(line).empty()) parse_error(line_no, "unexpected trailing data");
    ++line_no;
  }
  return m;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  return read_matrix(in);
}

}  // namespace tightclass
