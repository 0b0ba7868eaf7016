#include "fastgauss/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace fastgauss::io {

namespace {

std::string describe(const std::string& file, std::size_t row, const std::string& what) {
  std::string msg = file;
  if (row > 0) msg += ": row " + std::to_string(row);
  return msg + ": " + what;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

CsvError::CsvError(std::string file, std::size_t row, const std::string& what)
    : std::runtime_error(describe(file, row, what)), file_(std::move(file)), row_(row) {}

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Eigen::MatrixXd parse_matrix_csv(std::istream& in, const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::vector<double> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      if (field.empty()) throw CsvError(name, row, "empty field");
      double value = 0.0;
      const char* begin = field.data();
      const char* end = field.data() + field.size();
      if (*begin == '+') ++begin;
      const auto res = std::from_chars(begin, end, value);
      if (res.ec != std::errc() || res.ptr != end || !std::isfinite(value)) {
        throw CsvError(name, row, "not a finite number: '" + std::string(field) + "'");
      }
      fields.push_back(value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && fields.size() != rows.front().size()) {
      throw CsvError(name, row,
                     "expected " + std::to_string(rows.front().size()) + " fields, found " +
                         std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw CsvError(name, 0, "no rows");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(path, 0, "cannot open file");
  return parse_matrix_csv(in, path);
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line += ',';
      line += format_real(m(i, j));
    }
    line += '\n';
    out << line;
  }
}

}  // namespace fastgauss::io
