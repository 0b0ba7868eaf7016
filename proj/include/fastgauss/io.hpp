#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fastgauss::io {

/// Malformed input file; `row` is 1-based, 0 when the problem is not row-specific.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::string file, std::size_t row, const std::string& what);

  const std::string& file() const { return file_; }
  std::size_t row() const { return row_; }

 private:
  std::string file_;
  std::size_t row_;
};

/// 17-significant-digit general format; reads back to the identical double.
std::string format_real(double x);

/// Headerless numeric CSV. Every row must have the same number of fields and
/// every field must parse as a finite real. Blank lines are rejected.
Eigen::MatrixXd read_matrix_csv(const std::string& path);
Eigen::MatrixXd parse_matrix_csv(std::istream& in, const std::string& name);

/// One row per matrix row, newline-terminated.
void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out);

}  // namespace fastgauss::io
