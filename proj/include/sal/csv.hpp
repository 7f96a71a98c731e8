#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace sal {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
[[nodiscard]] std::string format_double(double v);

/// Comma-separated writer with deterministic number formatting.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  CsvWriter& header(const std::vector<std::string>& columns);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::int64_t v);
  CsvWriter& cell(std::string_view v);
  CsvWriter& cells(const Eigen::VectorXd& v);
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  std::filesystem::path path_;
  bool row_open_ = false;
};

/// Numeric rows of a CSV file. Blank lines, lines starting with '#', and a
/// leading non-numeric header line are skipped; rows must have equal width.
[[nodiscard]] Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

}  // namespace sal
