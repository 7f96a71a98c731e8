#include "sal/csv.hpp"

#include "sal/errors.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace sal {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw ValidationError("cannot open " + path.string() + " for writing");
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& columns) {
  for (const auto& c : columns) cell(c);
  end_row();
  return *this;
}

void CsvWriter::separator() {
  if (row_open_) out_ << ',';
  row_open_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cells(const Eigen::VectorXd& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) cell(v(k));
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_open_ = false;
  if (!out_) throw NumericError("write to " + path_.string() + " failed");
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& values) {
  values.clear();
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    if (first == std::string::npos) return false;
    const char* begin = field.data() + first;
    const char* end = field.data() + last + 1;
    double v = 0.0;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) return false;
    values.push_back(v);
  }
  return !values.empty();
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!parse_row(line, values)) {
      if (rows.empty()) continue;  // header
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": non-numeric row");
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(values);
  }
  if (rows.empty()) throw ValidationError(path.string() + ": no numeric rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

}  // namespace sal
