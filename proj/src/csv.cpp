#include "lpsens/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "lpsens/error.hpp"

namespace lpsens {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view field) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Matrix parse_csv(std::istream& in, const std::string& source) {
  std::vector<double> data;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (first_content) {
      first_content = false;
      if (!parse_number(fields.front())) continue;
    }
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw InputError(source + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(width));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = parse_number(fields[c]);
      if (!value || !std::isfinite(*value)) {
        throw InputError(source + ": line " + std::to_string(line_no) + ", column " +
                         std::to_string(c + 1) + ": malformed numeric field '" +
                         std::string(trim(fields[c])) + "'");
      }
      data.push_back(*value);
    }
    ++rows;
  }
  if (rows == 0) throw InputError(source + ": no numeric rows");
  Matrix A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  std::copy(data.begin(), data.end(), A.data());
  return A;
}

Matrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

void write_csv(std::ostream& out, const Matrix& A) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) out << ',';
      out << A(i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace lpsens
