#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace hjnet {

/// Shortest round-trippable decimal text ('.' separator, 17 significant digits).
std::string format_real(double v);

using Cell = std::variant<double, std::int64_t, std::string>;

/// Rectangular table of results with a free-form metadata blob (JSON text).
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::string metadata;

  void add_row(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

std::string to_csv(const ResultTable& table);
/// Parses CSV text written by to_csv. Numeric-looking fields come back as
/// doubles (or integers when written without a decimal point or exponent).
ResultTable parse_csv(const std::string& text);

/// Writes `content` to `path` through a temporary file and a rename, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV plus a `<path>.meta.json` sidecar holding the metadata blob.
void write_csv(const ResultTable& table, const std::filesystem::path& path);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hjnet
