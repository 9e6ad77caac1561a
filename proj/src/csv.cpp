#include "hjnet/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hjnet {

std::string format_real(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("row width does not match the table header");
  rows.push_back(std::move(row));
}

std::size_t ResultTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return c;
  throw std::out_of_range("no column named '" + name + "'");
}

double ResultTable::number(std::size_t row, const std::string& name) const {
  const Cell& cell = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
  throw std::invalid_argument("column '" + name + "' is not numeric");
}

namespace {

std::string quote(const std::string& s, bool force = false) {
  if (!force && s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Cell parse_cell(const std::string& field, bool quoted);

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    // Keep doubles distinguishable from integers on read-back.
    std::string s = format_real(*d);
    if (std::isfinite(*d) && s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  // Strings that would read back as numbers get quoted.
  const auto& s = std::get<std::string>(cell);
  return quote(s, !std::holds_alternative<std::string>(parse_cell(s, false)));
}

Cell parse_cell(const std::string& field, bool quoted) {
  if (quoted || field.empty()) return field;
  char* end = nullptr;
  if (field.find_first_of(".eEn") == std::string::npos) {
    const long long v = std::strtoll(field.c_str(), &end, 10);
    if (end && *end == '\0') return static_cast<std::int64_t>(v);
  }
  const double d = std::strtod(field.c_str(), &end);
  if (end && *end == '\0') return d;
  return field;
}

std::vector<std::pair<std::string, bool>> split_record(const std::string& text, std::size_t& pos) {
  std::vector<std::pair<std::string, bool>> fields;
  std::string cur;
  bool quoted = false, in_quotes = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (in_quotes) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          cur += '"';
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = quoted = true;
    } else if (c == ',') {
      fields.emplace_back(std::move(cur), quoted);
      cur.clear();
      quoted = false;
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.emplace_back(std::move(cur), quoted);
  return fields;
}

}  // namespace

std::string to_csv(const ResultTable& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << quote(table.columns[c]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
    out << '\n';
  }
  return out.str();
}

ResultTable parse_csv(const std::string& text) {
  ResultTable table;
  std::size_t pos = 0;
  if (text.empty()) return table;
  for (auto& [name, q] : split_record(text, pos)) table.columns.push_back(name);
  while (pos < text.size()) {
    auto fields = split_record(text, pos);
    if (fields.size() == 1 && fields[0].first.empty() && !fields[0].second) continue;
    std::vector<Cell> row;
    for (auto& [f, q] : fields) row.push_back(parse_cell(f, q));
    table.add_row(std::move(row));
  }
  return table;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                          ec.message());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

void write_csv(const ResultTable& table, const std::filesystem::path& path) {
  write_file_atomic(path, to_csv(table));
  auto meta = path;
  meta += ".meta.json";
  write_file_atomic(meta, table.metadata.empty() ? std::string("{}\n") : table.metadata);
}

}  // namespace hjnet
