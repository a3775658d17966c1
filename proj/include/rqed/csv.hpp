#pragma once

// Locale-independent CSV output with a fixed 17-significant-digit float format.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rqed {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
      throw std::logic_error("CsvTable: row has " + std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(header_.size()));
    }
    rows_.push_back(std::move(cells));
  }

  void append(const CsvTable& other) {
    if (other.header_ != header_) throw std::logic_error("CsvTable: header mismatch on append");
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
  }

  std::string str() const {
    std::string out;
    write_line(out, header_);
    for (const auto& r : rows_) write_line(out, r);
    return out;
  }

 private:
  static void write_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes to a temporary sibling and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_atomic(path, table.str()); }

}  // namespace rqed
