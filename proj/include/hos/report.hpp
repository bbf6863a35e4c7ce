#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hos/error.hpp"

// Output plumbing: numbers at 17 significant digits (round-trip exact),
// atomic file writes (write-then-rename), and a stable 64-bit config hash.

namespace hos {

using json = nlohmann::json;

inline std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.good()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// CSV assembly: header plus rows, comma separated, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    append_row(header);
  }
  void append_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw InvalidArgument("CSV row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ << ',';
      body_ << cells[i];
    }
    body_ << '\n';
    ++rows_;
  }
  std::string str() const { return body_.str(); }
  size_t data_rows() const { return rows_ - 1; }

 private:
  size_t columns_;
  size_t rows_ = 0;
  std::ostringstream body_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (lineno == 1) {
      table.header = cells;
    } else {
      if (cells.size() != table.header.size())
        throw Error(path.string() + ": row " + std::to_string(lineno) + " has " +
                    std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(table.header.size()));
      table.rows.push_back(cells);
    }
  }
  if (table.header.empty()) throw Error(path.string() + ": empty CSV");
  return table;
}

inline double csv_number(const std::string& cell, const std::filesystem::path& path, size_t row) {
  try {
    size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (...) {
    throw Error(path.string() + ": row " + std::to_string(row + 2) + ": not a number: '" + cell +
                "'");
  }
}

// FNV-1a over the canonical (sorted-key) JSON dump; stable across runs.
inline std::string fnv1a_hex(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string config_hash(const json& config) { return fnv1a_hex(config.dump()); }

}  // namespace hos
