#pragma once

// Plain-text formats: point-cloud CSV, fixed-schema result tables and
// key=value configuration files.

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimprof/core.hpp"

namespace dimprof {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using CsvRow = std::vector<std::string>;

inline void write_csv(std::ostream& os, const CsvRow& header, const std::vector<CsvRow>& rows) {
  auto line = [&](const CsvRow& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  };
  line(header);
  for (const auto& row : rows) {
    require(row.size() == header.size(), "csv: row width differs from header");
    line(row);
  }
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << contents;
  if (!file) throw IoError("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  return text.substr(first, text.find_last_not_of(" \t\r\n") - first + 1);
}

// ---------------------------------------------------------------------------
// Point clouds
// ---------------------------------------------------------------------------

/// Header x1,...,xn followed by one point per row.
inline void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
  CsvRow header;
  for (int a = 1; a <= cloud.ambient_dim(); ++a) header.push_back("x" + std::to_string(a));
  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CsvRow row;
    for (int a = 0; a < cloud.ambient_dim(); ++a) row.push_back(format_number(cloud.coordinate(i, a)));
    rows.push_back(std::move(row));
  }
  write_csv(os, header, rows);
}

/// Reads non-negative coordinates. With `resolution` given, coordinates are
/// rounded to the grid of side 2^-resolution and duplicates merged; otherwise
/// the finest resolution needed to represent every value exactly is used,
/// which must not exceed 62.
inline PointCloud read_cloud_csv(std::istream& is, std::optional<int> resolution = std::nullopt) {
  std::string line;
  int dim = 0;
  std::vector<double> values;
  std::size_t line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, ',');
    if (dim == 0) {
      dim = static_cast<int>(fields.size());
      require(fields[0].size() > 0 && fields[0][0] == 'x', "cloud csv: expected header x1,...,xn");
      continue;
    }
    require(static_cast<int>(fields.size()) == dim,
            "cloud csv: line " + std::to_string(line_number) + " has the wrong number of fields");
    for (const auto& field : fields) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(trim(field), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used > 0 && used == trim(field).size() && std::isfinite(v) && v >= 0.0,
              "cloud csv: line " + std::to_string(line_number) + ": '" + field + "' is not a non-negative number");
      values.push_back(v);
    }
  }
  require(dim >= 1, "cloud csv: missing header");

  int level = resolution.value_or(0);
  if (resolution) {
    require(level >= 0 && level <= 62, "cloud csv: resolution must lie in [0, 62]");
  } else {
    for (double v : values) {
      while (level <= 62 && std::ldexp(v, level) != std::floor(std::ldexp(v, level))) ++level;
      require(level <= 62, "cloud csv: value needs more than 62 binary digits; pass an explicit resolution");
    }
  }
  std::vector<std::uint64_t> cells;
  cells.reserve(values.size());
  for (double v : values) {
    const double scaled = std::ldexp(v, level);
    require(scaled < 1.8e19, "cloud csv: coordinate too large for the chosen resolution");
    cells.push_back(static_cast<std::uint64_t>(std::llround(scaled)));
  }
  return PointCloud::deduplicated(dim, level, std::move(cells));
}

inline PointCloud read_cloud_file(const std::string& path, std::optional<int> resolution = std::nullopt) {
  std::istringstream stream(read_file(path));
  return read_cloud_csv(stream, resolution);
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// key=value lines; '#' starts a comment, blank lines are ignored. Keys keep
/// their order of appearance.
inline std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos && eq > 0,
            "config: line " + std::to_string(line_number) + " is not of the form key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace dimprof
