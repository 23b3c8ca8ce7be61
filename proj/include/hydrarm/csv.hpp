#pragma once

#include <string>
#include <vector>

namespace hydrarm {

/// Shortest round-trip decimal form of a double (std::to_chars), so repeated
/// runs produce byte-identical files and readers recover the exact value.
std::string format_double(double v);

double parse_double(const std::string& token);

struct CsvTable {
  std::vector<std::string> comments;  // leading '#' lines, without the marker
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Writes comment lines, a header row, then data rows (LF endings, '.' decimals).
void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

CsvTable read_csv(const std::string& path);

/// FNV-1a of a canonical config string; stamped into output headers so files
/// are traceable to the run that made them.
std::string fingerprint(const std::string& text);

}  // namespace hydrarm
