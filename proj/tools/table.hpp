#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace qcd::cli {

/// One CSV field. monostate renders as an empty field.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct OutputTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  /// Appends a row; throws std::invalid_argument on a column-count mismatch.
  void add(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;
};

/// %.9g for finite doubles, "inf"/"-inf" for infinities.
std::string format_number(double v);
/// RFC-4180 field quoting.
std::string quote_field(const std::string& s);

/// Header plus rows, comma separated, LF terminated.
void write_csv(std::ostream& os, const OutputTable& t);
std::string to_csv(const OutputTable& t);

/// Writes `content` to `path` through a sibling temp file and a rename, so
/// readers see either the old file or the complete new one.
void write_file_atomic(const std::string& path, const std::string& content);

/// Standard output when `path` is empty or "-", otherwise an atomic write.
void emit(const std::string& path, const std::string& content);

}  // namespace qcd::cli
