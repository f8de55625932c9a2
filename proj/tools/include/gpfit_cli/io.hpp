#pragma once

// CSV and file plumbing for the command-line tool.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <gpfit/common.hpp>
#include <gpfit/errors.hpp>

namespace gpfit::cli {

/// Unreadable or malformed input file; the message names the file and,
/// where it applies, the line.
class InputError : public Error {
 public:
  using Error::Error;
};

struct CsvTable {
  /// Column names; empty when the file had no header row.
  std::vector<std::string> header;
  Matrix values;
};

/// Comma-separated numbers, one record per line. The first non-blank line is
/// taken as a header when any of its fields is not a number. Blank lines are
/// skipped; every record must have the same field count.
CsvTable parse_csv(std::istream& in, const std::string& source);
CsvTable read_csv(const std::string& path);

/// %.17g, which reads back to the identical double.
std::string format_number(double v);

std::string to_csv(const std::vector<std::string>& header, const Matrix& values);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// "1,2.5,3" -> {1, 2.5, 3}. `what` names the option in error messages.
std::vector<double> parse_number_list(std::string_view text, std::string_view what);

}  // namespace gpfit::cli
