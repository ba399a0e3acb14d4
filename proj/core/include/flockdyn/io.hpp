#pragma once

// Text formatting shared by the CSV and JSON writers.

#include <string>
#include <vector>

namespace flockdyn::io {

/// Shortest-safe decimal form with 17 significant digits.
std::string format_double(double value);

/// One CSV row of 17-significant-digit values.
std::string csv_row(const std::vector<double>& values);

/// Reads a whole file; throws Io on failure.
std::string read_file(const std::string& path);
/// Writes (truncating) a whole file; throws Io on failure.
void write_file(const std::string& path, const std::string& contents);

}  // namespace flockdyn::io
