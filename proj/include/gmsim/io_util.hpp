#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gmsim {

/// Decimal text with 9 significant digits; round-trips every tolerance the
/// toolkit asserts.
std::string to_sig9(double v);

/// Write-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Plain comma split; the toolkit's CSV dialect never quotes.
std::vector<std::string> split_csv_line(const std::string& line);

std::string trim(const std::string& s);

std::optional<double> parse_double(const std::string& s);

}  // namespace gmsim
