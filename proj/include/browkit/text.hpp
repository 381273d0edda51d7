#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace browkit::text {

/// Shortest-roundtrip-safe decimal text for a double (17 significant digits
/// at most, trailing zeros trimmed by %g).
std::string format_double(double v);
/// Fixed 12-significant-digit form used for report CSVs.
std::string format_report(double v);
std::string format_optional(const std::optional<double>& v);

std::string_view trim(std::string_view s);
std::vector<std::string> split_csv_line(std::string_view line, char sep = ',');
/// Strict full-string double parse; nullopt on failure.
std::optional<double> parse_double(std::string_view s);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path` only after
/// the content is fully flushed.
void atomic_write(const std::filesystem::path& path, std::string_view content);

}  // namespace browkit::text
