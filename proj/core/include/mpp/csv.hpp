#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mpp/linalg.hpp"
#include "mpp/returns.hpp"

namespace mpp {

enum class DataKind { Prices, Returns };

DataKind parse_data_kind(std::string_view s);

/// Parses `date,<label>...` CSV text. Prices become net returns
/// p_t / p_{t-1} - 1 and lose their first row. Errors carry the 1-based
/// row and column of the offending cell.
ReturnsWindow parse_table(std::string_view text, DataKind kind, std::string_view source = "<input>");

ReturnsWindow ingest(const std::filesystem::path& path, DataKind kind);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

void write_returns_csv(std::ostream& os, const ReturnsWindow& window);
void write_returns_csv(const std::filesystem::path& path, const ReturnsWindow& window);

/// Reads a `date,rf` file and returns the rates aligned to `dates`. The file
/// must list exactly those dates in order; anything else is DateMismatch.
Vector read_rf_file(const std::filesystem::path& path, const std::vector<std::string>& dates);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace mpp
