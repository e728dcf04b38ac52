// CSV panel loading and alignment.
//
// Dialect: UTF-8, comma separated, '.' decimal point, no quoting, header row
// first, date in the first column. Empty cells and NA/NaN are missing.

#pragma once

#include "tica/core.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tica {

enum class MissingPolicy { DropRow, ForwardFill, Error };

struct IngestConfig {
    std::string date_column;                // empty: whatever the first header cell says
    std::string date_format = "%Y-%m-%d";   // or "ordinal" for plain integers
    MissingPolicy missing = MissingPolicy::DropRow;
    int max_gap = 1;                        // ForwardFill only
    std::vector<std::string> column_filter; // empty: all columns in file order
    SeriesKind kind = SeriesKind::Returns;
};

SeriesMatrix load_csv(const std::filesystem::path& path, const IngestConfig& cfg);
SeriesMatrix parse_csv(std::string_view text, const IngestConfig& cfg);

/// Inner join on timestamps; columns in input order, rows sorted by time.
SeriesMatrix align_panels(const std::vector<SeriesMatrix>& panels);

/// Inverse of parse_csv for the same date format.
std::string format_csv(const SeriesMatrix& m, const std::string& date_format,
                       const std::string& date_header = "date");

/// Supported pattern tokens: %Y %m %d %H %M %S %%. Patterns with a time part
/// map to seconds since 1970-01-01, date-only patterns to days.
std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format);
std::string format_timestamp(Timestamp t, std::string_view format);

/// Shortest decimal representation that round-trips.
std::string format_double(double x);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace tica
