#pragma once

#include "hfvol/series.hpp"

#include <filesystem>
#include <iosfwd>

namespace hfvol {

// Two-column CSV: header "timestamp,value", ISO-8601 timestamps with seconds,
// values printed with round-trip precision.

void write_series_csv(std::ostream& out, std::span<const Timestamp> timestamps,
                      std::span<const double> values);

void write_bars_csv(const std::filesystem::path& path, const BarSeries& bars);
void write_returns_csv(const std::filesystem::path& path, const ReturnSeries& returns);

/// Throws DataError on a missing header, malformed row, or non-increasing timestamps.
BarSeries read_bars_csv(const std::filesystem::path& path, int intervals_per_day = 1);
ReturnSeries read_returns_csv(const std::filesystem::path& path, int intervals_per_day = 1);

/// Formats a double with enough digits to round-trip.
std::string format_double(double v);

} // namespace hfvol
