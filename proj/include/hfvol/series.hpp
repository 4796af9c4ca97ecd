#pragma once

#include "hfvol/time.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hfvol {

/// Interval closing prices for one contract series.
struct BarSeries {
    std::vector<Timestamp> timestamps;  // strictly increasing
    std::vector<double> close_prices;   // > 0
    int intervals_per_day = 1;
    std::string contract_id;
    // Indices of bars that open a new delivery-month segment after a roll.
    // The return ending on such a bar spans two contracts.
    std::vector<std::size_t> segment_starts;

    std::size_t size() const noexcept { return close_prices.size(); }
};

/// Log returns aligned with the timestamp of the later bar of each pair.
struct ReturnSeries {
    std::vector<double> values;
    std::vector<Timestamp> timestamps;
    int intervals_per_day = 1;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
};

enum class PowerMode { Absolute, Squared };

/// |r|^k (absolute) or (r^2)^k (squared), k > 0.
struct PowerTransform {
    double k = 1.0;
    PowerMode mode = PowerMode::Absolute;
};

const char* to_string(PowerMode mode) noexcept;

struct LogReturnOptions {
    bool drop_overnight = false;   // omit pairs spanning a calendar-day boundary
    bool drop_roll_returns = true; // omit pairs spanning a segment start
};

/// Throws DataError naming the timestamp of the first non-positive price,
/// or when fewer than two bars are supplied.
ReturnSeries log_returns(const BarSeries& bars, const LogReturnOptions& options = {});

/// Throws ConfigError when k <= 0.
ReturnSeries power_transform(const ReturnSeries& series, const PowerTransform& t);
std::vector<double> power_transform(std::span<const double> values, const PowerTransform& t);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // population convention (divide by n)
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

/// Needs n >= 4 and positive variance; throws DataError otherwise.
Moments moments(std::span<const double> values);
inline Moments moments(const ReturnSeries& series) { return moments(series.values); }

/// Builds a series with synthetic timestamps one second apart, for data without a clock.
ReturnSeries make_return_series(std::vector<double> values, int intervals_per_day = 1);

} // namespace hfvol
