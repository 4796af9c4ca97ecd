#include "hfvol/series.hpp"

#include "hfvol/error.hpp"

#include <algorithm>
#include <cmath>

namespace hfvol {

const char* to_string(PowerMode mode) noexcept {
    return mode == PowerMode::Absolute ? "absolute" : "squared";
}

ReturnSeries log_returns(const BarSeries& bars, const LogReturnOptions& options) {
    if (bars.size() < 2) throw DataError("log_returns: need at least 2 bars");
    if (bars.timestamps.size() != bars.close_prices.size())
        throw DataError("log_returns: timestamps and prices differ in length");

    for (std::size_t i = 0; i < bars.size(); ++i) {
        if (!(bars.close_prices[i] > 0.0))
            throw DataError("log_returns: non-positive price at " +
                            format_timestamp(bars.timestamps[i]));
    }

    std::vector<bool> roll(bars.size(), false);
    if (options.drop_roll_returns) {
        for (auto idx : bars.segment_starts)
            if (idx < roll.size()) roll[idx] = true;
    }

    ReturnSeries out;
    out.intervals_per_day = bars.intervals_per_day;
    out.values.reserve(bars.size() - 1);
    out.timestamps.reserve(bars.size() - 1);
    for (std::size_t i = 1; i < bars.size(); ++i) {
        if (roll[i]) continue;
        if (options.drop_overnight && date_of(bars.timestamps[i]) != date_of(bars.timestamps[i - 1]))
            continue;
        out.values.push_back(std::log(bars.close_prices[i]) - std::log(bars.close_prices[i - 1]));
        out.timestamps.push_back(bars.timestamps[i]);
    }
    return out;
}

std::vector<double> power_transform(std::span<const double> values, const PowerTransform& t) {
    if (!(t.k > 0.0)) throw ConfigError("power_transform: k must be positive");
    // (r^2)^k is evaluated as |r|^(2k) so the two modes agree bit for bit.
    const double exponent = t.mode == PowerMode::Squared ? 2.0 * t.k : t.k;
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(),
                   [exponent](double r) { return std::pow(std::abs(r), exponent); });
    return out;
}

ReturnSeries power_transform(const ReturnSeries& series, const PowerTransform& t) {
    ReturnSeries out;
    out.values = power_transform(series.values, t);
    out.timestamps = series.timestamps;
    out.intervals_per_day = series.intervals_per_day;
    return out;
}

Moments moments(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 4) throw DataError("moments: need at least 4 observations");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (!(m2 > 0.0)) throw DataError("moments: zero variance (degenerate series)");
    Moments m;
    m.mean = mean;
    m.variance = m2;
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return m;
}

ReturnSeries make_return_series(std::vector<double> values, int intervals_per_day) {
    ReturnSeries out;
    out.intervals_per_day = intervals_per_day;
    out.timestamps.reserve(values.size());
    const Timestamp origin = at_minutes(Date{std::chrono::year{2000}, std::chrono::January,
                                             std::chrono::day{1}}, 0);
    for (std::size_t i = 0; i < values.size(); ++i)
        out.timestamps.push_back(origin + std::chrono::seconds{static_cast<long>(i)});
    out.values = std::move(values);
    return out;
}

} // namespace hfvol
