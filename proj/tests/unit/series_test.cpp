#include "hfvol/error.hpp"
#include "hfvol/series.hpp"
#include "hfvol/series_io.hpp"
#include "hfvol/time.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace hfvol;

namespace {

BarSeries bars_from(std::vector<double> prices) {
    BarSeries b;
    b.close_prices = std::move(prices);
    const auto start = *parse_timestamp("1998-03-02 08:05:00");
    for (std::size_t i = 0; i < b.close_prices.size(); ++i)
        b.timestamps.push_back(start + std::chrono::minutes(5 * static_cast<int>(i)));
    return b;
}

// Three sessions of four bars each, Monday to Wednesday.
BarSeries three_day_fixture() {
    BarSeries b;
    double p = 100.0;
    for (int day = 2; day <= 4; ++day) {
        for (int k = 1; k <= 4; ++k) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "1998-03-%02d 08:%02d:00", day, 5 * k);
            b.timestamps.push_back(*parse_timestamp(buf));
            p *= 1.0 + 0.001 * (k - 2);
            b.close_prices.push_back(p);
        }
    }
    return b;
}

} // namespace

TEST(LogReturns, EqualPricesGiveZero) {
    auto r = log_returns(bars_from({100, 100}));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r.values[0], 0.0);
}

TEST(LogReturns, AnalyticLog) {
    auto r = log_returns(bars_from({100, 105}));
    EXPECT_NEAR(r.values[0], 0.04879, 1e-5);
    EXPECT_NEAR(r.values[0], std::log(1.05), 1e-14);
}

TEST(LogReturns, TimestampsTakeLaterBar) {
    auto b = bars_from({100, 101, 102});
    auto r = log_returns(b);
    ASSERT_EQ(r.timestamps.size(), 2u);
    EXPECT_EQ(r.timestamps[0], b.timestamps[1]);
    EXPECT_EQ(r.timestamps[1], b.timestamps[2]);
}

TEST(LogReturns, DropOvernightRemovesDayBoundaryPairs) {
    const auto b = three_day_fixture();
    std::size_t boundaries = 0;
    for (std::size_t i = 1; i < b.size(); ++i)
        if (date_of(b.timestamps[i]) != date_of(b.timestamps[i - 1])) ++boundaries;
    ASSERT_EQ(boundaries, 2u);

    LogReturnOptions keep, drop;
    drop.drop_overnight = true;
    const auto all = log_returns(b, keep);
    const auto intraday = log_returns(b, drop);
    EXPECT_EQ(all.size(), b.size() - 1);
    EXPECT_EQ(all.size() - intraday.size(), boundaries);
    for (std::size_t i = 0; i < intraday.size(); ++i)
        EXPECT_NE(seconds_of_day(intraday.timestamps[i]), 8 * 3600 + 5 * 60);
}

TEST(LogReturns, RollReturnIsDroppedByDefault) {
    auto b = bars_from({100, 101, 90, 91});
    b.segment_starts = {2};
    EXPECT_EQ(log_returns(b).size(), 2u);
    LogReturnOptions keep;
    keep.drop_roll_returns = false;
    EXPECT_EQ(log_returns(b, keep).size(), 3u);
}

TEST(LogReturns, NonPositivePriceNamesTimestamp) {
    auto b = bars_from({100, 0, 101});
    try {
        log_returns(b);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("1998-03-02T08:10:00"), std::string::npos) << e.what();
    }
    EXPECT_THROW(log_returns(bars_from({100})), DataError);
}

TEST(LogReturns, ExponentialGrowthIsConstant) {
    const double g = 0.0037;
    std::vector<double> prices;
    for (int t = 0; t < 50; ++t) prices.push_back(250.0 * std::exp(g * t));
    for (double r : log_returns(bars_from(prices)).values) EXPECT_NEAR(r, g, 1e-12);
}

TEST(PowerTransform, Examples) {
    const std::vector<double> r{-2.0};
    EXPECT_NEAR(power_transform(r, {0.5, PowerMode::Absolute})[0], 1.41421, 1e-5);
    EXPECT_EQ(power_transform(r, {1.0, PowerMode::Squared})[0], 4.0);
    EXPECT_EQ(power_transform(std::vector<double>{0.0}, {0.3, PowerMode::Absolute})[0], 0.0);
}

TEST(PowerTransform, SquaredHalfEqualsAbsoluteOneExactly) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::vector<double> x(2000);
    for (auto& v : x) v = nd(rng) * 0.01;
    for (double k : {0.25, 0.5, 0.75, 1.0}) {
        const auto sq = power_transform(x, {k, PowerMode::Squared});
        const auto ab = power_transform(x, {2.0 * k, PowerMode::Absolute});
        for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(sq[i], ab[i]) << "k=" << k << " i=" << i;
    }
}

TEST(PowerTransform, RejectsNonPositiveK) {
    EXPECT_THROW(power_transform(std::vector<double>{1.0}, {0.0, PowerMode::Absolute}), ConfigError);
    EXPECT_THROW(power_transform(std::vector<double>{1.0}, {-1.0, PowerMode::Squared}), ConfigError);
}

TEST(PowerTransform, ScalingProperty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double c = u(rng);
        const double k = 0.1 + std::abs(u(rng));
        std::vector<double> x(20), cx(20);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = u(rng);
            cx[i] = c * x[i];
        }
        for (auto mode : {PowerMode::Absolute, PowerMode::Squared}) {
            const double kk = mode == PowerMode::Absolute ? k : 2.0 * k;
            const auto lhs = power_transform(cx, {k, mode});
            const auto rhs = power_transform(x, {k, mode});
            for (std::size_t i = 0; i < x.size(); ++i)
                EXPECT_NEAR(lhs[i], std::pow(std::abs(c), kk) * rhs[i], 1e-12 * (1.0 + lhs[i]));
        }
    }
}

TEST(PowerTransform, OrderPreserving) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0), kd(0.05, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = u(rng), b = u(rng), k = kd(rng);
        if (std::abs(a) == std::abs(b)) continue;
        const double lo = std::abs(a) < std::abs(b) ? a : b;
        const double hi = std::abs(a) < std::abs(b) ? b : a;
        for (auto mode : {PowerMode::Absolute, PowerMode::Squared}) {
            const auto t = power_transform(std::vector<double>{lo, hi}, {k, mode});
            EXPECT_LT(t[0], t[1]);
        }
    }
}

TEST(PowerTransform, SeriesOverloadKeepsMetadata) {
    auto s = make_return_series({-1.0, 2.0, -3.0}, 120);
    auto t = power_transform(s, {2.0, PowerMode::Absolute});
    EXPECT_EQ(t.timestamps, s.timestamps);
    EXPECT_EQ(t.intervals_per_day, 120);
    EXPECT_EQ(t.values, (std::vector<double>{1.0, 4.0, 9.0}));
}

TEST(Moments, AlternatingSeries) {
    const auto m = moments(std::vector<double>{1, -1, 1, -1});
    EXPECT_DOUBLE_EQ(m.mean, 0.0);
    EXPECT_DOUBLE_EQ(m.variance, 1.0);
    EXPECT_DOUBLE_EQ(m.skewness, 0.0);
    EXPECT_DOUBLE_EQ(m.excess_kurtosis, -2.0);
}

TEST(Moments, ConstantSeriesRejected) {
    EXPECT_THROW(moments(std::vector<double>{3, 3, 3, 3, 3}), DataError);
    EXPECT_THROW(moments(std::vector<double>{1, 2, 3}), DataError);
}

TEST(Moments, NormalDrawsHaveNoExcessKurtosis) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd;
    std::vector<double> x(100000);
    for (auto& v : x) v = nd(rng);
    const auto m = moments(x);
    EXPECT_NEAR(m.excess_kurtosis, 0.0, 0.1);
    EXPECT_NEAR(m.variance, 1.0, 0.02);
}

TEST(Time, ParseAndFormatRoundTrip) {
    const auto ts = parse_timestamp("1999-12-31 17:55:07");
    ASSERT_TRUE(ts);
    EXPECT_EQ(format_timestamp(*ts), "1999-12-31T17:55:07");
    EXPECT_EQ(parse_timestamp("1999-12-31T17:55"), parse_timestamp("1999-12-31 17:55:00"));
    EXPECT_FALSE(parse_timestamp("1999-13-01 10:00:00"));
    EXPECT_FALSE(parse_timestamp("garbage"));
    EXPECT_EQ(parse_time_of_day("08:35"), 515);
    EXPECT_FALSE(parse_time_of_day("25:00"));
    EXPECT_EQ(format_time_of_day(1075), "17:55");
}

TEST(SeriesCsv, RoundTripIsExact) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> v(500);
    for (auto& x : v) x = nd(rng) * 1e-3;
    auto s = make_return_series(v);
    const auto path = std::filesystem::temp_directory_path() / "hfvol_series_roundtrip.csv";
    write_returns_csv(path, s);
    auto back = read_returns_csv(path);
    EXPECT_EQ(back.values, s.values);
    EXPECT_EQ(back.timestamps, s.timestamps);
    std::filesystem::remove(path);
}

TEST(SeriesCsv, RejectsNonIncreasingTimestamps) {
    const auto path = std::filesystem::temp_directory_path() / "hfvol_series_bad.csv";
    {
        std::ofstream f(path);
        f << "timestamp,value\n1998-01-02T08:05:00,1\n1998-01-02T08:05:00,2\n";
    }
    EXPECT_THROW(read_returns_csv(path), DataError);
    std::filesystem::remove(path);
}
