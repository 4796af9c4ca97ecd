#include "hfvol/aparch.hpp"
#include "hfvol/error.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hfvol;
using namespace hfvol::aparch;

namespace {

AparchParams garch(double a0, double a, double b, double g = 0.0, double d = 2.0) {
    AparchParams p;
    p.alpha0 = a0;
    p.alpha = {a};
    p.beta = {b};
    p.gamma = {g};
    p.delta = d;
    return p;
}

} // namespace

TEST(Params, Validation) {
    EXPECT_NO_THROW(long_gilt_reference_params().validate());
    auto p = garch(0.1, 0.2, 0.7);
    p.alpha0 = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = garch(0.1, 0.5, 0.6);
    EXPECT_THROW(p.validate(), ConfigError);
    p = garch(0.1, 0.2, 0.7, -1.2);
    EXPECT_THROW(p.validate(), ConfigError);
    p = garch(0.1, 0.2, 0.7, 0.0, -1.0);
    EXPECT_THROW(p.validate(), ConfigError);
    p = garch(0.1, 0.2, 0.7);
    p.gamma.clear();
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Filter, ConstantVolatilityClosedForm) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    std::vector<double> r(1000);
    for (auto& v : r) v = nd(rng);
    auto p = garch(1.0, 0.0, 0.0, 0.4);
    const auto out = filter(r, p, DistSpec::normal());
    double ss = 0.0;
    for (std::size_t t = out.first_obs; t < r.size(); ++t) ss += r[t] * r[t];
    const double n = static_cast<double>(r.size() - out.first_obs);
    EXPECT_NEAR(out.loglik, -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * ss, 1e-9);
    for (std::size_t t = 1; t < r.size(); ++t) EXPECT_DOUBLE_EQ(out.sigma[t], 1.0);
}

TEST(Filter, LoglikIsSumOfPerObservation) {
    const auto r = simulate(long_gilt_reference_params(), DistSpec::normal(), 3000, 2);
    for (const auto& d : {DistSpec::normal(), DistSpec::student_t(5.0), DistSpec::ged(1.3)}) {
        const auto out = filter(r, long_gilt_reference_params(), d);
        double s = 0.0;
        for (double v : out.loglik_per_obs) s += v;
        EXPECT_NEAR(out.loglik, s, 1e-8 * std::abs(s));
        EXPECT_EQ(out.loglik_per_obs.size(), r.size() - out.first_obs);
        EXPECT_EQ(out.first_obs, 1u);
    }
}

TEST(Filter, GarchReductionMatchesOracle) {
    const auto truth = garch(0.05, 0.08, 0.9);
    auto r = simulate(truth, DistSpec::normal(), 10000, 3).values;
    for (auto& v : r) v += 0.02;
    for (auto [mu, a0, a, b] : {std::tuple{0.02, 0.05, 0.08, 0.9}, std::tuple{-0.1, 0.2, 0.3, 0.5},
                                std::tuple{0.0, 1.0, 0.0, 0.0}}) {
        auto p = garch(a0, a, b);
        p.mu = mu;
        const auto out = filter(r, p, DistSpec::normal());
        EXPECT_NEAR(out.loglik, oracle::garch11_loglik(r, mu, a0, a, b), 1e-8);
    }
}

TEST(Filter, ArchReductionMatchesOracle) {
    AparchParams p;
    p.alpha0 = 0.3;
    p.alpha = {0.4};
    p.gamma = {0.0};
    p.delta = 2.0;
    auto r = simulate(p, DistSpec::normal(), 10000, 4).values;
    p.mu = 0.01;
    const auto out = filter(r, p, DistSpec::normal());
    EXPECT_NEAR(out.loglik, oracle::arch1_loglik(r, 0.01, 0.3, 0.4), 1e-8);
}

TEST(Filter, SigmaPositiveForValidParams) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 200; ++trial) {
        const double a = 0.5 * u(rng);
        auto p = garch(1e-3 + u(rng), a, (1.0 - a) * u(rng), 2.0 * u(rng) - 1.0, 0.1 + 3.0 * u(rng));
        p.ar = {0.8 * u(rng) - 0.4};
        p.ma = {0.8 * u(rng) - 0.4};
        std::vector<double> r(300);
        for (auto& v : r) v = 0.01 * nd(rng);
        const auto out = filter(r, p, DistSpec::normal());
        for (double s : out.sigma) ASSERT_GT(s, 0.0);
    }
}

TEST(Filter, LeverageDirection) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd;
    std::vector<double> base(200);
    for (auto& v : base) v = 0.5 * nd(rng);
    for (double delta : {0.47, 1.0, 2.0})
        for (double m : {0.01, 0.5, 3.0}) {
            auto p = garch(0.1, 0.1, 0.8, -0.3, delta);
            auto down = base, up = base;
            down.push_back(-m);
            up.push_back(m);
            down.push_back(0.0);
            up.push_back(0.0);
            FilterOptions fixed{1.0};
            const auto sd = filter(down, p, DistSpec::normal(), fixed).sigma.back();
            const auto su = filter(up, p, DistSpec::normal(), fixed).sigma.back();
            EXPECT_GT(sd, su) << "delta=" << delta << " m=" << m;
        }
}

TEST(Filter, NonFiniteRecursionReportsIndex) {
    auto p = garch(1.0, 0.5, 0.5, 0.0, 2.0);
    std::vector<double> r{0.1, 1e200, 1e200, 0.1};
    try {
        filter(r, p, DistSpec::normal(), FilterOptions{1.0});
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_EQ(e.index(), 2);
    }
}

TEST(Simulate, MatchesFilterWithSharedInitialization) {
    const auto p = long_gilt_reference_params();
    const double init = stationary_sigma_delta(p, DistSpec::normal());
    const auto path = simulate_path(p, DistSpec::normal(), 20000, 7, 0, init);
    const auto out = filter(path.returns, p, DistSpec::normal(), FilterOptions{init});
    for (std::size_t t = out.first_obs; t < path.returns.size(); ++t)
        ASSERT_NEAR(out.sigma[t], path.sigma[t], 1e-10 * path.sigma[t]) << t;
    for (std::size_t t = 0; t < path.returns.size(); t += 997)
        EXPECT_NEAR(out.residuals[t], path.sigma[t] * path.innovations[t], 1e-12);
}

TEST(Simulate, IidCaseHasKnownScale) {
    const auto p = garch(0.04, 0.0, 0.0, 0.0, 2.0);
    const auto r = simulate(p, DistSpec::normal(), 100000, 8);
    const auto m = moments(r);
    EXPECT_NEAR(std::sqrt(m.variance), 0.2, 0.002);
    EXPECT_NEAR(m.excess_kurtosis, 0.0, 0.1);

    const auto q = garch(0.3, 0.0, 0.0, 0.0, 0.47);
    const auto r2 = simulate(q, DistSpec::normal(), 100000, 9);
    EXPECT_NEAR(std::sqrt(moments(r2).variance), std::pow(0.3, 1.0 / 0.47), 0.01 * std::pow(0.3, 1.0 / 0.47));
}

TEST(Simulate, Deterministic) {
    const auto p = ftse100_reference_params();
    const auto a = simulate(p, DistSpec::student_t(6.0), 5000, 10);
    const auto b = simulate(p, DistSpec::student_t(6.0), 5000, 10);
    const auto c = simulate(p, DistSpec::student_t(6.0), 5000, 11);
    EXPECT_EQ(a.values, b.values);
    EXPECT_NE(a.values, c.values);
}

TEST(Simulate, FtseHasFatTails) {
    const auto r = simulate(ftse100_reference_params(), DistSpec::normal(), 100000, 12);
    EXPECT_GT(moments(r).excess_kurtosis, 0.0);
}

TEST(Simulate, GiltVolatilityIsStable) {
    const auto p = long_gilt_reference_params();
    const auto path = simulate_path(p, DistSpec::normal(), 50000, 13);
    std::vector<double> block_means;
    for (std::size_t b = 0; b < 5; ++b) {
        double s = 0.0;
        for (std::size_t t = b * 10000; t < (b + 1) * 10000; ++t) {
            ASSERT_TRUE(std::isfinite(path.sigma[t]));
            ASSERT_GT(path.sigma[t], 0.0);
            s += path.sigma[t];
        }
        block_means.push_back(s / 10000.0);
    }
    const auto [lo, hi] = std::minmax_element(block_means.begin(), block_means.end());
    EXPECT_LT(*hi / *lo, 1.5);
    const double target = std::pow(stationary_sigma_delta(p, DistSpec::normal()), 1.0 / p.delta);
    EXPECT_GT(block_means.back(), 0.5 * target);
    EXPECT_LT(block_means.back(), 2.0 * target);
}

TEST(HalfLife, PublishedValues) {
    auto ftse = ftse100_reference_params();
    EXPECT_NEAR(half_life(ftse), 22.76, 0.01);
    EXPECT_NEAR(half_life(short_sterling_reference_params()), 2.65, 0.01);
    EXPECT_DOUBLE_EQ(half_life(0.5), 1.0);
    EXPECT_TRUE(std::isinf(half_life(1.0)));
    EXPECT_THROW(half_life(0.0), ConfigError);
}

TEST(Classify, NestedModels) {
    AparchParams arch;
    arch.alpha0 = 1.0;
    arch.alpha = {0.3};
    arch.beta = {0.0};
    arch.gamma = {0.0};
    arch.delta = 2.0;
    EXPECT_EQ(classify_nested(arch), NestedModel::Arch);
    EXPECT_EQ(classify_nested(garch(1.0, 0.1, 0.8)), NestedModel::GarchVariance);
    EXPECT_EQ(classify_nested(garch(1.0, 0.1, 0.8, 0.0, 1.0)), NestedModel::GarchStdDev);
    EXPECT_EQ(classify_nested(garch(1.0, 0.1, 0.8, -0.3, 1.0)), NestedModel::Tarch);
    EXPECT_EQ(classify_nested(garch(1.0, 0.1, 0.8, 0.3, 2.0)), NestedModel::Gjr);
    EXPECT_EQ(classify_nested(garch(1.0, 0.1, 0.0, 0.0, 1.4)), NestedModel::Narch);
    EXPECT_EQ(classify_nested(garch(1.0, 0.1, 0.8, 0.0, 0.01)), NestedModel::LogArch);
    EXPECT_EQ(classify_nested(long_gilt_reference_params()), NestedModel::Aparch);
    EXPECT_STREQ(to_string(NestedModel::Aparch), "APARCH (general)");
    // Within tolerance counts as a match.
    EXPECT_EQ(classify_nested(garch(1.0, 0.1, 0.8, 0.04, 1.96)), NestedModel::GarchVariance);
    EXPECT_EQ(classify_nested(garch(1.0, 0.1, 0.8, 0.04, 1.96), 0.01), NestedModel::Aparch);
}
