#pragma once

#include "hfvol/distributions.hpp"
#include "hfvol/series.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hfvol::aparch {

/// APARCH(p, q) with an ARMA(n_ar, n_ma) conditional mean:
///
///   r_t     = mu + sum ar_i r_{t-i} + sum ma_j eps_{t-j} + eps_t,   eps_t = sigma_t z_t
///   sigma_t^delta = alpha0 + sum_i alpha_i (|eps_{t-i}| + gamma_i eps_{t-i})^delta
///                          + sum_j beta_j sigma_{t-j}^delta
///
/// A negative gamma makes negative shocks raise volatility more than positive ones.
struct AparchParams {
    double mu = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    double alpha0 = 1.0;
    std::vector<double> alpha;  // length p
    std::vector<double> beta;   // length q
    std::vector<double> gamma;  // length p
    double delta = 2.0;

    std::size_t p() const noexcept { return alpha.size(); }
    std::size_t q() const noexcept { return beta.size(); }
    double persistence() const noexcept;

    /// Throws ConfigError when a bound is violated or gamma/alpha lengths differ.
    void validate() const;
};

/// Conditional-likelihood start: the first max(p, q, n_ar, n_ma) observations only
/// seed the recursions.
std::size_t initialization_window(const AparchParams& params);

struct FilterOptions {
    // sigma^delta for the start-up observations; defaults to the sample mean of
    // |r - mean(r)|^delta.
    std::optional<double> sigma_delta_init;
};

struct FilterOutput {
    std::vector<double> residuals;       // eps_t, all n
    std::vector<double> sigma;           // sigma_t, all n
    std::vector<double> loglik_per_obs;  // observations first_obs..n-1
    std::size_t first_obs = 0;
    double loglik = 0.0;
};

/// Runs the mean and volatility recursions and scores each observation.
/// Throws NumericError carrying the index of the first non-finite sigma^delta.
FilterOutput filter(std::span<const double> returns, const AparchParams& params,
                    const DistSpec& dist, const FilterOptions& options = {});
inline FilterOutput filter(const ReturnSeries& returns, const AparchParams& params,
                           const DistSpec& dist, const FilterOptions& options = {}) {
    return filter(returns.values, params, dist, options);
}

namespace detail {
// Non-throwing variant for the optimizer. Returns false on numeric failure and leaves
// the partially filled output in place. When per_obs is null only the total is kept.
bool filter_loglik(std::span<const double> returns, const AparchParams& params,
                   const LogDensity& density, double sigma_delta_init, std::size_t first_obs,
                   std::vector<double>* per_obs, double& loglik);
double default_sigma_delta_init(std::span<const double> returns, double delta);
} // namespace detail

/// E[sigma^delta] of the stationary process when it exists, else alpha0 / (1 - persistence)
/// or alpha0.
double stationary_sigma_delta(const AparchParams& params, const DistSpec& dist);

struct SimulatedPath {
    std::vector<double> returns;
    std::vector<double> sigma;
    std::vector<double> innovations;  // z_t
    double sigma_delta_init = 0.0;    // start-up value used before burn-in
};

/// Deterministic for a given seed. Pre-sample returns and residuals are zero and the
/// first max(p, q) sigma^delta values equal sigma_delta_init (stationary mean by default).
SimulatedPath simulate_path(const AparchParams& params, const DistSpec& dist, std::size_t n,
                            std::uint64_t seed, std::size_t burn_in = 1000,
                            std::optional<double> sigma_delta_init = std::nullopt);

ReturnSeries simulate(const AparchParams& params, const DistSpec& dist, std::size_t n,
                      std::uint64_t seed, std::size_t burn_in = 1000, int intervals_per_day = 1);

/// Intervals for half of a volatility shock to revert: ln(0.5) / ln(persistence).
/// Infinite for persistence >= 1; throws ConfigError for persistence <= 0.
double half_life(double persistence);
inline double half_life(const AparchParams& params) { return half_life(params.persistence()); }

enum class NestedModel {
    Arch,
    Narch,
    LogArch,
    GarchVariance,
    GarchStdDev,
    Tarch,
    Gjr,
    Aparch,
};

const char* to_string(NestedModel model) noexcept;

/// Most restrictive member of the APARCH family the parameters fall in, every
/// comparison made within tol.
NestedModel classify_nested(const AparchParams& params, double tol = 0.05);

/// Table-2 style parameter sets for five-minute UK futures returns.
AparchParams ftse100_reference_params();
AparchParams long_gilt_reference_params();
AparchParams short_sterling_reference_params();

} // namespace hfvol::aparch
