#include "hfvol/aparch.hpp"

#include "hfvol/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hfvol::aparch {

double AparchParams::persistence() const noexcept {
    return std::accumulate(alpha.begin(), alpha.end(), 0.0) +
           std::accumulate(beta.begin(), beta.end(), 0.0);
}

void AparchParams::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("APARCH parameters: " + what); };
    if (gamma.size() != alpha.size()) fail("gamma and alpha must have the same length");
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) fail("alpha0 must be positive");
    if (!(delta > 0.0) || !std::isfinite(delta)) fail("delta must be positive");
    for (double a : alpha)
        if (!(a >= 0.0)) fail("alpha must be non-negative");
    for (double b : beta)
        if (!(b >= 0.0)) fail("beta must be non-negative");
    for (double g : gamma)
        if (!(g >= -1.0 && g <= 1.0)) fail("gamma must lie in [-1, 1]");
    if (persistence() > 1.0) fail("sum of alpha and beta must not exceed 1");
    for (double v : ar)
        if (!std::isfinite(v)) fail("AR coefficients must be finite");
    for (double v : ma)
        if (!std::isfinite(v)) fail("MA coefficients must be finite");
    if (!std::isfinite(mu)) fail("mu must be finite");
}

std::size_t initialization_window(const AparchParams& params) {
    return std::max({params.p(), params.q(), params.ar.size(), params.ma.size()});
}

namespace detail {

double default_sigma_delta_init(std::span<const double> returns, double delta) {
    if (returns.empty()) return 1.0;
    const double mean =
        std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
    double s = 0.0;
    for (double r : returns) s += std::pow(std::abs(r - mean), delta);
    return s / static_cast<double>(returns.size());
}

bool filter_loglik(std::span<const double> r, const AparchParams& params,
                   const LogDensity& density, double sigma_delta_init, std::size_t first_obs,
                   std::vector<double>* per_obs, double& loglik, std::vector<double>* eps_out,
                   std::vector<double>* sigma_out, long* fail_index) {
    const std::size_t n = r.size();
    const std::size_t p = params.p(), q = params.q();
    const std::size_t n_ar = params.ar.size(), n_ma = params.ma.size();
    const std::size_t vol_start = std::max(p, q);
    const double delta = params.delta;
    const double inv_delta = 1.0 / delta;

    std::vector<double> eps(n), sd(n);
    if (per_obs) per_obs->assign(n > first_obs ? n - first_obs : 0, 0.0);
    if (sigma_out) sigma_out->assign(n, 0.0);
    loglik = 0.0;

    for (std::size_t t = 0; t < n; ++t) {
        double e = r[t] - params.mu;
        for (std::size_t i = 0; i < n_ar && i < t; ++i) e -= params.ar[i] * r[t - 1 - i];
        for (std::size_t j = 0; j < n_ma && j < t; ++j) e -= params.ma[j] * eps[t - 1 - j];
        eps[t] = e;

        double s;
        if (t < vol_start) {
            s = sigma_delta_init;
        } else {
            s = params.alpha0;
            for (std::size_t i = 0; i < p; ++i) {
                const double prev = eps[t - 1 - i];
                const double base = std::abs(prev) + params.gamma[i] * prev;
                if (params.alpha[i] != 0.0 && base > 0.0) s += params.alpha[i] * std::pow(base, delta);
            }
            for (std::size_t j = 0; j < q; ++j) s += params.beta[j] * sd[t - 1 - j];
        }
        if (!(s > 0.0) || !std::isfinite(s) || !std::isfinite(e)) {
            if (fail_index) *fail_index = static_cast<long>(t);
            if (eps_out) *eps_out = std::move(eps);
            return false;
        }
        sd[t] = s;
        const double log_sigma = inv_delta * std::log(s);
        if (sigma_out) (*sigma_out)[t] = std::exp(log_sigma);
        if (t >= first_obs) {
            const double sigma = sigma_out ? (*sigma_out)[t] : std::exp(log_sigma);
            const double l = density(e / sigma, log_sigma);
            if (per_obs) (*per_obs)[t - first_obs] = l;
            loglik += l;
        }
    }
    if (!std::isfinite(loglik)) {
        if (fail_index) *fail_index = static_cast<long>(n) - 1;
        return false;
    }
    if (eps_out) *eps_out = std::move(eps);
    return true;
}

bool filter_loglik(std::span<const double> returns, const AparchParams& params,
                   const LogDensity& density, double sigma_delta_init, std::size_t first_obs,
                   std::vector<double>* per_obs, double& loglik) {
    return filter_loglik(returns, params, density, sigma_delta_init, first_obs, per_obs, loglik,
                         nullptr, nullptr, nullptr);
}

} // namespace detail

FilterOutput filter(std::span<const double> returns, const AparchParams& params,
                    const DistSpec& dist, const FilterOptions& options) {
    params.validate();
    const std::size_t window = initialization_window(params);
    if (returns.size() <= params.p() + params.q() + params.ar.size() + params.ma.size() ||
        returns.size() <= window)
        throw DataError("filter: series too short for the model order");

    const LogDensity density(dist);
    const double init = options.sigma_delta_init.value_or(
        detail::default_sigma_delta_init(returns, params.delta));

    FilterOutput out;
    out.first_obs = window;
    long fail = -1;
    if (!detail::filter_loglik(returns, params, density, init, window, &out.loglik_per_obs,
                               out.loglik, &out.residuals, &out.sigma, &fail))
        throw NumericError("filter: non-finite sigma^delta at t = " + std::to_string(fail), fail);
    return out;
}

double stationary_sigma_delta(const AparchParams& params, const DistSpec& dist) {
    double denom = 1.0 - std::accumulate(params.beta.begin(), params.beta.end(), 0.0);
    const double m = abs_moment(dist, params.delta);
    for (std::size_t i = 0; i < params.p(); ++i) {
        const double g = params.gamma[i];
        // Symmetric innovations: E(|z| + g z)^delta = ((1+g)^delta + (1-g)^delta) / 2 * E|z|^delta
        const double kappa = 0.5 * (std::pow(1.0 + g, params.delta) + std::pow(1.0 - g, params.delta)) * m;
        denom -= params.alpha[i] * kappa;
    }
    if (denom > 0.0 && std::isfinite(denom)) return params.alpha0 / denom;
    const double persistence = params.persistence();
    return persistence < 1.0 ? params.alpha0 / (1.0 - persistence) : params.alpha0;
}

SimulatedPath simulate_path(const AparchParams& params, const DistSpec& dist, std::size_t n,
                            std::uint64_t seed, std::size_t burn_in,
                            std::optional<double> sigma_delta_init) {
    params.validate();
    dist.validate();
    const std::size_t total = n + burn_in;
    const std::size_t p = params.p(), q = params.q();
    const std::size_t n_ar = params.ar.size(), n_ma = params.ma.size();
    const std::size_t vol_start = std::max(p, q);
    const double init = sigma_delta_init.value_or(stationary_sigma_delta(params, dist));

    std::mt19937_64 rng(seed);
    InnovationSampler draw(dist);
    std::vector<double> r(total), eps(total), sd(total), sigma(total), z(total);
    for (std::size_t t = 0; t < total; ++t) {
        double s;
        if (t < vol_start) {
            s = init;
        } else {
            s = params.alpha0;
            for (std::size_t i = 0; i < p; ++i) {
                const double prev = eps[t - 1 - i];
                const double base = std::abs(prev) + params.gamma[i] * prev;
                if (params.alpha[i] != 0.0 && base > 0.0) s += params.alpha[i] * std::pow(base, params.delta);
            }
            for (std::size_t j = 0; j < q; ++j) s += params.beta[j] * sd[t - 1 - j];
        }
        sd[t] = s;
        sigma[t] = std::exp(std::log(s) / params.delta);
        z[t] = draw(rng);
        eps[t] = sigma[t] * z[t];
        double mean = params.mu;
        for (std::size_t i = 0; i < n_ar && i < t; ++i) mean += params.ar[i] * r[t - 1 - i];
        for (std::size_t j = 0; j < n_ma && j < t; ++j) mean += params.ma[j] * eps[t - 1 - j];
        r[t] = mean + eps[t];
    }

    SimulatedPath path;
    const auto skip = static_cast<std::ptrdiff_t>(burn_in);
    path.returns.assign(r.begin() + skip, r.end());
    path.sigma.assign(sigma.begin() + skip, sigma.end());
    path.innovations.assign(z.begin() + skip, z.end());
    path.sigma_delta_init = init;
    return path;
}

ReturnSeries simulate(const AparchParams& params, const DistSpec& dist, std::size_t n,
                      std::uint64_t seed, std::size_t burn_in, int intervals_per_day) {
    auto path = simulate_path(params, dist, n, seed, burn_in);
    return make_return_series(std::move(path.returns), intervals_per_day);
}

double half_life(double persistence) {
    if (!(persistence > 0.0)) throw ConfigError("half_life: persistence must be positive");
    if (persistence >= 1.0) return std::numeric_limits<double>::infinity();
    return std::log(0.5) / std::log(persistence);
}

const char* to_string(NestedModel model) noexcept {
    switch (model) {
    case NestedModel::Arch: return "ARCH";
    case NestedModel::Narch: return "NARCH";
    case NestedModel::LogArch: return "Log-ARCH";
    case NestedModel::GarchVariance: return "GARCH-variance";
    case NestedModel::GarchStdDev: return "GARCH-stddev";
    case NestedModel::Tarch: return "TARCH";
    case NestedModel::Gjr: return "GJR";
    case NestedModel::Aparch: return "APARCH (general)";
    }
    return "APARCH (general)";
}

NestedModel classify_nested(const AparchParams& params, double tol) {
    auto near = [tol](double v, double target) { return std::abs(v - target) <= tol; };
    const bool no_gamma =
        std::all_of(params.gamma.begin(), params.gamma.end(), [&](double g) { return near(g, 0.0); });
    const bool no_beta =
        std::all_of(params.beta.begin(), params.beta.end(), [&](double b) { return near(b, 0.0); });
    const bool d2 = near(params.delta, 2.0);
    const bool d1 = near(params.delta, 1.0);
    const bool d0 = params.delta < tol;

    // Ordered from most to least restrictive.
    if (d2 && no_gamma && no_beta) return NestedModel::Arch;
    if (d0 && no_gamma) return NestedModel::LogArch;
    if (no_gamma && no_beta) return NestedModel::Narch;
    if (d2 && no_gamma) return NestedModel::GarchVariance;
    if (d1 && no_gamma) return NestedModel::GarchStdDev;
    if (d1) return NestedModel::Tarch;
    if (d2) return NestedModel::Gjr;
    return NestedModel::Aparch;
}

AparchParams ftse100_reference_params() {
    AparchParams p;
    p.alpha0 = 0.01;
    p.alpha = {0.15};
    p.beta = {0.82};
    p.gamma = {-0.09};
    p.delta = 1.07;
    return p;
}

AparchParams long_gilt_reference_params() {
    AparchParams p;
    p.ar = {0.53};
    p.ma = {-0.57};
    p.alpha0 = 7.10e-4;
    p.alpha = {0.11};
    p.beta = {0.86};
    p.gamma = {-0.08};
    p.delta = 0.47;
    return p;
}

AparchParams short_sterling_reference_params() {
    AparchParams p;
    p.ar = {0.27};
    p.ma = {-0.43};
    p.alpha0 = 9.0e-7;
    p.alpha = {0.15};
    p.beta = {0.62};
    p.gamma = {-0.09};
    p.delta = 1.17;
    return p;
}

} // namespace hfvol::aparch
