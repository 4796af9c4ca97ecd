#pragma once

#include "hfvol/aparch.hpp"
#include "hfvol/series.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <optional>
#include <utility>
#include <string>
#include <vector>

namespace hfvol::estimate {

using aparch::AparchParams;
using aparch::DistSpec;

struct ModelOrder {
    int p = 1;
    int q = 1;
    int n_ar = 0;
    int n_ma = 0;

    bool operator==(const ModelOrder&) const = default;
};

std::string to_string(const ModelOrder& order);
/// "p,q,ar,ma"
ModelOrder parse_order(std::string_view text);

struct OptimizerConfig {
    int max_iterations = 500;
    double loglik_rel_tol = 1e-8;
    double grad_tol = 1e-5;       // on max |score| / n_used
    double gradient_step = 1e-5;  // relative central-difference step
    double hessian_step = 1e-2;   // relative step of the second differences behind robust_se
    int n_starts = 3;

    void validate() const;
};

/// Parameters held fixed during estimation (profile fits of nested models).
struct FitConstraints {
    std::optional<double> fixed_delta;
    bool fix_gamma_zero = false;
    bool fix_shape = false;  // keep DistSpec::shape at the supplied value
};

struct InformationCriteria {
    double aic_total = 0.0;
    double bic_total = 0.0;
    double aic_per_obs = 0.0;
    double bic_per_obs = 0.0;
};

/// AIC = -2 loglik + 2k, BIC = -2 loglik + k ln n; per-observation values divide by n.
InformationCriteria information_criteria(double loglik, int k_params, std::size_t n_used);

struct FitResult {
    AparchParams params;
    DistSpec dist;
    ModelOrder order;
    FitConstraints constraints;

    double loglik = 0.0;
    std::size_t n_used = 0;
    int k_params = 0;  // free parameters, distribution shape included
    double aic_total = 0.0;
    double bic_total = 0.0;
    double aic_per_obs = 0.0;
    double bic_per_obs = 0.0;

    // One entry per reported parameter in the order of parameter_names(); fixed
    // parameters carry NaN standard errors.
    std::vector<std::string> names;
    std::vector<double> estimates;
    std::vector<double> se_robust;
    std::vector<double> se_opg;
    std::vector<double> t_stats;

    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    int best_start = -1;
    std::string message;
    std::vector<double> loglik_trace;  // best start: initial value, then one entry per accepted step

    /// Index of a named parameter ("delta", "alpha1", ...), or -1.
    int index_of(std::string_view name) const;
};

/// mu, ar1.., ma1.., alpha0, alpha1.., beta1.., gamma1.., delta, [shape]
std::vector<std::string> parameter_names(const ModelOrder& order, const DistSpec& dist);

/// Flattens parameters in parameter_names() order.
std::vector<double> flatten(const AparchParams& params, const DistSpec& dist);

/// Quasi-maximum likelihood by BHHH with backtracking line search over an unconstrained
/// reparameterization, best of config.n_starts starting points. dist.shape is the
/// starting (or, with fix_shape, the fixed) shape. Throws DataError for n < 200.
/// A run that never meets the convergence test returns converged = false.
FitResult fit(const ReturnSeries& returns, const ModelOrder& order, const DistSpec& dist,
              const OptimizerConfig& config = {}, const FitConstraints& constraints = {});

/// Length of the unconstrained vector fit() searches over.
int unconstrained_size(const ModelOrder& order, const DistSpec& dist, const FitConstraints& constraints = {});

/// The reparameterization behind fit(): alpha0 = exp(a), (alpha, beta) by a softmax onto
/// the open simplex, gamma = tanh(g), delta = exp(d), t shape = 2 + exp(v), GED shape =
/// exp(v). Parameters come out in the units of the data divided by its standard deviation.
std::pair<AparchParams, DistSpec> from_unconstrained(const ModelOrder& order, const DistSpec& dist,
                                                     std::span<const double> theta,
                                                     const FitConstraints& constraints = {});

struct StandardErrors {
    std::vector<double> robust;  // sandwich H^-1 OPG H^-1
    std::vector<double> opg;     // OPG^-1
};

/// Bollerslev-Wooldridge standard errors at the fitted parameters, mapped to the
/// reported parameters by the delta method. Throws NumericError naming the parameter
/// that dominates a singular Hessian direction.
StandardErrors robust_se(const ReturnSeries& returns, const FitResult& fit,
                         const OptimizerConfig& config = {});

/// Per-observation log-likelihood of a generic model at theta; false outside its domain.
using PerObservationLoglik = std::function<bool(std::span<const double> theta, std::vector<double>& per_obs)>;

struct SandwichCovariance {
    std::vector<std::vector<double>> robust;  // H^-1 OPG H^-1
    std::vector<std::vector<double>> opg;     // OPG^-1
};

/// The numerical machinery behind robust_se applied to an arbitrary likelihood:
/// central-difference scores with relative gradient_step and a four-point Hessian with
/// relative hessian_step.
SandwichCovariance sandwich_covariance(const PerObservationLoglik& per_obs, std::span<const double> theta,
                                       double gradient_step, double hessian_step);

/// Ranked by BIC (AIC breaks ties, then grid order); non-converged fits rank last.
/// Throws Error when every fit fails.
std::vector<FitResult> model_search(const ReturnSeries& returns, const std::vector<ModelOrder>& orders,
                                    const std::vector<DistSpec>& dists,
                                    const OptimizerConfig& config = {}, unsigned workers = 0);

/// eps_t / sigma_t at the fitted parameters for every observation after the
/// initialization window, with the original timestamps.
ReturnSeries standardized_residuals(const ReturnSeries& returns, const FitResult& fit);

struct DeltaTests {
    double t_vs_1 = 0.0;
    double t_vs_2 = 0.0;
};

DeltaTests delta_power_tests(double delta, double se);
/// Uses the robust standard error of delta; throws Error when it is unavailable.
DeltaTests delta_power_tests(const FitResult& fit);

/// Significance stars for a two-sided normal test: 10%, 5%, 1%.
std::string significance_stars(double t_stat);

/// Parameter/estimate/(t-stat) table with likelihood and criteria rows. The delta row
/// reports the t-statistic against 1.
std::string format_report(const FitResult& fit, const std::string& title = "APARCH fit");

} // namespace hfvol::estimate
