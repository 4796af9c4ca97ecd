#include "hfvol/estimator.hpp"

#include "hfvol/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace hfvol::estimate {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMinObservations = 200;

// Slots of the unconstrained vector; -1 marks a parameter held fixed.
struct Layout {
    int mu = 0;
    int ar = 1;
    int ma = 0;
    int alpha0 = 0;
    int simplex = 0;  // p alphas followed by q betas
    int gamma = -1;
    int delta = -1;
    int shape = -1;
    int size = 0;
};

Layout make_layout(const ModelOrder& order, const DistSpec& dist, const FitConstraints& c) {
    Layout l;
    int k = 0;
    l.mu = k++;
    l.ar = k;
    k += order.n_ar;
    l.ma = k;
    k += order.n_ma;
    l.alpha0 = k++;
    l.simplex = k;
    k += order.p + order.q;
    if (!c.fix_gamma_zero && order.p > 0) {
        l.gamma = k;
        k += order.p;
    }
    if (!c.fixed_delta) l.delta = k++;
    if (dist.has_shape() && !c.fix_shape) l.shape = k++;
    l.size = k;
    return l;
}

// Per-observation central-difference scores, one column per parameter. Falls back to
// a one-sided difference when one side leaves the valid region.
template <class PerObs>
bool numeric_scores(const PerObs& per_obs_fn, const VectorXd& theta, const std::vector<double>& base,
                    double rel_step, MatrixXd& out) {
    const auto n = static_cast<Eigen::Index>(base.size());
    const auto k = theta.size();
    out.resize(n, k);
    std::vector<double> plus, minus;
    for (Eigen::Index j = 0; j < k; ++j) {
        const double h = rel_step * std::max(1.0, std::abs(theta[j]));
        VectorXd tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        const bool okp = per_obs_fn(tp, plus) && plus.size() == base.size();
        const bool okm = per_obs_fn(tm, minus) && minus.size() == base.size();
        for (Eigen::Index t = 0; t < n; ++t) {
            const auto i = static_cast<std::size_t>(t);
            if (okp && okm) out(t, j) = (plus[i] - minus[i]) / (2.0 * h);
            else if (okp) out(t, j) = (plus[i] - base[i]) / h;
            else if (okm) out(t, j) = (base[i] - minus[i]) / h;
            else return false;
        }
    }
    return true;
}

template <class Total>
MatrixXd numeric_hessian(const Total& f, const VectorXd& theta, double rel_step) {
    const auto k = theta.size();
    MatrixXd h(k, k);
    VectorXd step(k);
    for (Eigen::Index i = 0; i < k; ++i) step[i] = rel_step * std::max(1.0, std::abs(theta[i]));
    const double f0 = f(theta);
    for (Eigen::Index i = 0; i < k; ++i) {
        VectorXd tp = theta, tm = theta;
        tp[i] += 2.0 * step[i];
        tm[i] -= 2.0 * step[i];
        h(i, i) = (f(tp) - 2.0 * f0 + f(tm)) / (4.0 * step[i] * step[i]);
        for (Eigen::Index j = 0; j < i; ++j) {
            VectorXd pp = theta, pm = theta, mp = theta, mm = theta;
            pp[i] += step[i]; pp[j] += step[j];
            pm[i] += step[i]; pm[j] -= step[j];
            mp[i] -= step[i]; mp[j] += step[j];
            mm[i] -= step[i]; mm[j] -= step[j];
            h(i, j) = h(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * step[i] * step[j]);
        }
    }
    return h;
}

struct CovariancePair {
    MatrixXd robust;
    MatrixXd opg;
    Eigen::Index singular = -1;  // dominant coordinate of a non-positive curvature direction
};

CovariancePair sandwich(const MatrixXd& info, const MatrixXd& opg) {
    CovariancePair out;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (info + info.transpose()));
    const VectorXd values = eig.eigenvalues();
    if (!(values[0] > 1e-10 * std::max(1.0, values[values.size() - 1]))) {
        eig.eigenvectors().col(0).cwiseAbs().maxCoeff(&out.singular);
        return out;
    }
    const MatrixXd info_inv = eig.eigenvectors() * values.cwiseInverse().asDiagonal() *
                              eig.eigenvectors().transpose();
    out.robust = info_inv * opg * info_inv;
    out.opg = opg.ldlt().solve(MatrixXd::Identity(opg.rows(), opg.cols()));
    return out;
}

AparchParams map_params(const ModelOrder& order, const FitConstraints& constraints, const Layout& l,
                        const double* theta) {
    AparchParams p;
    p.mu = theta[l.mu];
    for (int i = 0; i < order.n_ar; ++i) p.ar.push_back(theta[l.ar + i]);
    for (int i = 0; i < order.n_ma; ++i) p.ma.push_back(theta[l.ma + i]);
    p.alpha0 = std::exp(theta[l.alpha0]);

    // Softmax with an implicit zero logit for the slack 1 - sum(alpha) - sum(beta).
    const int m = order.p + order.q;
    double top = 0.0;
    for (int i = 0; i < m; ++i) top = std::max(top, theta[l.simplex + i]);
    double denom = std::exp(-top);
    std::vector<double> e(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        e[static_cast<std::size_t>(i)] = std::exp(theta[l.simplex + i] - top);
        denom += e[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < order.p; ++i) p.alpha.push_back(e[static_cast<std::size_t>(i)] / denom);
    for (int j = 0; j < order.q; ++j) p.beta.push_back(e[static_cast<std::size_t>(order.p + j)] / denom);

    for (int i = 0; i < order.p; ++i) p.gamma.push_back(l.gamma >= 0 ? std::tanh(theta[l.gamma + i]) : 0.0);
    p.delta = l.delta >= 0 ? std::exp(theta[l.delta]) : *constraints.fixed_delta;
    return p;
}

DistSpec map_dist(const DistSpec& dist, const Layout& l, const double* theta) {
    DistSpec d = dist;
    if (l.shape >= 0) {
        const double v = std::exp(theta[l.shape]);
        d.shape = d.family == aparch::DistFamily::StudentT ? 2.0 + v : v;
    }
    return d;
}

double sample_stddev(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

// Log-likelihood of the APARCH model on returns divided by their standard deviation.
// The scaling is exact: mu and alpha0^(1/delta) carry the scale, everything else is
// scale free, and the log-likelihood shifts by n_used * ln(scale).
class Problem {
public:
    Problem(std::span<const double> returns, const ModelOrder& order, const DistSpec& dist,
            const FitConstraints& constraints)
        : order_(order), dist_(dist), constraints_(constraints),
          layout_(make_layout(order, dist, constraints)) {
        scale_ = sample_stddev(returns);
        if (!(scale_ > 0.0) || !std::isfinite(scale_))
            throw DataError("fit: returns have zero variance");
        data_.resize(returns.size());
        std::transform(returns.begin(), returns.end(), data_.begin(),
                       [this](double r) { return r / scale_; });
        const double mean =
            std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
        log_abs_dev_.resize(data_.size());
        std::transform(data_.begin(), data_.end(), log_abs_dev_.begin(),
                       [mean](double r) { return std::log(std::abs(r - mean)); });
        window_ = static_cast<std::size_t>(std::max({order.p, order.q, order.n_ar, order.n_ma}));
    }

    const Layout& layout() const noexcept { return layout_; }
    int size() const noexcept { return layout_.size; }
    std::size_t n_used() const noexcept { return data_.size() - window_; }
    double scale() const noexcept { return scale_; }
    const std::vector<double>& data() const noexcept { return data_; }
    double loglik_offset() const noexcept {
        return -static_cast<double>(n_used()) * std::log(scale_);
    }

    // Parameters in scaled units.
    AparchParams scaled_params(const VectorXd& theta) const {
        return map_params(order_, constraints_, layout_, theta.data());
    }

    DistSpec dist_at(const VectorXd& theta) const { return map_dist(dist_, layout_, theta.data()); }

    VectorXd theta_from(const AparchParams& scaled, const DistSpec& dist) const {
        const auto& l = layout_;
        VectorXd theta(l.size);
        theta[l.mu] = scaled.mu;
        for (int i = 0; i < order_.n_ar; ++i) theta[l.ar + i] = scaled.ar[static_cast<std::size_t>(i)];
        for (int i = 0; i < order_.n_ma; ++i) theta[l.ma + i] = scaled.ma[static_cast<std::size_t>(i)];
        theta[l.alpha0] = std::log(scaled.alpha0);

        std::vector<double> w;
        for (double a : scaled.alpha) w.push_back(std::max(a, 1e-6));
        for (double b : scaled.beta) w.push_back(std::max(b, 1e-6));
        double total = std::accumulate(w.begin(), w.end(), 0.0);
        if (total > 1.0 - 1e-6) {
            const double shrink = (1.0 - 1e-6) / total;
            for (auto& v : w) v *= shrink;
            total = 1.0 - 1e-6;
        }
        for (std::size_t i = 0; i < w.size(); ++i)
            theta[l.simplex + static_cast<int>(i)] = std::log(w[i]) - std::log(1.0 - total);

        if (l.gamma >= 0)
            for (int i = 0; i < order_.p; ++i)
                theta[l.gamma + i] =
                    std::atanh(std::clamp(scaled.gamma[static_cast<std::size_t>(i)], -0.999, 0.999));
        if (l.delta >= 0) theta[l.delta] = std::log(scaled.delta);
        if (l.shape >= 0) {
            const double v = dist.family == aparch::DistFamily::StudentT ? dist.shape - 2.0 : dist.shape;
            theta[l.shape] = std::log(std::max(v, 1e-3));
        }
        return theta;
    }

    AparchParams original_params(const VectorXd& theta) const {
        auto p = scaled_params(theta);
        p.mu *= scale_;
        p.alpha0 *= std::pow(scale_, p.delta);
        return p;
    }

    std::vector<double> reported(const VectorXd& theta) const {
        return flatten(original_params(theta), dist_at(theta));
    }

    // Which reported entries are fixed by the constraints.
    std::vector<bool> fixed_mask() const {
        std::vector<bool> mask;
        const std::size_t before_gamma = 2 + static_cast<std::size_t>(order_.n_ar + order_.n_ma + order_.p + order_.q);
        mask.assign(before_gamma, false);
        for (int i = 0; i < order_.p; ++i) mask.push_back(layout_.gamma < 0);
        mask.push_back(layout_.delta < 0);
        if (dist_.has_shape()) mask.push_back(layout_.shape < 0);
        return mask;
    }

    bool loglik(const VectorXd& theta, double& ll, std::vector<double>* per_obs) const {
        for (int i = 0; i < theta.size(); ++i)
            if (!std::isfinite(theta[i])) return false;
        const auto params = scaled_params(theta);
        const auto dist = dist_at(theta);
        if (!(params.alpha0 > 0.0) || !(params.delta > 0.0) || !std::isfinite(params.delta)) return false;
        if (dist.family == aparch::DistFamily::StudentT && !(dist.shape > 2.0)) return false;
        if (dist.family == aparch::DistFamily::Ged && !(dist.shape > 0.0)) return false;
        const aparch::LogDensity density(dist);
        double init = 0.0;
        for (double v : log_abs_dev_) init += std::exp(params.delta * v);
        init /= static_cast<double>(log_abs_dev_.size());
        if (!(init > 0.0) || !std::isfinite(init)) return false;
        return aparch::detail::filter_loglik(data_, params, density, init, window_, per_obs, ll);
    }

    double loglik(const VectorXd& theta) const {
        double ll = 0.0;
        return loglik(theta, ll, nullptr) ? ll : -std::numeric_limits<double>::infinity();
    }

    bool scores(const VectorXd& theta, const std::vector<double>& base, double rel_step,
                MatrixXd& out) const {
        auto per_obs = [this](const VectorXd& t, std::vector<double>& po) {
            double ll = 0.0;
            return loglik(t, ll, &po);
        };
        return numeric_scores(per_obs, theta, base, rel_step, out);
    }

    MatrixXd hessian(const VectorXd& theta, double rel_step) const {
        return numeric_hessian([this](const VectorXd& t) { return loglik(t); }, theta, rel_step);
    }

    const ModelOrder& order() const noexcept { return order_; }
    const DistSpec& dist() const noexcept { return dist_; }

private:
    ModelOrder order_;
    DistSpec dist_;
    FitConstraints constraints_;
    Layout layout_;
    double scale_ = 1.0;
    std::vector<double> data_;
    std::vector<double> log_abs_dev_;
    std::size_t window_ = 0;
};

struct SearchOutcome {
    VectorXd theta;
    double loglik = -std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
    double gradient_norm = kNaN;
    std::string message;
    std::vector<double> trace;  // loglik at the start and after every accepted step
};

SearchOutcome bhhh(const Problem& problem, VectorXd theta, const OptimizerConfig& cfg) {
    SearchOutcome out;
    const double n = static_cast<double>(problem.n_used());
    std::vector<double> per_obs;
    double ll = 0.0;
    if (!problem.loglik(theta, ll, &per_obs)) {
        out.theta = theta;
        out.message = "starting point is outside the numerically valid region";
        return out;
    }

    out.trace.push_back(ll);

    MatrixXd scores;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        out.iterations = it;
        if (!problem.scores(theta, per_obs, cfg.gradient_step, scores)) {
            out.message = "score evaluation failed";
            break;
        }
        const VectorXd g = scores.colwise().sum().transpose();
        out.gradient_norm = g.cwiseAbs().maxCoeff() / n;
        if (out.gradient_norm < cfg.grad_tol) {
            out.converged = true;
            out.message = "gradient tolerance reached";
            break;
        }

        const MatrixXd opg = scores.transpose() * scores;
        Eigen::LDLT<MatrixXd> ldlt(opg);
        VectorXd direction;
        bool bhhh_ok = ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-12;
        if (bhhh_ok) {
            direction = ldlt.solve(g);
            bhhh_ok = direction.allFinite() && direction.dot(g) > 0.0;
        }
        std::vector<VectorXd> candidates;
        if (bhhh_ok) candidates.push_back(direction);
        candidates.push_back(g / n);  // steepest ascent fallback

        bool accepted = false;
        double new_ll = ll;
        VectorXd new_theta;
        for (auto d : candidates) {
            const double biggest = d.cwiseAbs().maxCoeff();
            if (biggest > 1.0) d /= biggest;
            const double slope = g.dot(d);
            double t = 1.0;
            for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
                VectorXd trial = theta + t * d;
                const double trial_ll = problem.loglik(trial);
                if (std::isfinite(trial_ll) && trial_ll >= ll + 1e-4 * t * slope) {
                    accepted = true;
                    new_ll = trial_ll;
                    new_theta = std::move(trial);
                    break;
                }
            }
            if (accepted) break;
        }
        if (!accepted) {
            out.message = "line search found no ascent";
            break;
        }
        const double rel = std::abs(new_ll - ll) / std::max(1.0, std::abs(ll));
        theta = std::move(new_theta);
        ll = new_ll;
        problem.loglik(theta, ll, &per_obs);
        out.trace.push_back(ll);
        out.iterations = it + 1;
        if (rel < cfg.loglik_rel_tol) {
            out.converged = true;
            out.message = "relative log-likelihood change below tolerance";
            break;
        }
    }
    if (!out.converged && out.message.empty()) out.message = "iteration limit reached";
    out.theta = theta;
    out.loglik = ll;
    return out;
}

// Least-squares ARMA fit (Hannan-Rissanen); returns mu, ar, ma and the residuals.
struct MeanStart {
    double mu = 0.0;
    std::vector<double> ar, ma;
    std::vector<double> residuals;
};

MeanStart arma_start(const std::vector<double>& r, int n_ar, int n_ma) {
    const auto n = static_cast<Eigen::Index>(r.size());
    MeanStart s;
    auto regress = [&](int lags_r, const std::vector<double>* e, int lags_e, Eigen::Index start) {
        const Eigen::Index rows = n - start;
        MatrixXd x(rows, 1 + lags_r + lags_e);
        VectorXd y(rows);
        for (Eigen::Index t = start; t < n; ++t) {
            const Eigen::Index row = t - start;
            y[row] = r[static_cast<std::size_t>(t)];
            x(row, 0) = 1.0;
            for (int i = 0; i < lags_r; ++i) x(row, 1 + i) = r[static_cast<std::size_t>(t - 1 - i)];
            for (int j = 0; j < lags_e; ++j)
                x(row, 1 + lags_r + j) = (*e)[static_cast<std::size_t>(t - 1 - j)];
        }
        return VectorXd(x.colPivHouseholderQr().solve(y));
    };

    if (n_ar == 0 && n_ma == 0) {
        s.mu = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(n);
    } else {
        std::vector<double> e(r.size(), 0.0);
        if (n_ma > 0) {
            const int long_order = std::min<int>(10 + n_ar + n_ma, static_cast<int>(n / 20));
            const VectorXd b = regress(long_order, nullptr, 0, long_order);
            for (Eigen::Index t = long_order; t < n; ++t) {
                double fitted = b[0];
                for (int i = 0; i < long_order; ++i) fitted += b[1 + i] * r[static_cast<std::size_t>(t - 1 - i)];
                e[static_cast<std::size_t>(t)] = r[static_cast<std::size_t>(t)] - fitted;
            }
        }
        const int start = std::max(n_ar, n_ma) + (n_ma > 0 ? 10 + n_ar + n_ma : 0);
        const VectorXd b = regress(n_ar, &e, n_ma, start);
        s.mu = b[0];
        for (int i = 0; i < n_ar; ++i) s.ar.push_back(std::clamp(b[1 + i], -0.95, 0.95));
        for (int j = 0; j < n_ma; ++j) s.ma.push_back(std::clamp(b[1 + n_ar + j], -0.95, 0.95));
    }

    s.residuals.resize(r.size());
    for (std::size_t t = 0; t < r.size(); ++t) {
        double e = r[t] - s.mu;
        for (std::size_t i = 0; i < s.ar.size() && i < t; ++i) e -= s.ar[i] * r[t - 1 - i];
        for (std::size_t j = 0; j < s.ma.size() && j < t; ++j) e -= s.ma[j] * s.residuals[t - 1 - j];
        s.residuals[t] = e;
    }
    return s;
}

struct VolStart {
    double alpha, beta, gamma, delta;
};

std::vector<VolStart> starting_points(int n_starts) {
    std::vector<VolStart> presets{{0.1, 0.8, 0.0, 1.0}, {0.1, 0.8, -0.1, 2.0}, {0.05, 0.9, 0.0, 1.0}};
    std::vector<VolStart> out;
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    for (int i = 0; i < n_starts; ++i) {
        auto s = presets[static_cast<std::size_t>(i) % presets.size()];
        if (i >= static_cast<int>(presets.size())) {
            s.alpha = std::clamp(s.alpha * (1.0 + jitter(rng)), 0.01, 0.3);
            s.beta = std::clamp(s.beta * (1.0 + 0.1 * jitter(rng)), 0.3, 0.98 - s.alpha);
            s.gamma = std::clamp(s.gamma + 0.2 * jitter(rng), -0.5, 0.5);
            s.delta = std::clamp(s.delta * (1.0 + jitter(rng)), 0.3, 3.0);
        }
        out.push_back(s);
    }
    return out;
}

void validate_order(const ModelOrder& order) {
    if (order.p < 0 || order.q < 0 || order.n_ar < 0 || order.n_ma < 0)
        throw ConfigError("model order entries must be non-negative");
    if (order.q > 0 && order.p == 0) throw ConfigError("a GARCH order q > 0 needs p >= 1");
}

StandardErrors standard_errors(const Problem& problem, const VectorXd& theta,
                               const std::vector<std::string>& names, const OptimizerConfig& cfg) {
    std::vector<double> per_obs;
    double ll = 0.0;
    if (!problem.loglik(theta, ll, &per_obs))
        throw NumericError("standard errors: log-likelihood not finite at the estimate");
    MatrixXd scores;
    if (!problem.scores(theta, per_obs, cfg.gradient_step, scores))
        throw NumericError("standard errors: score evaluation failed");
    const MatrixXd opg = scores.transpose() * scores;
    const MatrixXd info = -problem.hessian(theta, cfg.hessian_step);

    // Map free-parameter positions to reported names for error messages.
    const auto mask = problem.fixed_mask();
    std::vector<std::size_t> free_to_reported;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (!mask[i]) free_to_reported.push_back(i);

    const auto cov = sandwich(info, opg);
    if (cov.singular >= 0)
        throw NumericError("Hessian is singular or indefinite along '" +
                           names[free_to_reported[static_cast<std::size_t>(cov.singular)]] + "'");
    const MatrixXd& cov_robust = cov.robust;
    const MatrixXd& cov_opg = cov.opg;

    // Delta method onto the reported parameters.
    const auto base = problem.reported(theta);
    MatrixXd jac(static_cast<Eigen::Index>(base.size()), problem.size());
    for (int k = 0; k < problem.size(); ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(theta[k]));
        VectorXd tp = theta, tm = theta;
        tp[k] += h;
        tm[k] -= h;
        const auto rp = problem.reported(tp);
        const auto rm = problem.reported(tm);
        for (std::size_t i = 0; i < base.size(); ++i)
            jac(static_cast<Eigen::Index>(i), k) = (rp[i] - rm[i]) / (2.0 * h);
    }
    const MatrixXd vr = jac * cov_robust * jac.transpose();
    const MatrixXd vo = jac * cov_opg * jac.transpose();

    StandardErrors se;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        se.robust.push_back(mask[i] ? kNaN : std::sqrt(std::max(0.0, vr(ii, ii))));
        se.opg.push_back(mask[i] ? kNaN : std::sqrt(std::max(0.0, vo(ii, ii))));
    }
    return se;
}

FitResult assemble(const Problem& problem, const SearchOutcome& best, const ModelOrder& order,
                   const FitConstraints& constraints) {
    FitResult r;
    r.params = problem.original_params(best.theta);
    r.dist = problem.dist_at(best.theta);
    r.order = order;
    r.constraints = constraints;
    r.loglik = best.loglik + problem.loglik_offset();
    r.n_used = problem.n_used();
    r.k_params = problem.size();
    const auto ic = information_criteria(r.loglik, r.k_params, r.n_used);
    r.aic_total = ic.aic_total;
    r.bic_total = ic.bic_total;
    r.aic_per_obs = ic.aic_per_obs;
    r.bic_per_obs = ic.bic_per_obs;
    r.names = parameter_names(order, r.dist);
    r.estimates = flatten(r.params, r.dist);
    r.se_robust.assign(r.names.size(), kNaN);
    r.se_opg.assign(r.names.size(), kNaN);
    r.t_stats.assign(r.names.size(), kNaN);
    r.converged = best.converged;
    r.iterations = best.iterations;
    r.gradient_norm = best.gradient_norm;
    r.message = best.message;
    for (double v : best.trace) r.loglik_trace.push_back(v + problem.loglik_offset());
    return r;
}

void attach_standard_errors(FitResult& r, const StandardErrors& se) {
    r.se_robust = se.robust;
    r.se_opg = se.opg;
    for (std::size_t i = 0; i < r.names.size(); ++i)
        r.t_stats[i] = std::isfinite(se.robust[i]) && se.robust[i] > 0.0 ? r.estimates[i] / se.robust[i] : kNaN;
}

Problem problem_for(const ReturnSeries& returns, const FitResult& fit) {
    return Problem(returns.values, fit.order, fit.dist, fit.constraints);
}

VectorXd theta_for(const Problem& problem, const FitResult& fit) {
    auto scaled = fit.params;
    scaled.mu /= problem.scale();
    scaled.alpha0 /= std::pow(problem.scale(), scaled.delta);
    return problem.theta_from(scaled, fit.dist);
}

} // namespace

std::string to_string(const ModelOrder& order) {
    return std::to_string(order.p) + "," + std::to_string(order.q) + "," +
           std::to_string(order.n_ar) + "," + std::to_string(order.n_ma);
}

ModelOrder parse_order(std::string_view text) {
    int values[4] = {0, 0, 0, 0};
    int count = 0;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        if (count >= 4) throw ConfigError("order: expected p,q,ar,ma");
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        try {
            std::size_t used = 0;
            values[count] = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("order: bad integer '" + item + "'");
        }
        ++count;
    }
    if (count != 4) throw ConfigError("order: expected p,q,ar,ma");
    ModelOrder order{values[0], values[1], values[2], values[3]};
    validate_order(order);
    return order;
}

void OptimizerConfig::validate() const {
    if (max_iterations <= 0 || !(loglik_rel_tol > 0.0) || !(grad_tol > 0.0) ||
        !(gradient_step > 0.0) || !(hessian_step > 0.0) || n_starts <= 0)
        throw ConfigError("optimizer settings must be positive");
}

InformationCriteria information_criteria(double loglik, int k_params, std::size_t n_used) {
    InformationCriteria ic;
    const double k = static_cast<double>(k_params);
    ic.aic_total = -2.0 * loglik + 2.0 * k;
    ic.bic_total = -2.0 * loglik + k * std::log(static_cast<double>(n_used));
    ic.aic_per_obs = ic.aic_total / static_cast<double>(n_used);
    ic.bic_per_obs = ic.bic_total / static_cast<double>(n_used);
    return ic;
}

int FitResult::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> parameter_names(const ModelOrder& order, const DistSpec& dist) {
    std::vector<std::string> names{"mu"};
    for (int i = 1; i <= order.n_ar; ++i) names.push_back("ar" + std::to_string(i));
    for (int i = 1; i <= order.n_ma; ++i) names.push_back("ma" + std::to_string(i));
    names.push_back("alpha0");
    for (int i = 1; i <= order.p; ++i) names.push_back("alpha" + std::to_string(i));
    for (int i = 1; i <= order.q; ++i) names.push_back("beta" + std::to_string(i));
    for (int i = 1; i <= order.p; ++i) names.push_back("gamma" + std::to_string(i));
    names.push_back("delta");
    if (dist.has_shape()) names.push_back("shape");
    return names;
}

std::vector<double> flatten(const AparchParams& p, const DistSpec& dist) {
    std::vector<double> v{p.mu};
    v.insert(v.end(), p.ar.begin(), p.ar.end());
    v.insert(v.end(), p.ma.begin(), p.ma.end());
    v.push_back(p.alpha0);
    v.insert(v.end(), p.alpha.begin(), p.alpha.end());
    v.insert(v.end(), p.beta.begin(), p.beta.end());
    v.insert(v.end(), p.gamma.begin(), p.gamma.end());
    v.push_back(p.delta);
    if (dist.has_shape()) v.push_back(dist.shape);
    return v;
}

FitResult fit(const ReturnSeries& returns, const ModelOrder& order, const DistSpec& dist,
              const OptimizerConfig& config, const FitConstraints& constraints) {
    if (returns.size() < kMinObservations)
        throw DataError("fit: " + std::to_string(returns.size()) +
                        " observations is too small a sample (need at least 200)");
    validate_order(order);
    config.validate();
    dist.validate();
    if (constraints.fixed_delta && !(*constraints.fixed_delta > 0.0))
        throw ConfigError("fit: fixed delta must be positive");

    const Problem problem(returns.values, order, dist, constraints);
    const auto mean_start = arma_start(problem.data(), order.n_ar, order.n_ma);

    SearchOutcome best;
    int best_index = -1;
    const auto starts = starting_points(config.n_starts);
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const auto& vs = starts[s];
        AparchParams start;
        start.mu = mean_start.mu;
        start.ar = mean_start.ar;
        start.ma = mean_start.ma;
        start.delta = constraints.fixed_delta.value_or(vs.delta);
        for (int i = 0; i < order.p; ++i) {
            start.alpha.push_back(vs.alpha / order.p);
            start.gamma.push_back(constraints.fix_gamma_zero ? 0.0 : vs.gamma);
        }
        for (int j = 0; j < order.q; ++j) start.beta.push_back(vs.beta / order.q);
        double level = 0.0;
        for (double e : mean_start.residuals) level += std::pow(std::abs(e), start.delta);
        level /= static_cast<double>(mean_start.residuals.size());
        start.alpha0 = std::max(1e-8, (1.0 - start.persistence()) * level);

        DistSpec start_dist = dist;
        if (dist.family == aparch::DistFamily::StudentT && !constraints.fix_shape && !(dist.shape > 2.0))
            start_dist.shape = 8.0;
        if (dist.family == aparch::DistFamily::Ged && !constraints.fix_shape && !(dist.shape > 0.0))
            start_dist.shape = 1.5;

        auto outcome = bhhh(problem, problem.theta_from(start, start_dist), config);
        const bool better = best_index < 0 || (outcome.converged && !best.converged) ||
                            (outcome.converged == best.converged && outcome.loglik > best.loglik);
        if (better) {
            best = std::move(outcome);
            best_index = static_cast<int>(s);
        }
    }

    auto result = assemble(problem, best, order, constraints);
    result.best_start = best_index;
    if (std::isfinite(best.loglik)) {
        try {
            attach_standard_errors(result, standard_errors(problem, best.theta, result.names, config));
        } catch (const NumericError& e) {
            result.message += "; standard errors unavailable: ";
            result.message += e.what();
        }
    }
    return result;
}

int unconstrained_size(const ModelOrder& order, const DistSpec& dist, const FitConstraints& constraints) {
    validate_order(order);
    return make_layout(order, dist, constraints).size;
}

std::pair<AparchParams, DistSpec> from_unconstrained(const ModelOrder& order, const DistSpec& dist,
                                                     std::span<const double> theta,
                                                     const FitConstraints& constraints) {
    validate_order(order);
    const auto layout = make_layout(order, dist, constraints);
    if (theta.size() != static_cast<std::size_t>(layout.size))
        throw ConfigError("unconstrained vector has " + std::to_string(theta.size()) + " entries, expected " +
                          std::to_string(layout.size));
    return {map_params(order, constraints, layout, theta.data()), map_dist(dist, layout, theta.data())};
}

SandwichCovariance sandwich_covariance(const PerObservationLoglik& per_obs, std::span<const double> theta,
                                       double gradient_step, double hessian_step) {
    const VectorXd x = Eigen::Map<const VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    auto call = [&](const VectorXd& t, std::vector<double>& out) {
        return per_obs(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())), out);
    };
    std::vector<double> base;
    if (!call(x, base)) throw NumericError("sandwich: log-likelihood undefined at theta");
    MatrixXd scores;
    if (!numeric_scores(call, x, base, gradient_step, scores))
        throw NumericError("sandwich: score evaluation failed");
    auto total = [&](const VectorXd& t) {
        std::vector<double> po;
        if (!call(t, po)) return -std::numeric_limits<double>::infinity();
        return std::accumulate(po.begin(), po.end(), 0.0);
    };
    const auto cov = sandwich(-numeric_hessian(total, x, hessian_step), scores.transpose() * scores);
    if (cov.singular >= 0)
        throw NumericError("sandwich: Hessian singular along coordinate " + std::to_string(cov.singular));
    SandwichCovariance out;
    const auto k = cov.robust.rows();
    out.robust.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k)));
    out.opg = out.robust;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            out.robust[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cov.robust(i, j);
            out.opg[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cov.opg(i, j);
        }
    return out;
}

StandardErrors robust_se(const ReturnSeries& returns, const FitResult& fit, const OptimizerConfig& config) {
    const auto problem = problem_for(returns, fit);
    return standard_errors(problem, theta_for(problem, fit), fit.names, config);
}

std::vector<FitResult> model_search(const ReturnSeries& returns, const std::vector<ModelOrder>& orders,
                                    const std::vector<DistSpec>& dists, const OptimizerConfig& config,
                                    unsigned workers) {
    if (orders.empty() || dists.empty()) throw ConfigError("model_search: empty grid");
    struct Task {
        ModelOrder order;
        DistSpec dist;
    };
    std::vector<Task> tasks;
    for (const auto& d : dists)
        for (const auto& o : orders) tasks.push_back({o, d});

    std::vector<FitResult> results(tasks.size());
    std::vector<std::string> errors(tasks.size());
    auto run = [&](std::size_t i) {
        try {
            results[i] = fit(returns, tasks[i].order, tasks[i].dist, config);
        } catch (const std::exception& e) {
            errors[i] = e.what();
            results[i].order = tasks[i].order;
            results[i].dist = tasks[i].dist;
            results[i].loglik = -std::numeric_limits<double>::infinity();
            results[i].aic_total = results[i].bic_total = std::numeric_limits<double>::infinity();
            results[i].message = "fit failed: " + errors[i];
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run(i);
    } else {
        std::vector<std::future<void>> pending;
        std::size_t next = 0;
        while (next < tasks.size() || !pending.empty()) {
            while (next < tasks.size() && pending.size() < workers)
                pending.push_back(std::async(std::launch::async, run, next++));
            pending.front().get();
            pending.erase(pending.begin());
        }
    }

    if (std::all_of(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); })) {
        std::string what = "model_search: every fit failed";
        for (std::size_t i = 0; i < tasks.size(); ++i)
            what += "\n  " + to_string(tasks[i].order) + " " + aparch::to_string(tasks[i].dist.family) +
                    ": " + errors[i];
        throw Error(what);
    }

    std::vector<std::size_t> rank(tasks.size());
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = results[a];
        const auto& y = results[b];
        if (x.converged != y.converged) return x.converged;
        if (x.bic_total != y.bic_total) return x.bic_total < y.bic_total;
        if (x.aic_total != y.aic_total) return x.aic_total < y.aic_total;
        return a < b;
    });
    std::vector<FitResult> ranked;
    ranked.reserve(rank.size());
    for (auto i : rank) ranked.push_back(std::move(results[i]));
    return ranked;
}

ReturnSeries standardized_residuals(const ReturnSeries& returns, const FitResult& fit) {
    const auto out = aparch::filter(returns, fit.params, fit.dist);
    ReturnSeries z;
    z.intervals_per_day = returns.intervals_per_day;
    for (std::size_t t = out.first_obs; t < returns.size(); ++t) {
        z.values.push_back(out.residuals[t] / out.sigma[t]);
        z.timestamps.push_back(returns.timestamps[t]);
    }
    return z;
}

DeltaTests delta_power_tests(double delta, double se) {
    return {(delta - 1.0) / se, (delta - 2.0) / se};
}

DeltaTests delta_power_tests(const FitResult& fit) {
    const int i = fit.index_of("delta");
    if (i < 0 || !std::isfinite(fit.se_robust[static_cast<std::size_t>(i)]))
        throw Error("delta_power_tests: no standard error for delta");
    return delta_power_tests(fit.params.delta, fit.se_robust[static_cast<std::size_t>(i)]);
}

std::string significance_stars(double t) {
    const double a = std::abs(t);
    if (!std::isfinite(a)) return "";
    if (a >= 2.5758293035489) return "***";
    if (a >= 1.9599639845401) return "**";
    if (a >= 1.6448536269515) return "*";
    return "";
}

std::string format_report(const FitResult& fit, const std::string& title) {
    std::ostringstream out;
    char line[160];
    out << title << '\n';
    out << "order (p,q,ar,ma) = " << to_string(fit.order) << ", distribution = "
        << aparch::to_string(fit.dist.family) << '\n';
    out << std::string(48, '-') << '\n';
    std::snprintf(line, sizeof line, "%-10s %16s %20s\n", "parameter", "estimate", "(t-stat)");
    out << line;
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        double t = fit.t_stats[i];
        if (fit.names[i] == "delta" && std::isfinite(fit.se_robust[i]) && fit.se_robust[i] > 0.0)
            t = (fit.estimates[i] - 1.0) / fit.se_robust[i];
        char tbuf[48];
        if (std::isfinite(t)) std::snprintf(tbuf, sizeof tbuf, "(%.2f)%s", t, significance_stars(t).c_str());
        else std::snprintf(tbuf, sizeof tbuf, "%s", fit.se_robust[i] != fit.se_robust[i] ? "(fixed/na)" : "");
        std::snprintf(line, sizeof line, "%-10s %16.6g %20s\n", fit.names[i].c_str(), fit.estimates[i], tbuf);
        out << line;
    }
    out << std::string(48, '-') << '\n';
    std::snprintf(line, sizeof line, "%-10s %16.6f\n", "Likelihood", fit.loglik);
    out << line;
    std::snprintf(line, sizeof line, "%-10s %16.6f %20.6f\n", "AIC", fit.aic_total, fit.aic_per_obs);
    out << line;
    std::snprintf(line, sizeof line, "%-10s %16.6f %20.6f\n", "BIC", fit.bic_total, fit.bic_per_obs);
    out << line;
    out << "n_used = " << fit.n_used << ", k = " << fit.k_params << ", converged = "
        << (fit.converged ? "yes" : "no") << ", iterations = " << fit.iterations << '\n';
    out << "half-life = " << aparch::half_life(std::max(fit.params.persistence(), 1e-12))
        << " intervals, nested model = " << aparch::to_string(aparch::classify_nested(fit.params)) << '\n';
    out << "t-statistics use Bollerslev-Wooldridge standard errors; delta is tested against 1.\n";
    if (!fit.message.empty()) out << "note: " << fit.message << '\n';
    return out.str();
}

} // namespace hfvol::estimate
