#pragma once

#include <cmath>
#include <random>
#include <string>
#include <string_view>

namespace hfvol::aparch {

enum class DistFamily { Normal, StudentT, Ged };

/// Innovation law, always standardized to zero mean and unit variance.
/// shape is the degrees of freedom (> 2) for Student-t and the tail exponent (> 0)
/// for GED; it is ignored for the normal.
struct DistSpec {
    DistFamily family = DistFamily::Normal;
    double shape = 0.0;

    static DistSpec normal() { return {DistFamily::Normal, 0.0}; }
    static DistSpec student_t(double nu) { return {DistFamily::StudentT, nu}; }
    static DistSpec ged(double tail) { return {DistFamily::Ged, tail}; }

    bool has_shape() const noexcept { return family != DistFamily::Normal; }
    /// Throws ConfigError for nu <= 2 or a non-positive GED exponent.
    void validate() const;
};

const char* to_string(DistFamily family) noexcept;
/// Accepts "normal", "t"/"student_t"/"student-t", "ged".
DistFamily parse_dist_family(std::string_view text);

/// Log density of the scaled innovation sigma * z evaluated at z = eps / sigma:
/// log f(z) - log(sigma) with f the unit-variance density.
double loglik_density(double z, double sigma, const DistSpec& dist);

/// Precomputed constants so the filter pays only for the z-dependent part.
class LogDensity {
public:
    explicit LogDensity(const DistSpec& dist);
    double operator()(double z, double log_sigma) const noexcept {
        switch (family_) {
        case DistFamily::Normal: return constant_ - log_sigma - 0.5 * z * z;
        case DistFamily::StudentT: return constant_ - log_sigma - power_ * std::log1p(z * z * scale_);
        case DistFamily::Ged: return constant_ - log_sigma - 0.5 * std::pow(std::abs(z) * scale_, shape_);
        }
        return 0.0;
    }

private:
    DistFamily family_;
    double shape_ = 0.0;
    double constant_ = 0.0;
    double scale_ = 1.0;
    double power_ = 0.0;
};

/// E|z|^p for the unit-variance innovation (p < nu for Student-t).
double abs_moment(const DistSpec& dist, double p);

/// Draws one unit-variance innovation.
class InnovationSampler {
public:
    explicit InnovationSampler(const DistSpec& dist);
    double operator()(std::mt19937_64& rng);

private:
    DistSpec dist_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::student_t_distribution<double> student_{5.0};
    std::gamma_distribution<double> gamma_{1.0, 1.0};
    std::uniform_int_distribution<int> sign_{0, 1};
    double scale_ = 1.0;
};

} // namespace hfvol::aparch
