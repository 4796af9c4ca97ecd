#include "hfvol/distributions.hpp"

#include "hfvol/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

namespace hfvol::aparch {

namespace {

// GED scale that gives unit variance: lambda^2 = 2^(-2/s) Gamma(1/s) / Gamma(3/s).
double ged_lambda(double s) {
    return std::sqrt(std::exp(-2.0 / s * std::numbers::ln2 + std::lgamma(1.0 / s) - std::lgamma(3.0 / s)));
}

} // namespace

void DistSpec::validate() const {
    switch (family) {
    case DistFamily::Normal: return;
    case DistFamily::StudentT:
        if (!(shape > 2.0) || !std::isfinite(shape))
            throw ConfigError("student-t degrees of freedom must exceed 2");
        return;
    case DistFamily::Ged:
        if (!(shape > 0.0) || !std::isfinite(shape))
            throw ConfigError("GED tail exponent must be positive");
        return;
    }
}

const char* to_string(DistFamily family) noexcept {
    switch (family) {
    case DistFamily::Normal: return "normal";
    case DistFamily::StudentT: return "t";
    case DistFamily::Ged: return "ged";
    }
    return "normal";
}

DistFamily parse_dist_family(std::string_view text) {
    std::string t(text);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "normal" || t == "gaussian" || t == "norm") return DistFamily::Normal;
    if (t == "t" || t == "student_t" || t == "student-t" || t == "std") return DistFamily::StudentT;
    if (t == "ged") return DistFamily::Ged;
    throw ConfigError("unknown distribution family '" + std::string(text) + "'");
}

LogDensity::LogDensity(const DistSpec& dist) : family_(dist.family), shape_(dist.shape) {
    dist.validate();
    switch (family_) {
    case DistFamily::Normal:
        constant_ = -0.5 * std::log(2.0 * std::numbers::pi);
        break;
    case DistFamily::StudentT: {
        const double nu = shape_;
        constant_ = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(std::numbers::pi * (nu - 2.0));
        scale_ = 1.0 / (nu - 2.0);
        power_ = 0.5 * (nu + 1.0);
        break;
    }
    case DistFamily::Ged: {
        const double s = shape_;
        const double lambda = ged_lambda(s);
        constant_ = std::log(s) - (1.0 + 1.0 / s) * std::numbers::ln2 - std::lgamma(1.0 / s) -
                    std::log(lambda);
        scale_ = 1.0 / lambda;
        break;
    }
    }
}

double loglik_density(double z, double sigma, const DistSpec& dist) {
    if (!(sigma > 0.0)) throw ConfigError("loglik_density: sigma must be positive");
    return LogDensity(dist)(z, std::log(sigma));
}

double abs_moment(const DistSpec& dist, double p) {
    dist.validate();
    switch (dist.family) {
    case DistFamily::Normal:
        return std::exp(0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0))) /
               std::sqrt(std::numbers::pi);
    case DistFamily::StudentT: {
        const double nu = dist.shape;
        if (p >= nu) return std::numeric_limits<double>::infinity();
        return std::exp(0.5 * p * std::log(nu - 2.0) + std::lgamma(0.5 * (p + 1.0)) +
                        std::lgamma(0.5 * (nu - p)) - std::lgamma(0.5 * nu)) /
               std::sqrt(std::numbers::pi);
    }
    case DistFamily::Ged: {
        const double s = dist.shape;
        return std::pow(ged_lambda(s), p) *
               std::exp(p / s * std::numbers::ln2 + std::lgamma((p + 1.0) / s) - std::lgamma(1.0 / s));
    }
    }
    return 0.0;
}

InnovationSampler::InnovationSampler(const DistSpec& dist) : dist_(dist) {
    dist.validate();
    if (dist.family == DistFamily::StudentT) {
        student_ = std::student_t_distribution<double>(dist.shape);
        scale_ = std::sqrt((dist.shape - 2.0) / dist.shape);
    } else if (dist.family == DistFamily::Ged) {
        gamma_ = std::gamma_distribution<double>(1.0 / dist.shape, 1.0);
        scale_ = ged_lambda(dist.shape);
    }
}

double InnovationSampler::operator()(std::mt19937_64& rng) {
    switch (dist_.family) {
    case DistFamily::Normal: return normal_(rng);
    case DistFamily::StudentT: return scale_ * student_(rng);
    case DistFamily::Ged: {
        // |z / lambda|^s / 2 ~ Gamma(1/s, 1)
        const double magnitude = scale_ * std::pow(2.0 * gamma_(rng), 1.0 / dist_.shape);
        return sign_(rng) ? magnitude : -magnitude;
    }
    }
    return 0.0;
}

} // namespace hfvol::aparch
