#pragma once

#include "hfvol/series.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hfvol::longmem {

/// Two-sided 5% normal quantile used for the white-noise significance band.
inline constexpr double kBandMultiplier = 1.96;

/// Autocorrelations at lags 1..max_lag (lag 0 is implicitly 1 and not stored).
struct AcfResult {
    std::vector<double> rho;  // rho[j - 1] is the lag-j autocorrelation
    double band = 0.0;        // kBandMultiplier / sqrt(n)
    std::size_t n = 0;

    std::size_t max_lag() const noexcept { return rho.size(); }
    double at(std::size_t lag) const { return rho.at(lag - 1); }
};

enum class AcfMethod { Auto, Direct, Fft };

/// Sample autocorrelation with one global mean and the full-sample sum of squares
/// as denominator. Throws DataError on zero variance or max_lag >= n.
AcfResult acf(std::span<const double> x, std::size_t max_lag, AcfMethod method = AcfMethod::Auto);
inline AcfResult acf(const ReturnSeries& s, std::size_t max_lag,
                     AcfMethod method = AcfMethod::Auto) {
    return acf(s.values, max_lag, method);
}

/// floor(n / 10), at least 1.
std::size_t default_max_lag(std::size_t n);

double significance_band(std::size_t n, double multiplier = kBandMultiplier);

/// Band rounded half-up to three decimals, e.g. "0.008".
std::string format_band(double band);

struct SignificanceCounts {
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    std::size_t max_lag = 0;

    std::size_t total() const noexcept { return n_positive + n_negative; }
    bool operator==(const SignificanceCounts&) const = default;
};

SignificanceCounts count_significant(const AcfResult& acf);
SignificanceCounts count_significant(std::span<const double> rho, double band);

/// Power-transformation ks used for the sweep table columns.
std::vector<double> default_power_ks();

struct SweepTable {
    std::vector<double> ks;
    std::vector<SignificanceCounts> squared;   // one per k
    std::vector<SignificanceCounts> absolute;  // one per k
    std::vector<double> squared_lag1;          // lag-1 autocorrelation per k
    std::vector<double> absolute_lag1;
    std::size_t max_lag = 0;
    std::size_t n = 0;
    double band = 0.0;

    const std::vector<SignificanceCounts>& row(PowerMode mode) const {
        return mode == PowerMode::Squared ? squared : absolute;
    }
};

/// Counts of significant autocorrelations of |r|^k and (r^2)^k for each k.
/// Cells are independent and evaluated concurrently when workers > 1.
SweepTable power_sweep(std::span<const double> returns, std::span<const double> ks,
                       std::size_t max_lag, unsigned workers = 1);

/// A labelled sweep, one block of rows in the tabular output.
struct NamedSweep {
    std::string series;
    SweepTable table;
};

/// Rows: series x mode; columns: k values; cells "pos/neg".
void write_sweep_csv(std::ostream& out, std::span<const NamedSweep> sweeps);

/// Fit of log rho(j) = log C + (2d - 1) log j over positive autocorrelations.
struct HyperbolicFit {
    double C = 0.0;
    double d = 0.0;
    std::size_t j_min = 0;
    std::size_t j_max = 0;
    std::size_t lags_used = 0;
    double r_squared = 0.0;
};

/// Lags with rho <= 0 are skipped. Throws DataError when fewer than 10 positive lags
/// remain in [j_min, j_max], or the range exceeds the ACF.
HyperbolicFit estimate_d(const AcfResult& acf, std::size_t j_min, std::size_t j_max);

/// Autocorrelations over one trading week, with day boundaries marked.
struct PeriodicityProfile {
    std::vector<double> rho;           // lags 1..days * intervals_per_day
    std::vector<std::size_t> day_ends; // lags that close a trading day
    int intervals_per_day = 0;
    int days = 0;
    double band = 0.0;
};

/// Throws DataError when the ACF is shorter than days * intervals_per_day.
PeriodicityProfile periodicity_profile(const AcfResult& acf, int intervals_per_day, int days = 5);

/// "lag,rho,band,day_end" rows; day_end is 1 on lags that close a trading day.
void write_profile_csv(std::ostream& out, const PeriodicityProfile& profile);

/// "lag,rho,band" for every lag of an ACF.
void write_acf_csv(std::ostream& out, const AcfResult& acf);

} // namespace hfvol::longmem
