#include "hfvol/longmem.hpp"

#include "hfvol/error.hpp"
#include "hfvol/series_io.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <mutex>
#include <numeric>
#include <ostream>

namespace hfvol::longmem {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t fft_size(std::size_t min_size) {
    // Smallest 2^a 3^b 5^c >= min_size.
    std::size_t best = 1;
    while (best < min_size) best *= 2;
    for (std::size_t p3 = 1; p3 < best; p3 *= 3)
        for (std::size_t p35 = p3; p35 < best; p35 *= 5) {
            std::size_t v = p35;
            while (v < min_size) v *= 2;
            best = std::min(best, v);
        }
    return best;
}

std::vector<double> autocovariance_direct(const std::vector<double>& y, std::size_t max_lag) {
    const std::size_t n = y.size();
    std::vector<double> c(max_lag + 1, 0.0);
    for (std::size_t j = 0; j <= max_lag; ++j) {
        double s = 0.0;
        for (std::size_t t = j; t < n; ++t) s += y[t] * y[t - j];
        c[j] = s;
    }
    return c;
}

std::vector<double> autocovariance_fft(const std::vector<double>& y, std::size_t max_lag) {
    const std::size_t n = y.size();
    const std::size_t m = fft_size(n + max_lag + 1);
    const std::size_t bins = m / 2 + 1;

    double* buf = fftw_alloc_real(m);
    fftw_complex* spec = fftw_alloc_complex(bins);
    fftw_plan forward, backward;
    {
        std::lock_guard lock(fftw_planner_mutex());
        forward = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf, spec, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec, buf, FFTW_ESTIMATE);
    }
    std::copy(y.begin(), y.end(), buf);
    std::fill(buf + n, buf + m, 0.0);
    fftw_execute(forward);
    for (std::size_t i = 0; i < bins; ++i) {
        spec[i][0] = spec[i][0] * spec[i][0] + spec[i][1] * spec[i][1];
        spec[i][1] = 0.0;
    }
    fftw_execute(backward);
    std::vector<double> c(buf, buf + max_lag + 1);
    for (auto& v : c) v /= static_cast<double>(m);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    fftw_free(spec);
    fftw_free(buf);
    return c;
}

} // namespace

std::size_t default_max_lag(std::size_t n) { return std::max<std::size_t>(1, n / 10); }

double significance_band(std::size_t n, double multiplier) {
    return multiplier / std::sqrt(static_cast<double>(n));
}

std::string format_band(double band) {
    const double rounded = std::floor(band * 1000.0 + 0.5) / 1000.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", rounded);
    return buf;
}

AcfResult acf(std::span<const double> x, std::size_t max_lag, AcfMethod method) {
    const std::size_t n = x.size();
    if (max_lag == 0) throw DataError("acf: max_lag must be positive");
    if (max_lag >= n)
        throw DataError("acf: max_lag " + std::to_string(max_lag) + " must be below n = " +
                        std::to_string(n));
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    std::vector<double> y(n);
    std::transform(x.begin(), x.end(), y.begin(), [mean](double v) { return v - mean; });
    const double ss = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
    if (!(ss > 0.0) || !std::isfinite(ss)) throw DataError("acf: zero variance (degenerate series)");

    if (method == AcfMethod::Auto)
        method = static_cast<double>(n) * static_cast<double>(max_lag) < 2.0e5 ? AcfMethod::Direct
                                                                              : AcfMethod::Fft;
    auto c = method == AcfMethod::Direct ? autocovariance_direct(y, max_lag)
                                         : autocovariance_fft(y, max_lag);
    AcfResult out;
    out.n = n;
    out.band = significance_band(n);
    out.rho.resize(max_lag);
    for (std::size_t j = 1; j <= max_lag; ++j)
        out.rho[j - 1] = std::clamp(c[j] / ss, -1.0, 1.0);
    return out;
}

SignificanceCounts count_significant(std::span<const double> rho, double band) {
    SignificanceCounts c;
    c.max_lag = rho.size();
    for (double r : rho) {
        if (r > band) ++c.n_positive;
        else if (r < -band) ++c.n_negative;
    }
    return c;
}

SignificanceCounts count_significant(const AcfResult& acf) {
    return count_significant(acf.rho, acf.band);
}

std::vector<double> default_power_ks() { return {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}; }

SweepTable power_sweep(std::span<const double> returns, std::span<const double> ks,
                       std::size_t max_lag, unsigned workers) {
    for (double k : ks)
        if (!(k > 0.0)) throw ConfigError("power_sweep: every k must be positive");

    SweepTable table;
    table.ks.assign(ks.begin(), ks.end());
    table.max_lag = max_lag;
    table.n = returns.size();
    table.band = significance_band(returns.size());
    table.squared.resize(ks.size());
    table.absolute.resize(ks.size());
    table.squared_lag1.resize(ks.size());
    table.absolute_lag1.resize(ks.size());

    struct Cell {
        PowerMode mode;
        std::size_t index;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        cells.push_back({PowerMode::Squared, i});
        cells.push_back({PowerMode::Absolute, i});
    }
    auto run = [&](const Cell& cell) {
        auto transformed = power_transform(returns, PowerTransform{ks[cell.index], cell.mode});
        auto a = acf(transformed, max_lag);
        auto counts = count_significant(a);
        if (cell.mode == PowerMode::Squared) {
            table.squared[cell.index] = counts;
            table.squared_lag1[cell.index] = a.rho.front();
        } else {
            table.absolute[cell.index] = counts;
            table.absolute_lag1[cell.index] = a.rho.front();
        }
    };

    if (workers <= 1) {
        for (const auto& cell : cells) run(cell);
        return table;
    }
    std::vector<std::future<void>> pending;
    std::size_t next = 0;
    while (next < cells.size() || !pending.empty()) {
        while (next < cells.size() && pending.size() < workers)
            pending.push_back(std::async(std::launch::async, run, cells[next++]));
        pending.front().get();
        pending.erase(pending.begin());
    }
    return table;
}

void write_sweep_csv(std::ostream& out, std::span<const NamedSweep> sweeps) {
    out << "series,mode";
    if (!sweeps.empty())
        for (double k : sweeps.front().table.ks) out << ",k=" << format_double(k);
    out << '\n';
    for (auto mode : {PowerMode::Squared, PowerMode::Absolute}) {
        for (const auto& s : sweeps) {
            out << s.series << ',' << to_string(mode);
            for (const auto& c : s.table.row(mode)) out << ',' << c.n_positive << '/' << c.n_negative;
            out << '\n';
        }
    }
}

HyperbolicFit estimate_d(const AcfResult& acf, std::size_t j_min, std::size_t j_max) {
    if (j_min < 1 || j_max < j_min || j_max > acf.max_lag())
        throw DataError("estimate_d: lag range [" + std::to_string(j_min) + ", " +
                        std::to_string(j_max) + "] outside the ACF");
    std::vector<double> lx, ly;
    for (std::size_t j = j_min; j <= j_max; ++j) {
        const double r = acf.at(j);
        if (r > 0.0) {
            lx.push_back(std::log(static_cast<double>(j)));
            ly.push_back(std::log(r));
        }
    }
    if (lx.size() < 10)
        throw DataError("estimate_d: only " + std::to_string(lx.size()) +
                        " positive autocorrelations in range, need 10");

    const double m = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double dx = lx[i] - mx, dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    HyperbolicFit fit;
    fit.C = std::exp(intercept);
    fit.d = (slope + 1.0) / 2.0;
    fit.j_min = j_min;
    fit.j_max = j_max;
    fit.lags_used = lx.size();
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

PeriodicityProfile periodicity_profile(const AcfResult& acf, int intervals_per_day, int days) {
    if (intervals_per_day <= 0 || days <= 0)
        throw ConfigError("periodicity_profile: intervals_per_day and days must be positive");
    const auto length = static_cast<std::size_t>(intervals_per_day) * static_cast<std::size_t>(days);
    if (acf.max_lag() < length)
        throw DataError("periodicity_profile: need " + std::to_string(length) + " lags, have " +
                        std::to_string(acf.max_lag()));
    PeriodicityProfile p;
    p.rho.assign(acf.rho.begin(), acf.rho.begin() + static_cast<std::ptrdiff_t>(length));
    p.intervals_per_day = intervals_per_day;
    p.days = days;
    p.band = acf.band;
    for (int d = 1; d <= days; ++d) p.day_ends.push_back(static_cast<std::size_t>(d * intervals_per_day));
    return p;
}

void write_profile_csv(std::ostream& out, const PeriodicityProfile& profile) {
    out << "lag,rho,band,day_end\n";
    const auto per_day = static_cast<std::size_t>(profile.intervals_per_day);
    for (std::size_t j = 1; j <= profile.rho.size(); ++j)
        out << j << ',' << format_double(profile.rho[j - 1]) << ',' << format_double(profile.band)
            << ',' << (j % per_day == 0 ? 1 : 0) << '\n';
}

void write_acf_csv(std::ostream& out, const AcfResult& acf) {
    out << "lag,rho,band\n";
    for (std::size_t j = 1; j <= acf.max_lag(); ++j)
        out << j << ',' << format_double(acf.at(j)) << ',' << format_double(acf.band) << '\n';
}

} // namespace hfvol::longmem
