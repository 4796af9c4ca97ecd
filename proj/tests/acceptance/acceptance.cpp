// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--scratch DIR] [--only N[,N...]]

#include "hfvol/aparch.hpp"
#include "hfvol/calendar.hpp"
#include "hfvol/cli.hpp"
#include "hfvol/distributions.hpp"
#include "hfvol/estimator.hpp"
#include "hfvol/ingest.hpp"
#include "hfvol/longmem.hpp"
#include "oracles/oracles.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace hfvol;
using aparch::AparchParams;
using aparch::DistSpec;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

Verdict half_life_exactness() {
    const double ftse = aparch::half_life(aparch::ftse100_reference_params());
    const double sterling = aparch::half_life(aparch::short_sterling_reference_params());
    return {std::abs(ftse - 22.76) <= 0.01 && std::abs(sterling - 2.65) <= 0.01,
            "FTSE " + fmt(ftse, 6) + ", Sterling " + fmt(sterling, 6)};
}

Verdict information_criteria() {
    const auto gilt = estimate::information_criteria(384241.0, 9, 57227);
    const auto sterling = estimate::information_criteria(221382.0, 9, 27406);
    const bool ok = std::abs(gilt.aic_total + 768463.0) <= 1.0 && std::abs(gilt.bic_total + 768383.0) <= 1.0 &&
                    std::lround(sterling.aic_total) == -442746 && std::lround(sterling.bic_total) == -442672;
    return {ok, "Gilt AIC " + fmt(gilt.aic_total, 9) + " BIC " + fmt(gilt.bic_total, 9) + "; Sterling AIC " +
                    fmt(sterling.aic_total, 9) + " BIC " + fmt(sterling.bic_total, 9)};
}

Verdict significance_bands() {
    const std::vector<std::pair<std::size_t, std::string>> cases{{55011, "0.008"}, {57227, "0.008"}, {27406, "0.012"}};
    bool ok = true;
    std::string detail;
    for (const auto& [n, want] : cases) {
        const auto got = longmem::format_band(longmem::significance_band(n));
        ok = ok && got == want;
        detail += "n=" + std::to_string(n) + " +-" + got + " ";
    }
    return {ok, detail};
}

Verdict calendar_counts() {
    const std::vector<std::pair<TradingCalendar, int>> cases{
        {ftse100_calendar(), 113}, {long_gilt_calendar(), 120}, {short_sterling_calendar(), 118}};
    const Date day{std::chrono::year{1998}, std::chrono::March, std::chrono::day{4}};
    bool ok = true;
    std::string detail;
    for (const auto& [cal, want] : cases) {
        std::vector<ingest::TickRecord> ticks;
        int i = 0;
        for (auto t = at_minutes(day, cal.session_open - 15); t <= at_minutes(day, cal.session_close + 15);
             t += std::chrono::seconds(30), ++i) {
            ingest::TickRecord r;
            r.timestamp = t;
            r.price = 100.0 + 0.01 * (i % 11);
            r.volume = 1;
            r.expiry_code = "M98";
            ticks.push_back(r);
        }
        ingest::IngestConfig cfg;
        cfg.calendar = cal;
        const auto bars = ingest::build_bars(ticks, cfg);
        const int got = ingest::bars_per_day(bars)[day];
        ok = ok && got == want && cal.intervals_per_day(5) == want;
        detail += cal.name + " " + std::to_string(got) + " ";
    }
    return {ok, detail};
}

Verdict nested_model_oracle() {
    AparchParams g;
    g.mu = 0.01;
    g.alpha0 = 0.05;
    g.alpha = {0.08};
    g.beta = {0.9};
    g.gamma = {0.0};
    g.delta = 2.0;
    const auto r = aparch::simulate(g, DistSpec::normal(), 10000, 2024).values;
    const double garch_diff =
        std::abs(aparch::filter(r, g, DistSpec::normal()).loglik - oracle::garch11_loglik(r, 0.01, 0.05, 0.08, 0.9));
    auto a = g;
    a.alpha = {0.3};
    a.beta = {0.0};
    a.alpha0 = 0.2;
    const double arch_diff =
        std::abs(aparch::filter(r, a, DistSpec::normal()).loglik - oracle::arch1_loglik(r, 0.01, 0.2, 0.3));
    return {garch_diff <= 1e-8 && arch_diff <= 1e-8,
            "|GARCH diff| " + fmt(garch_diff, 3) + ", |ARCH diff| " + fmt(arch_diff, 3)};
}

Verdict acf_oracle() {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd;
    std::vector<double> x(1000);
    double prev = 0.0;
    for (auto& v : x) v = prev = 0.4 * prev + nd(rng);
    const auto fast = longmem::acf(x, 200);
    const auto slow = oracle::naive_acf(x, 200);
    double worst = 0.0;
    for (std::size_t j = 0; j < 200; ++j) worst = std::max(worst, std::abs(fast.rho[j] - slow[j]));
    double affine = 0.0;
    for (auto [a, b] : {std::pair{3.0, 2.0}, std::pair{-7.5, -0.25}, std::pair{250.0, 4.0}}) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = a + b * x[i];
        const auto t = longmem::acf(y, 200);
        for (std::size_t j = 0; j < 200; ++j) affine = std::max(affine, std::abs(t.rho[j] - fast.rho[j]));
    }
    return {worst <= 1e-12 && affine <= 1e-12,
            "max |optimized - naive| " + fmt(worst, 3) + ", max affine deviation " + fmt(affine, 3)};
}

struct RecoveryRun {
    std::vector<ReturnSeries> samples;
    std::vector<estimate::FitResult> fits;
};

RecoveryRun run_recovery() {
    RecoveryRun out;
    const auto truth = aparch::long_gilt_reference_params();
    for (unsigned seed = 1; seed <= 20; ++seed) {
        out.samples.push_back(aparch::simulate(truth, DistSpec::normal(), 50000, seed));
        out.fits.push_back(estimate::fit(out.samples.back(), {1, 1, 1, 1}, DistSpec::normal()));
    }
    return out;
}

Verdict parameter_recovery(const RecoveryRun& run) {
    const auto truth = estimate::flatten(aparch::long_gilt_reference_params(), DistSpec::normal());
    const std::vector<std::string> checked{"alpha0", "alpha1", "beta1", "gamma1", "delta", "ar1", "ma1"};
    std::map<std::string, int> covered;
    int all_good = 0;
    for (const auto& f : run.fits) {
        bool good = f.converged;
        for (const auto& name : checked) {
            const auto i = static_cast<std::size_t>(f.index_of(name));
            const bool in = std::isfinite(f.se_robust[i]) && std::abs(f.estimates[i] - truth[i]) <= 3.0 * f.se_robust[i];
            covered[name] += in;
            good = good && in;
        }
        all_good += good;
    }
    std::string detail = std::to_string(all_good) + "/20 seeds with every parameter inside 3 robust se (";
    for (const auto& name : checked) detail += name + " " + std::to_string(covered[name]) + " ";
    detail.back() = ')';
    return {all_good >= 18, detail};
}

Verdict long_memory(const RecoveryRun& run) {
    int abs_wins = 0, d_inside = 0;
    double d_min = 1.0, d_max = -1.0;
    for (const auto& s : run.samples) {
        const auto lag = longmem::default_max_lag(s.size());
        const auto abs_acf = longmem::acf(power_transform(s.values, {1.0, PowerMode::Absolute}), lag);
        const auto sq_acf = longmem::acf(power_transform(s.values, {1.0, PowerMode::Squared}), lag);
        abs_wins += longmem::count_significant(abs_acf).n_positive > longmem::count_significant(sq_acf).n_positive;
        try {
            const double d = longmem::estimate_d(abs_acf, 20, 2000).d;
            d_inside += d > 0.0 && d < 0.5;
            d_min = std::min(d_min, d);
            d_max = std::max(d_max, d);
        } catch (const std::exception&) {
        }
    }
    return {abs_wins >= 16 && d_inside == 20,
            "|r| beats r^2 in " + std::to_string(abs_wins) + "/20 seeds; d in (0, 0.5) for " +
                std::to_string(d_inside) + "/20 (range " + fmt(d_min, 3) + " to " + fmt(d_max, 3) + ")"};
}

Verdict distribution_identities() {
    double ged_gap = 0.0, t_gap = 0.0;
    for (double z = -10.0; z <= 10.0; z += 0.01) {
        const double normal = aparch::loglik_density(z, 1.0, DistSpec::normal());
        ged_gap = std::max(ged_gap, std::abs(aparch::loglik_density(z, 1.0, DistSpec::ged(2.0)) - normal) /
                                        std::max(1.0, std::abs(normal)));
        t_gap = std::max(t_gap, std::abs(std::exp(aparch::loglik_density(z, 1.0, DistSpec::student_t(1e6))) -
                                         std::exp(normal)));
    }
    double mass_gap = 0.0;
    for (const auto& d : {DistSpec::normal(), DistSpec::student_t(5.0), DistSpec::ged(1.5)}) {
        const double mass = oracle::simpson(
            [&](double z) { return std::exp(aparch::loglik_density(z, 1.0, d)); }, -50.0, 50.0, 400000);
        mass_gap = std::max(mass_gap, std::abs(mass - 1.0));
    }
    const double eps = std::numeric_limits<double>::epsilon();
    return {ged_gap <= 8.0 * eps && t_gap <= 1e-5 && mass_gap <= 1e-6,
            "GED(2) vs normal " + fmt(ged_gap, 3) + ", t(1e6) vs normal density " + fmt(t_gap, 3) +
                ", worst |mass - 1| " + fmt(mass_gap, 3)};
}

Verdict white_noise_calibration() {
    double total = 0.0;
    for (unsigned seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(9000 + seed);
        std::normal_distribution<double> nd;
        std::vector<double> x(50000);
        for (auto& v : x) v = nd(rng);
        total += static_cast<double>(longmem::count_significant(longmem::acf(x, 1000)).total());
    }
    const double mean = total / 20.0;
    return {mean >= 20.0 && mean <= 80.0, "mean significant count " + fmt(mean) + " of 1000 lags"};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            out[fs::relative(e.path(), dir).string()] = {std::istreambuf_iterator<char>(in), {}};
        }
    return out;
}

Verdict determinism(const fs::path& scratch) {
    const auto root = scratch / "determinism";
    auto pipeline = [&]() -> std::string {
        fs::remove_all(root);
        const auto sim = (root / "sim").string(), fit = (root / "fit").string(), diag = (root / "diag").string();
        std::ostringstream sink;
        const std::vector<std::vector<std::string>> steps{
            {"hfvol", "simulate", "--preset", "gilt", "--n", "20000", "--seed", "11", "--output-dir", sim},
            {"hfvol", "fit", "--input", sim + "/returns.csv", "--order", "1,1,1,1", "--output-dir", fit},
            {"hfvol", "diagnose", "--input", sim + "/returns.csv", "--fit", fit + "/fit.json", "--output-dir", diag}};
        for (const auto& args : steps) {
            const int code = cli::run(args, sink, sink);
            if (code != cli::kOk) return args[1] + " exited with " + std::to_string(code);
        }
        return {};
    };
    if (auto e = pipeline(); !e.empty()) return {false, "first run: " + e};
    const auto first = snapshot(root);
    if (auto e = pipeline(); !e.empty()) return {false, "second run: " + e};
    const auto second = snapshot(root);
    std::size_t bytes = 0;
    for (const auto& [name, content] : first) bytes += content.size();
    if (first != second) {
        for (const auto& [name, content] : first) {
            const auto it = second.find(name);
            if (it == second.end() || it->second != content) return {false, name + " differs between runs"};
        }
        return {false, "file sets differ between runs"};
    }
    return {true, std::to_string(first.size()) + " files, " + std::to_string(bytes) + " bytes identical"};
}

} // namespace

int main(int argc, char** argv) {
    fs::path scratch = fs::temp_directory_path() / "hfvol_acceptance";
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--scratch" && i + 1 < argc) {
            scratch = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::istringstream list(argv[++i]);
            for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
        } else {
            std::cerr << "usage: acceptance [--scratch DIR] [--only N[,N...]]\n";
            return 2;
        }
    }
    fs::create_directories(scratch);

    std::optional<RecoveryRun> recovery;
    auto recovered = [&]() -> const RecoveryRun& {
        if (!recovery) recovery = run_recovery();
        return *recovery;
    };

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"half-life exactness", half_life_exactness},
        {"information criteria", information_criteria},
        {"significance bands", significance_bands},
        {"calendar bar counts", calendar_counts},
        {"nested-model oracle", nested_model_oracle},
        {"ACF oracle", acf_oracle},
        {"parameter recovery", [&] { return parameter_recovery(recovered()); }},
        {"long-memory phenomenology", [&] { return long_memory(recovered()); }},
        {"distribution identities", distribution_identities},
        {"white-noise calibration", white_noise_calibration},
        {"determinism", [&] { return determinism(scratch); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << std::setw(2) << number << " " << criteria[i].first
                  << ": " << v.detail << " [" << std::fixed << std::setprecision(1) << secs << "s]" << std::endl;
        std::cout.unsetf(std::ios::fixed);
    }
    return failures == 0 ? 0 : 1;
}
