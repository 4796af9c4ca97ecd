#include "hfvol/cli.hpp"

#include "hfvol/aparch.hpp"
#include "hfvol/calendar.hpp"
#include "hfvol/error.hpp"
#include "hfvol/estimator.hpp"
#include "hfvol/ingest.hpp"
#include "hfvol/json_io.hpp"
#include "hfvol/longmem.hpp"
#include "hfvol/series.hpp"
#include "hfvol/series_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace hfvol::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct NonConvergence : Error {
    using Error::Error;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) {
        auto b = cur.find_first_not_of(" \t");
        auto e = cur.find_last_not_of(" \t");
        if (b != std::string::npos) parts.push_back(cur.substr(b, e - b + 1));
    }
    return parts;
}

std::vector<double> parse_k_list(const std::string& text) {
    std::vector<double> ks;
    for (const auto& part : split(text, ',')) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || ptr != part.data() + part.size() || !(v > 0.0))
            throw ConfigError("--k-list entries must be positive numbers, got '" + part + "'");
        ks.push_back(v);
    }
    if (ks.empty()) throw ConfigError("--k-list is empty");
    return ks;
}

std::string k_list_text(const std::vector<double>& ks) {
    std::string s;
    for (std::size_t i = 0; i < ks.size(); ++i) s += (i ? "," : "") + format_double(ks[i]);
    return s;
}

aparch::DistSpec make_dist(const std::string& family, std::optional<double> shape) {
    aparch::DistSpec d;
    d.family = aparch::parse_dist_family(family);
    if (d.family == aparch::DistFamily::StudentT) d.shape = shape.value_or(8.0);
    if (d.family == aparch::DistFamily::Ged) d.shape = shape.value_or(1.5);
    d.validate();
    return d;
}

std::string fnv1a_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

/// Collects one run's outputs and writes them together with the manifest.
class Run {
public:
    Run(std::string command, fs::path dir) : command_(std::move(command)), dir_(std::move(dir)) {}

    void input(const std::string& path) {
        if (!fs::exists(path)) throw DataError("input not found: " + path);
        inputs_.push_back({{"path", path}, {"bytes", fs::file_size(path)}, {"fnv1a64", fnv1a_hex(path)}});
    }
    void set(const std::string& key, Json value) { config_[key] = std::move(value); }
    void seed(std::uint64_t s) { seed_ = s; }
    void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }
    void add_json(const std::string& name, const Json& j) { add(name, j.dump(2) + "\n"); }

    void commit(std::ostream& out) {
        fs::create_directories(dir_);
        Json manifest;
        manifest["tool"] = "hfvol";
        manifest["version"] = kVersion;
        manifest["command"] = command_;
        manifest["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
        manifest["inputs"] = inputs_.empty() ? Json::array() : Json(inputs_);
        manifest["config"] = config_.is_null() ? Json::object() : config_;
        Json outputs = Json::array();
        for (const auto& [name, content] : files_) {
            std::ofstream f(dir_ / name, std::ios::binary);
            if (!f) throw Error("cannot write " + (dir_ / name).string());
            f << content;
            outputs.push_back(name);
            out << "wrote " << (dir_ / name).string() << "\n";
        }
        manifest["outputs"] = outputs;
        const auto manifest_name = command_ + "_manifest.json";
        std::ofstream(dir_ / manifest_name, std::ios::binary) << manifest.dump(2) << "\n";
        out << "wrote " << (dir_ / manifest_name).string() << "\n";
    }

private:
    std::string command_;
    fs::path dir_;
    std::vector<Json> inputs_;
    Json config_;
    std::optional<std::uint64_t> seed_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string series_csv(const ReturnSeries& s) {
    std::ostringstream os;
    write_series_csv(os, s.timestamps, s.values);
    return os.str();
}

Json sweep_json(const std::vector<longmem::NamedSweep>& sweeps) { return sweep_to_json(sweeps); }

std::string sweep_csv(const std::vector<longmem::NamedSweep>& sweeps) {
    std::ostringstream os;
    longmem::write_sweep_csv(os, sweeps);
    return os.str();
}

Json acf_json(const longmem::AcfResult& a) {
    Json j;
    j["n"] = a.n;
    j["max_lag"] = a.max_lag();
    j["band"] = a.band;
    j["band_display"] = longmem::format_band(a.band);
    const auto c = longmem::count_significant(a);
    j["n_positive"] = c.n_positive;
    j["n_negative"] = c.n_negative;
    j["rho"] = a.rho;
    return j;
}

int infer_intervals_per_day(const ReturnSeries& s) {
    std::map<long, int> per_day;
    for (auto ts : s.timestamps) ++per_day[std::chrono::floor<std::chrono::days>(ts).time_since_epoch().count()];
    int best = 1;
    for (const auto& [day, count] : per_day) best = std::max(best, count);
    return best;
}

std::string default_output_dir() {
    const char* env = std::getenv(kOutputDirEnv);
    return env && *env ? env : ".";
}

// ----------------------------------------------------------------------------

struct Common {
    std::string output_dir = default_output_dir();
    unsigned workers = 1;
};

struct IngestArgs {
    std::string input, format, calendar = "gilt", contract;
    int bar_minutes = 5;
    bool drop_overnight = false;
    bool keep_roll_returns = false;
};

int do_ingest(const IngestArgs& a, const Common& c, std::ostream& out) {
    Run run("ingest", c.output_dir);
    run.input(a.input);
    ingest::TickFormat format;
    if (!a.format.empty()) {
        run.input(a.format);
        format = ingest::TickFormat::load(a.format);
    }
    ingest::IngestConfig cfg;
    cfg.bar_width = a.bar_minutes;
    cfg.calendar = resolve_calendar(a.calendar);
    cfg.calendar.validate(a.bar_minutes);

    auto parsed = ingest::parse_ticks_file(a.input, format);
    auto front = ingest::select_front_contract(parsed.records);
    auto bars = ingest::build_bars(front.ticks, cfg);
    bars.contract_id = a.contract.empty() ? fs::path(a.input).stem().string() : a.contract;
    if (bars.size() < 2) throw DataError("fewer than two bars after cleaning");

    LogReturnOptions opts;
    opts.drop_overnight = a.drop_overnight;
    opts.drop_roll_returns = !a.keep_roll_returns;
    auto returns = log_returns(bars, opts);

    Json report;
    report["contract"] = bars.contract_id;
    report["calendar"] = cfg.calendar.name;
    report["bar_minutes"] = a.bar_minutes;
    report["intervals_per_day"] = bars.intervals_per_day;
    report["data_lines"] = parsed.data_lines;
    report["records"] = parsed.records.size();
    report["rejects"] = parsed.rejects.size();
    Json rejects = Json::array();
    for (const auto& r : parsed.rejects) rejects.push_back({{"line", r.line}, {"reason", r.reason}});
    report["reject_lines"] = rejects;
    Json rolls = Json::array();
    for (const auto& r : front.rolls) rolls.push_back({{"date", format_date(r.date)}, {"from", r.from}, {"to", r.to}});
    report["rolls"] = rolls;
    report["bars"] = bars.size();
    Json per_day = Json::object();
    for (const auto& [d, n] : ingest::bars_per_day(bars)) per_day[format_date(d)] = n;
    report["bars_per_day"] = per_day;
    report["returns"] = returns.size();
    report["drop_overnight"] = a.drop_overnight;
    report["roll_returns_dropped"] = opts.drop_roll_returns ? bars.segment_starts.size() : 0;

    run.set("calendar", a.calendar);
    run.set("bar_minutes", a.bar_minutes);
    run.set("drop_overnight", a.drop_overnight);
    run.set("keep_roll_returns", a.keep_roll_returns);
    run.set("contract", bars.contract_id);

    std::ostringstream bars_csv;
    write_series_csv(bars_csv, bars.timestamps, bars.close_prices);
    run.add("bars.csv", bars_csv.str());
    run.add("returns.csv", series_csv(returns));
    run.add_json("ingest_report.json", report);
    run.commit(out);
    out << bars.size() << " bars, " << returns.size() << " returns, " << parsed.rejects.size()
        << " rejected lines\n";
    return kOk;
}

struct AcfArgs {
    std::string input, mode = "absolute";
    double k = 1.0;
    std::size_t max_lag = 0;
};

int do_acf(const AcfArgs& a, const Common& c, std::ostream& out) {
    Run run("acf", c.output_dir);
    run.input(a.input);
    auto series = read_returns_csv(a.input);
    std::vector<double> x = series.values;
    if (a.mode == "absolute") x = power_transform(series.values, {a.k, PowerMode::Absolute});
    else if (a.mode == "squared") x = power_transform(series.values, {a.k, PowerMode::Squared});
    const std::size_t L = a.max_lag ? a.max_lag : longmem::default_max_lag(x.size());
    auto result = longmem::acf(x, L);

    run.set("mode", a.mode);
    run.set("k", a.k);
    run.set("max_lag", L);
    std::ostringstream csv;
    longmem::write_acf_csv(csv, result);
    run.add("acf.csv", csv.str());
    Json j = acf_json(result);
    j["mode"] = a.mode;
    j["k"] = a.k;
    run.add_json("acf.json", j);
    run.commit(out);
    const auto counts = longmem::count_significant(result);
    out << "n=" << result.n << " max_lag=" << L << " band=+-" << longmem::format_band(result.band)
        << " significant " << counts.n_positive << "/" << counts.n_negative << "\n";
    return kOk;
}

struct SweepArgs {
    std::vector<std::string> inputs;
    std::string k_list;
    std::size_t max_lag = 0;
};

int do_sweep(const SweepArgs& a, const Common& c, std::ostream& out) {
    Run run("sweep", c.output_dir);
    const auto ks = a.k_list.empty() ? longmem::default_power_ks() : parse_k_list(a.k_list);
    std::vector<longmem::NamedSweep> sweeps;
    for (const auto& path : a.inputs) {
        run.input(path);
        auto series = read_returns_csv(path);
        const std::size_t L = a.max_lag ? a.max_lag : longmem::default_max_lag(series.size());
        sweeps.push_back({fs::path(path).stem().string(),
                          longmem::power_sweep(series.values, ks, L, c.workers)});
    }
    run.set("k_list", k_list_text(ks));
    run.set("max_lag", a.max_lag ? Json(a.max_lag) : Json("n/10"));
    run.add("sweep.csv", sweep_csv(sweeps));
    run.add_json("sweep.json", sweep_json(sweeps));
    run.commit(out);
    out << sweep_csv(sweeps);
    return kOk;
}

struct FitArgs {
    std::string input, order = "1,1,0,0", dist = "normal";
    std::optional<double> shape, fix_delta;
    bool fix_gamma_zero = false, fix_shape = false;
    int starts = 3, max_iter = 500;
};

estimate::OptimizerConfig optimizer(const FitArgs& a) {
    estimate::OptimizerConfig cfg;
    cfg.n_starts = a.starts;
    cfg.max_iterations = a.max_iter;
    cfg.validate();
    return cfg;
}

void record_fit_config(Run& run, const FitArgs& a) {
    run.set("order", a.order);
    run.set("dist", a.dist);
    run.set("shape", a.shape ? Json(*a.shape) : Json(nullptr));
    run.set("starts", a.starts);
    run.set("max_iter", a.max_iter);
    run.set("fix_delta", a.fix_delta ? Json(*a.fix_delta) : Json(nullptr));
    run.set("fix_gamma_zero", a.fix_gamma_zero);
    run.set("fix_shape", a.fix_shape);
}

int do_fit(const FitArgs& a, const Common& c, std::ostream& out) {
    Run run("fit", c.output_dir);
    run.input(a.input);
    auto series = read_returns_csv(a.input);
    const auto order = estimate::parse_order(a.order);
    const auto dist = make_dist(a.dist, a.shape);
    estimate::FitConstraints cons;
    cons.fixed_delta = a.fix_delta;
    cons.fix_gamma_zero = a.fix_gamma_zero;
    cons.fix_shape = a.fix_shape;
    auto result = estimate::fit(series, order, dist, optimizer(a), cons);

    record_fit_config(run, a);
    run.add_json("fit.json", fit_to_json(result));
    const auto report = estimate::format_report(result, fs::path(a.input).stem().string());
    run.add("fit_report.txt", report);
    run.commit(out);
    out << report;
    if (!result.converged) throw NonConvergence("fit did not converge: " + result.message);
    return kOk;
}

struct SearchArgs {
    FitArgs fit;
    std::string orders = "1,1,0,0;1,1,1,1", dists = "normal,t";
};

int do_search(const SearchArgs& a, const Common& c, std::ostream& out) {
    Run run("search", c.output_dir);
    run.input(a.fit.input);
    auto series = read_returns_csv(a.fit.input);
    std::vector<estimate::ModelOrder> orders;
    for (const auto& o : split(a.orders, ';')) orders.push_back(estimate::parse_order(o));
    std::vector<aparch::DistSpec> dists;
    for (const auto& d : split(a.dists, ',')) dists.push_back(make_dist(d, a.fit.shape));
    if (orders.empty() || dists.empty()) throw ConfigError("empty search grid");

    auto ranked = estimate::model_search(series, orders, dists, optimizer(a.fit), c.workers);

    Json all = Json::array();
    std::ostringstream csv, text;
    csv << "rank,order,dist,loglik,k_params,aic_total,bic_total,converged\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& f = ranked[i];
        Json j = fit_to_json(f);
        j["rank"] = i + 1;
        all.push_back(j);
        csv << i + 1 << ",\"" << estimate::to_string(f.order) << "\"," << aparch::to_string(f.dist.family) << ","
            << format_double(f.loglik) << "," << f.k_params << "," << format_double(f.aic_total) << ","
            << format_double(f.bic_total) << "," << (f.converged ? 1 : 0) << "\n";
    }
    text << csv.str() << "\n" << estimate::format_report(ranked.front(), "best model");

    run.set("orders", a.orders);
    run.set("dists", a.dists);
    run.set("shape", a.fit.shape ? Json(*a.fit.shape) : Json(nullptr));
    run.set("starts", a.fit.starts);
    run.set("max_iter", a.fit.max_iter);
    run.add("search.csv", csv.str());
    run.add_json("search.json", all);
    run.add("search_report.txt", text.str());
    run.commit(out);
    out << text.str();
    if (!ranked.front().converged) throw NonConvergence("no fit in the grid converged");
    return kOk;
}

struct SimulateArgs {
    std::string params_path, preset = "gilt", calendar = "gilt", start_date = "1998-01-05";
    std::optional<std::string> dist;
    std::optional<double> shape;
    std::size_t n = 50000, burn_in = 1000;
    std::uint64_t seed = 1;
    int bar_minutes = 5;
};

int do_simulate(const SimulateArgs& a, const Common& c, std::ostream& out) {
    Run run("simulate", c.output_dir);
    ParamsWithDist pd;
    if (!a.params_path.empty()) {
        run.input(a.params_path);
        std::ifstream in(a.params_path);
        Json j;
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("cannot parse --params: ") + e.what());
        }
        pd = params_from_json(j.contains("params") ? j.at("params") : j);
    } else {
        std::string p = a.preset;
        std::transform(p.begin(), p.end(), p.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (p == "ftse100" || p == "ftse") pd.params = aparch::ftse100_reference_params();
        else if (p == "gilt") pd.params = aparch::long_gilt_reference_params();
        else if (p == "sterling") pd.params = aparch::short_sterling_reference_params();
        else throw ConfigError("unknown preset '" + a.preset + "' (ftse100, gilt, sterling)");
    }
    if (a.dist) pd.dist = make_dist(*a.dist, a.shape);
    else if (a.shape && pd.dist.has_shape()) pd.dist.shape = *a.shape;
    pd.params.validate();
    pd.dist.validate();
    if (a.n < 2) throw ConfigError("--n must be at least 2");

    auto path = aparch::simulate_path(pd.params, pd.dist, a.n, a.seed, a.burn_in);
    ReturnSeries series;
    series.values = path.returns;
    if (a.calendar == "none") {
        series = make_return_series(path.returns);
    } else {
        const auto cal = resolve_calendar(a.calendar);
        const auto start = parse_date(a.start_date);
        if (!start) throw ConfigError("bad --start-date '" + a.start_date + "'");
        series.timestamps = session_bar_times(cal, a.bar_minutes, a.n, *start);
        series.intervals_per_day = cal.intervals_per_day(a.bar_minutes);
    }

    run.seed(a.seed);
    run.set("preset", a.params_path.empty() ? Json(a.preset) : Json(nullptr));
    run.set("n", a.n);
    run.set("burn_in", a.burn_in);
    run.set("calendar", a.calendar);
    run.set("bar_minutes", a.bar_minutes);
    run.set("start_date", a.start_date);
    run.add("returns.csv", series_csv(series));
    run.add_json("simulate_params.json", params_to_json(pd.params, pd.dist));
    run.commit(out);
    out << "simulated " << a.n << " returns (seed " << a.seed << ")\n";
    return kOk;
}

struct DiagnoseArgs {
    std::string input, fit_path, k_list;
    std::size_t max_lag = 0;
    int intervals_per_day = 0, days = 5;
};

int do_diagnose(const DiagnoseArgs& a, const Common& c, std::ostream& out) {
    Run run("diagnose", c.output_dir);
    run.input(a.input);
    run.input(a.fit_path);
    auto series = read_returns_csv(a.input);
    Json fj;
    {
        std::ifstream in(a.fit_path);
        try {
            fj = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("cannot parse --fit: ") + e.what());
        }
    }
    const auto fitted = fit_from_json(fj);
    const auto z = estimate::standardized_residuals(series, fitted);
    const int ipd = a.intervals_per_day > 0 ? a.intervals_per_day : infer_intervals_per_day(series);
    const auto ks = a.k_list.empty() ? longmem::default_power_ks() : parse_k_list(a.k_list);

    const std::size_t L = a.max_lag ? a.max_lag : longmem::default_max_lag(z.size());
    std::vector<longmem::NamedSweep> sweeps;
    sweeps.push_back({"returns", longmem::power_sweep(series.values, ks, L, c.workers)});
    sweeps.push_back({"standardized", longmem::power_sweep(z.values, ks, L, c.workers)});

    const std::size_t week = static_cast<std::size_t>(a.days) * static_cast<std::size_t>(ipd);
    const auto abs_z = power_transform(z.values, {1.0, PowerMode::Absolute});
    const auto profile = longmem::periodicity_profile(longmem::acf(abs_z, week), ipd, a.days);

    run.set("k_list", k_list_text(ks));
    run.set("max_lag", L);
    run.set("intervals_per_day", ipd);
    run.set("days", a.days);
    run.add("residuals.csv", series_csv(z));
    run.add("diagnose_sweep.csv", sweep_csv(sweeps));
    run.add_json("diagnose_sweep.json", sweep_json(sweeps));
    std::ostringstream prof;
    longmem::write_profile_csv(prof, profile);
    run.add("profile.csv", prof.str());
    Json pj;
    pj["intervals_per_day"] = profile.intervals_per_day;
    pj["days"] = profile.days;
    pj["band"] = profile.band;
    pj["day_ends"] = profile.day_ends;
    pj["rho"] = profile.rho;
    run.add_json("profile.json", pj);
    run.commit(out);
    const auto m = moments(z.values);
    out << "standardized residuals: n=" << z.size() << " mean=" << format_double(m.mean)
        << " variance=" << format_double(m.variance) << "\n"
        << sweep_csv(sweeps);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"High-frequency volatility toolkit: long-memory sweeps and APARCH estimation", "hfvol"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output-dir", common.output_dir,
                        std::string("Directory for outputs (default $") + kOutputDirEnv + " or .)");
        sub->add_option("--workers", common.workers, "Worker threads for sweeps and searches")
            ->check(CLI::Range(1u, 256u));
    };

    IngestArgs ia;
    auto* ingest_cmd = app.add_subcommand("ingest", "Tick file to cleaned interval bars and returns");
    ingest_cmd->add_option("--input", ia.input, "Tick file")->required();
    ingest_cmd->add_option("--format", ia.format, "Column-mapping descriptor file");
    ingest_cmd->add_option("--calendar", ia.calendar, "ftse100, gilt, sterling or a calendar file")->capture_default_str();
    ingest_cmd->add_option("--bar-minutes", ia.bar_minutes, "Bar width in minutes")->capture_default_str()->check(CLI::PositiveNumber);
    ingest_cmd->add_option("--contract", ia.contract, "Contract label (default: input file stem)");
    ingest_cmd->add_flag("--drop-overnight", ia.drop_overnight, "Omit returns spanning two trading days");
    ingest_cmd->add_flag("--keep-roll-returns", ia.keep_roll_returns, "Keep the return spanning a contract roll");
    add_common(ingest_cmd);

    AcfArgs aa;
    auto* acf_cmd = app.add_subcommand("acf", "Autocorrelations of a power-transformed return series");
    acf_cmd->add_option("--input", aa.input, "Returns CSV")->required();
    acf_cmd->add_option("--max-lag", aa.max_lag, "Largest lag (default n/10)");
    acf_cmd->add_option("--mode", aa.mode, "raw, absolute or squared")
        ->check(CLI::IsMember({"raw", "absolute", "squared"}));
    acf_cmd->add_option("--k", aa.k, "Power exponent")->capture_default_str()->check(CLI::PositiveNumber);
    add_common(acf_cmd);

    SweepArgs sa;
    auto* sweep_cmd = app.add_subcommand("sweep", "Significance counts over power transformations");
    sweep_cmd->add_option("--input", sa.inputs, "Returns CSV (repeatable)")->required();
    sweep_cmd->add_option("--k-list", sa.k_list, "Comma-separated exponents (default 0.25,...,2)");
    sweep_cmd->add_option("--max-lag", sa.max_lag, "Largest lag (default n/10)");
    add_common(sweep_cmd);

    auto add_fit_options = [](CLI::App* sub, FitArgs& fa) {
        sub->add_option("--input", fa.input, "Returns CSV")->required();
        sub->add_option("--shape", fa.shape, "Starting t degrees of freedom or GED exponent");
        sub->add_option("--starts", fa.starts, "Number of starting points")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--max-iter", fa.max_iter, "Iteration cap per start")->capture_default_str()->check(CLI::PositiveNumber);
    };

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Estimate one APARCH model");
    add_fit_options(fit_cmd, fa);
    fit_cmd->add_option("--order", fa.order, "p,q,ar,ma")->capture_default_str();
    fit_cmd->add_option("--dist", fa.dist, "normal, t or ged")->capture_default_str();
    fit_cmd->add_option("--fix-delta", fa.fix_delta, "Hold delta at this value");
    fit_cmd->add_flag("--fix-gamma-zero", fa.fix_gamma_zero, "Symmetric model (gamma = 0)");
    fit_cmd->add_flag("--fix-shape", fa.fix_shape, "Hold the distribution shape at --shape");
    add_common(fit_cmd);

    SearchArgs ra;
    auto* search_cmd = app.add_subcommand("search", "Fit a grid of orders and distributions, rank by BIC");
    add_fit_options(search_cmd, ra.fit);
    search_cmd->add_option("--order", ra.orders, "Semicolon-separated p,q,ar,ma list")->capture_default_str();
    search_cmd->add_option("--dist", ra.dists, "Comma-separated distribution list")->capture_default_str();
    add_common(search_cmd);

    SimulateArgs ma;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate an APARCH return path");
    sim_cmd->add_option("--params", ma.params_path, "Parameter JSON");
    sim_cmd->add_option("--preset", ma.preset, "ftse100, gilt or sterling reference parameters")->capture_default_str();
    sim_cmd->add_option("--dist", ma.dist, "Override innovation distribution");
    sim_cmd->add_option("--shape", ma.shape, "Override distribution shape");
    sim_cmd->add_option("--n", ma.n, "Number of returns")->capture_default_str();
    sim_cmd->add_option("--seed", ma.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--burn-in", ma.burn_in, "Discarded start-up draws")->capture_default_str();
    sim_cmd->add_option("--calendar", ma.calendar, "Calendar for timestamps, or none")->capture_default_str();
    sim_cmd->add_option("--bar-minutes", ma.bar_minutes, "Bar width in minutes")->capture_default_str()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--start-date", ma.start_date, "First session date")->capture_default_str();
    add_common(sim_cmd);

    DiagnoseArgs da;
    auto* diag_cmd = app.add_subcommand("diagnose", "Standardized residuals, rescaled sweep, weekly profile");
    diag_cmd->add_option("--input", da.input, "Returns CSV")->required();
    diag_cmd->add_option("--fit", da.fit_path, "fit.json from the fit command")->required();
    diag_cmd->add_option("--k-list", da.k_list, "Comma-separated exponents");
    diag_cmd->add_option("--max-lag", da.max_lag, "Largest sweep lag (default n/10)");
    diag_cmd->add_option("--intervals-per-day", da.intervals_per_day, "Bars per session (default: inferred)");
    diag_cmd->add_option("--days", da.days, "Days in the periodicity profile")->capture_default_str()->check(CLI::PositiveNumber);
    add_common(diag_cmd);

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    if (storage.empty()) storage.push_back("hfvol");
    for (auto& s : storage) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    try {
        if (*ingest_cmd) return do_ingest(ia, common, out);
        if (*acf_cmd) return do_acf(aa, common, out);
        if (*sweep_cmd) return do_sweep(sa, common, out);
        if (*fit_cmd) return do_fit(fa, common, out);
        if (*search_cmd) return do_search(ra, common, out);
        if (*sim_cmd) return do_simulate(ma, common, out);
        if (*diag_cmd) return do_diagnose(da, common, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kData;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kData;
    } catch (const NonConvergence& e) {
        err << e.what() << "\n";
        return kNonConvergence;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}

int run(int argc, char** argv) {
    return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

} // namespace hfvol::cli
