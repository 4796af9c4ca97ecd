#include "hfvol/json_io.hpp"

#include "hfvol/error.hpp"

#include <cmath>
#include <limits>

namespace hfvol {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json vector_or_null(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(number_or_null(x));
    return out;
}

std::vector<double> vector_from(const Json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(number_from(x));
    return out;
}

} // namespace

Json params_to_json(const aparch::AparchParams& p, const aparch::DistSpec& dist) {
    Json j;
    j["mu"] = p.mu;
    j["ar"] = p.ar;
    j["ma"] = p.ma;
    j["alpha0"] = p.alpha0;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["gamma"] = p.gamma;
    j["delta"] = p.delta;
    j["dist_family"] = aparch::to_string(dist.family);
    j["dist_shape"] = dist.has_shape() ? Json(dist.shape) : Json(nullptr);
    return j;
}

ParamsWithDist params_from_json(const Json& j) {
    ParamsWithDist out;
    try {
        auto& p = out.params;
        p.mu = j.value("mu", 0.0);
        p.ar = j.value("ar", std::vector<double>{});
        p.ma = j.value("ma", std::vector<double>{});
        p.alpha0 = j.at("alpha0").get<double>();
        p.alpha = j.at("alpha").get<std::vector<double>>();
        p.beta = j.value("beta", std::vector<double>{});
        p.gamma = j.value("gamma", std::vector<double>(p.alpha.size(), 0.0));
        p.delta = j.at("delta").get<double>();
        if (j.contains("dist_family"))
            out.dist.family = aparch::parse_dist_family(j.at("dist_family").get<std::string>());
        if (j.contains("dist_shape") && !j.at("dist_shape").is_null())
            out.dist.shape = j.at("dist_shape").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("parameter JSON: ") + e.what());
    }
    out.params.validate();
    out.dist.validate();
    return out;
}

Json fit_to_json(const estimate::FitResult& fit) {
    Json j;
    j["params"] = params_to_json(fit.params, fit.dist);
    j["order"] = {{"p", fit.order.p}, {"q", fit.order.q}, {"n_ar", fit.order.n_ar}, {"n_ma", fit.order.n_ma}};
    j["constraints"] = {
        {"fixed_delta", fit.constraints.fixed_delta ? Json(*fit.constraints.fixed_delta) : Json(nullptr)},
        {"fix_gamma_zero", fit.constraints.fix_gamma_zero},
        {"fix_shape", fit.constraints.fix_shape}};
    j["loglik"] = number_or_null(fit.loglik);
    j["n_used"] = fit.n_used;
    j["k_params"] = fit.k_params;
    j["aic_total"] = number_or_null(fit.aic_total);
    j["bic_total"] = number_or_null(fit.bic_total);
    j["aic_per_obs"] = number_or_null(fit.aic_per_obs);
    j["bic_per_obs"] = number_or_null(fit.bic_per_obs);
    j["names"] = fit.names;
    j["estimates"] = vector_or_null(fit.estimates);
    j["se_robust"] = vector_or_null(fit.se_robust);
    j["se_opg"] = vector_or_null(fit.se_opg);
    j["t_stats"] = vector_or_null(fit.t_stats);
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["gradient_norm"] = number_or_null(fit.gradient_norm);
    j["best_start"] = fit.best_start;
    j["message"] = fit.message;
    j["loglik_trace"] = vector_or_null(fit.loglik_trace);
    if (!fit.params.alpha.empty() && fit.params.persistence() > 0.0) {
        j["half_life"] = number_or_null(aparch::half_life(fit.params));
        j["nested_model"] = aparch::to_string(aparch::classify_nested(fit.params));
    }
    const int di = fit.index_of("delta");
    if (di >= 0 && std::isfinite(fit.se_robust[static_cast<std::size_t>(di)])) {
        const auto t = estimate::delta_power_tests(fit);
        j["delta_t_vs_1"] = number_or_null(t.t_vs_1);
        j["delta_t_vs_2"] = number_or_null(t.t_vs_2);
    }
    return j;
}

estimate::FitResult fit_from_json(const Json& j) {
    estimate::FitResult fit;
    try {
        auto pd = params_from_json(j.at("params"));
        fit.params = std::move(pd.params);
        fit.dist = pd.dist;
        const auto& o = j.at("order");
        fit.order = {o.at("p").get<int>(), o.at("q").get<int>(), o.at("n_ar").get<int>(),
                     o.at("n_ma").get<int>()};
        if (j.contains("constraints")) {
            const auto& c = j.at("constraints");
            if (!c.at("fixed_delta").is_null()) fit.constraints.fixed_delta = c.at("fixed_delta").get<double>();
            fit.constraints.fix_gamma_zero = c.at("fix_gamma_zero").get<bool>();
            fit.constraints.fix_shape = c.at("fix_shape").get<bool>();
        }
        fit.loglik = number_from(j.at("loglik"));
        fit.n_used = j.at("n_used").get<std::size_t>();
        fit.k_params = j.at("k_params").get<int>();
        fit.aic_total = number_from(j.at("aic_total"));
        fit.bic_total = number_from(j.at("bic_total"));
        fit.aic_per_obs = number_from(j.at("aic_per_obs"));
        fit.bic_per_obs = number_from(j.at("bic_per_obs"));
        fit.names = j.at("names").get<std::vector<std::string>>();
        fit.estimates = vector_from(j.at("estimates"));
        fit.se_robust = vector_from(j.at("se_robust"));
        fit.se_opg = vector_from(j.at("se_opg"));
        fit.t_stats = vector_from(j.at("t_stats"));
        fit.converged = j.at("converged").get<bool>();
        fit.iterations = j.at("iterations").get<int>();
        fit.gradient_norm = number_from(j.at("gradient_norm"));
        fit.best_start = j.value("best_start", -1);
        fit.message = j.value("message", std::string{});
        if (j.contains("loglik_trace")) fit.loglik_trace = vector_from(j.at("loglik_trace"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("fit JSON: ") + e.what());
    }
    return fit;
}

Json sweep_to_json(std::span<const longmem::NamedSweep> sweeps) {
    Json out = Json::array();
    for (const auto& s : sweeps) {
        Json j;
        j["series"] = s.series;
        j["n"] = s.table.n;
        j["max_lag"] = s.table.max_lag;
        j["band"] = s.table.band;
        j["band_display"] = longmem::format_band(s.table.band);
        j["ks"] = s.table.ks;
        for (auto mode : {PowerMode::Squared, PowerMode::Absolute}) {
            Json cells = Json::array();
            const auto& row = s.table.row(mode);
            const auto& lag1 = mode == PowerMode::Squared ? s.table.squared_lag1 : s.table.absolute_lag1;
            for (std::size_t i = 0; i < row.size(); ++i)
                cells.push_back({{"k", s.table.ks[i]},
                                 {"positive", row[i].n_positive},
                                 {"negative", row[i].n_negative},
                                 {"lag1", lag1[i]}});
            j[to_string(mode)] = cells;
        }
        out.push_back(j);
    }
    return out;
}

} // namespace hfvol
