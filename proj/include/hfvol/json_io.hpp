#pragma once

#include "hfvol/aparch.hpp"
#include "hfvol/estimator.hpp"
#include "hfvol/longmem.hpp"

#include <json.hpp>

#include <span>

namespace hfvol {

using Json = nlohmann::ordered_json;

/// Fields: mu, ar, ma, alpha0, alpha, beta, gamma, delta, dist_family, dist_shape.
Json params_to_json(const aparch::AparchParams& params, const aparch::DistSpec& dist);

struct ParamsWithDist {
    aparch::AparchParams params;
    aparch::DistSpec dist;
};

/// Missing dist fields default to the normal. Throws ConfigError on malformed input or
/// parameters outside the valid region.
ParamsWithDist params_from_json(const Json& j);

/// Every FitResult field; NaN standard errors serialize as null.
Json fit_to_json(const estimate::FitResult& fit);
estimate::FitResult fit_from_json(const Json& j);

Json sweep_to_json(std::span<const longmem::NamedSweep> sweeps);

} // namespace hfvol
