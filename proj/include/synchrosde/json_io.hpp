#pragma once

#include <string>
#include <variant>

#include "json.hpp"
#include "synchrosde/analyze.hpp"
#include "synchrosde/constants.hpp"
#include "synchrosde/model.hpp"

namespace synchrosde {

using Json = nlohmann::ordered_json;
using AnyModel = std::variant<SDEModel, DissipativeModel>;

/// Model document:
///   {"lambda", "alpha", "beta", "sigma", "mode": "A3"|"A3prime", "g"?,
///    "declared"?: {"alpha": {"sup_norm", "lipschitz", "support_radius", "l1_norm"}, ...},
///    "grid"?: {"R", "h"}}
/// or, for a dissipative drift,
///   {"mode"?: "dissipative", "b", "sigma", "declared"?: {"D_b"}, "grid"?}.
/// Functions are expression strings or numbers. Throws ConfigError (or
/// ParseError for bad expressions).
AnyModel model_from_json(const Json& doc);
AnyModel load_model(const std::string& path);

/// Re-ingestible echo of a model.
Json to_json(const SDEModel& m);
Json to_json(const DissipativeModel& m);
Json to_json(const AnyModel& m);

Json to_json(const ValidationReport& r);
Json to_json(const ConstantsReport& r);
Json to_json(const Prop1Constants& c);
Json to_json(const SimulationSpec& s);
Json to_json(const RateEstimate& r);
Json to_json(const TheoreticalRates& t);
Json to_json(const VerificationReport& r);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace synchrosde
