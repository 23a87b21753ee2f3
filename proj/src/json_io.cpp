#include "synchrosde/json_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "synchrosde/errors.hpp"

namespace synchrosde {

namespace {

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
  return j.get<double>();
}

FunctionDescriptor function_field(const Json& doc, const char* key, const DeclaredMetadata& d) {
  if (!doc.contains(key)) throw ConfigError(std::string("missing function '") + key + "'");
  const Json& v = doc.at(key);
  FunctionDescriptor f;
  if (v.is_string()) {
    f = parse(v.get<std::string>());
  } else if (v.is_number()) {
    f = FunctionDescriptor(expr::constant(v.get<double>()));
  } else {
    throw ConfigError(std::string("function '") + key + "' must be an expression string or number");
  }
  return d.empty() ? f : f.with_declared(d);
}

DeclaredMetadata declared_for(const Json& doc, const char* key) {
  DeclaredMetadata d;
  if (!doc.contains("declared")) return d;
  const Json& all = doc.at("declared");
  if (!all.is_object()) throw ConfigError("'declared' must be an object");
  if (!all.contains(key)) return d;
  const Json& o = all.at(key);
  if (!o.is_object()) throw ConfigError(std::string("declared.") + key + " must be an object");
  for (const auto& [k, v] : o.items()) {
    const double x = number(v, ("declared." + std::string(key) + "." + k).c_str());
    if (k == "sup_norm") d.sup_norm = x;
    else if (k == "lipschitz") d.lipschitz = x;
    else if (k == "support_radius") d.support_radius = x;
    else if (k == "l1_norm") d.l1_norm = x;
    else throw ConfigError("unknown declared key '" + k + "'");
  }
  return d;
}

std::optional<GridSpec> grid_of(const Json& doc) {
  if (!doc.contains("grid")) return std::nullopt;
  const Json& g = doc.at("grid");
  if (!g.is_object()) throw ConfigError("'grid' must be an object");
  GridSpec out;
  for (const auto& [k, v] : g.items()) {
    if (k == "R") out.R = number(v, "grid.R");
    else if (k == "h") out.h = number(v, "grid.h");
    else throw ConfigError("unknown grid key '" + k + "'");
  }
  if (!(out.R > 0.0) || !(out.h > 0.0) || !(out.h < out.R)) {
    throw ConfigError("grid requires R > 0 and 0 < h < R");
  }
  return out;
}

void reject_unknown(const Json& doc, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : doc.items()) {
    if (!allowed.contains(k)) throw ConfigError("unknown model key '" + k + "'");
  }
}

Json declared_json(const DeclaredMetadata& d) {
  Json o = Json::object();
  if (d.sup_norm) o["sup_norm"] = *d.sup_norm;
  if (d.lipschitz) o["lipschitz"] = *d.lipschitz;
  if (d.support_radius) o["support_radius"] = *d.support_radius;
  if (d.l1_norm) o["l1_norm"] = *d.l1_norm;
  return o;
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json grid_json(const GridSpec& g) {
  Json o;
  o["R"] = g.R;
  o["h"] = g.h;
  return o;
}

Json p_map(const std::map<double, double>& m) {
  Json o = Json::object();
  for (const auto& [p, v] : m) o[format_real(p)] = real(v);
  return o;
}

}  // namespace

AnyModel model_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("model document must be a JSON object");
  const bool dissipative =
      doc.contains("b") || (doc.contains("mode") && doc.at("mode") == "dissipative");
  if (dissipative) {
    reject_unknown(doc, {"mode", "b", "sigma", "declared", "grid"});
    std::optional<double> D_b;
    if (doc.contains("declared")) {
      const Json& d = doc.at("declared");
      if (!d.is_object()) throw ConfigError("'declared' must be an object");
      for (const auto& [k, v] : d.items()) {
        if (k == "D_b") D_b = number(v, "declared.D_b");
        else if (k != "sigma") throw ConfigError("unknown declared key '" + k + "'");
      }
    }
    return DissipativeModel(function_field(doc, "b", {}),
                            function_field(doc, "sigma", declared_for(doc, "sigma")),
                            grid_of(doc), D_b);
  }

  reject_unknown(doc, {"lambda", "alpha", "beta", "sigma", "mode", "g", "declared", "grid"});
  SDEModel::Parts p;
  if (!doc.contains("lambda")) throw ConfigError("missing 'lambda'");
  p.lambda = number(doc.at("lambda"), "lambda");
  p.alpha = function_field(doc, "alpha", declared_for(doc, "alpha"));
  p.beta = function_field(doc, "beta", declared_for(doc, "beta"));
  p.sigma = function_field(doc, "sigma", declared_for(doc, "sigma"));
  if (doc.contains("mode")) {
    if (!doc.at("mode").is_string()) throw ConfigError("'mode' must be a string");
    p.mode = mode_from_string(doc.at("mode").get<std::string>());
  }
  if (doc.contains("g")) p.envelope = function_field(doc, "g", declared_for(doc, "g"));
  if (doc.contains("declared")) {
    for (const auto& [k, v] : doc.at("declared").items()) {
      if (k != "alpha" && k != "beta" && k != "sigma" && k != "g") {
        throw ConfigError("unknown declared key '" + k + "'");
      }
    }
  }
  p.grid = grid_of(doc);
  return SDEModel(std::move(p));
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
  return model_from_json(doc);
}

Json to_json(const SDEModel& m) {
  Json o;
  o["lambda"] = m.lambda();
  o["alpha"] = m.alpha().to_string();
  o["beta"] = m.beta().to_string();
  o["sigma"] = m.sigma().to_string();
  o["mode"] = to_string(m.mode());
  if (m.envelope()) o["g"] = m.envelope()->to_string();
  Json d = Json::object();
  if (!m.alpha().declared().empty()) d["alpha"] = declared_json(m.alpha().declared());
  if (!m.beta().declared().empty()) d["beta"] = declared_json(m.beta().declared());
  if (!m.sigma().declared().empty()) d["sigma"] = declared_json(m.sigma().declared());
  if (m.envelope() && !m.envelope()->declared().empty()) {
    d["g"] = declared_json(m.envelope()->declared());
  }
  if (!d.empty()) o["declared"] = d;
  if (m.grid_was_declared()) o["grid"] = grid_json(m.grid());
  return o;
}

Json to_json(const DissipativeModel& m) {
  Json o;
  o["mode"] = "dissipative";
  o["b"] = m.b().to_string();
  o["sigma"] = m.sigma().to_string();
  Json d = Json::object();
  if (m.declared_D_b()) d["D_b"] = *m.declared_D_b();
  if (!m.sigma().declared().empty()) d["sigma"] = declared_json(m.sigma().declared());
  if (!d.empty()) o["declared"] = d;
  if (m.grid_was_declared()) o["grid"] = grid_json(m.grid());
  return o;
}

Json to_json(const AnyModel& m) {
  return std::visit([](const auto& v) { return to_json(v); }, m);
}

Json to_json(const ValidationReport& r) {
  Json o;
  o["all_passed"] = r.all_passed();
  Json arr = Json::array();
  for (const auto& h : r.results) {
    Json e;
    e["id"] = h.id;
    e["status"] = h.passed ? "PASS" : "FAIL";
    e["description"] = h.description;
    e["value"] = h.value ? real(*h.value) : Json(nullptr);
    e["witness"] = opt(h.witness);
    if (h.witness_y) e["witness_y"] = *h.witness_y;
    arr.push_back(std::move(e));
  }
  o["results"] = std::move(arr);
  return o;
}

namespace {

Json rates_json(const RateConstants& r) {
  Json o;
  o["variant"] = to_string(r.variant);
  o["L_s"] = real(r.L_s);
  o["L_tilde_beta"] = real(r.L_tilde_beta);
  o["L_tilde_gamma"] = real(r.L_tilde_gamma);
  o["L_tilde_sigma"] = real(r.L_tilde_sigma);
  o["D_tilde_b_lower"] = real(r.D_tilde_b_lower);
  o["lambda0"] = real(r.lambda0);
  o["c_lambda"] = real(r.c_lambda);
  o["C_prefactor"] = real(r.C_prefactor);
  o["c_lambda_p"] = p_map(r.c_lambda_p);
  o["below_threshold"] = r.below_threshold;
  return o;
}

}  // namespace

Json to_json(const ConstantsReport& r) {
  Json o;
  o["mode"] = to_string(r.mode);
  o["lambda"] = r.lambda;
  o["delta"] = real(r.delta);
  o["delta_clamped"] = r.delta_clamped;
  const LipschitzConstants& l = r.lipschitz;
  Json lj;
  lj["L_s"] = real(l.L_s);
  lj["L_s_prime"] = real(l.L_s_prime);
  lj["L_gamma"] = real(l.L_gamma);
  lj["sup_gamma"] = real(l.sup_gamma);
  lj["sup_gamma_minus_alpha"] = real(l.sup_gamma_minus_alpha);
  lj["sup_beta"] = real(l.sup_beta);
  lj["sup_sigma"] = real(l.sup_sigma);
  lj["L_beta"] = real(l.L_beta);
  lj["L_sigma"] = real(l.L_sigma);
  lj["c_sigma"] = real(l.c_sigma);
  lj["L_tilde_beta"] = real(l.L_tilde_beta);
  lj["L_tilde_gamma"] = real(l.L_tilde_gamma);
  lj["L_tilde_sigma"] = real(l.L_tilde_sigma);
  lj["tail_truncated"] = l.tail_truncated;
  o["lipschitz"] = std::move(lj);
  Json cj;
  cj["L_s"] = real(r.closed.L_s);
  cj["L_s_prime"] = real(r.closed.L_s_prime);
  cj["L_tilde_beta"] = real(r.closed.L_tilde_beta);
  cj["L_tilde_gamma"] = real(r.closed.L_tilde_gamma);
  cj["L_tilde_sigma"] = real(r.closed.L_tilde_sigma);
  cj["L_tilde_beta_plus_gamma"] = real(r.closed.sum);
  o["closed_form"] = std::move(cj);
  o["closed_form_bound"] = real(r.closed_form_value);
  o["exact_quadrature"] = rates_json(r.exact);
  o["closed_form_rates"] = rates_json(r.closed_rates);
  Json flags = Json::array();
  if (r.exact.below_threshold) flags.push_back("lambda_below_threshold");
  for (const auto& [p, v] : r.nonpositive_c_lambda_p()) {
    flags.push_back("c_lambda_p_nonpositive:" + format_real(p));
  }
  o["flags"] = std::move(flags);
  return o;
}

Json to_json(const Prop1Constants& c) {
  Json o;
  o["p"] = c.p;
  o["c_as_bound"] = real(c.c_as_bound);
  o["c_p"] = real(c.c_p);
  o["c_p_nonpositive"] = c.c_p_nonpositive;
  return o;
}

Json to_json(const SimulationSpec& s) {
  Json o;
  o["x0"] = s.x0;
  o["y0"] = s.y0;
  o["T"] = s.T;
  o["dt"] = s.dt;
  o["seed"] = s.seed;
  o["paths"] = s.n_paths;
  o["coalescence_eps"] = s.coalescence_eps;
  return o;
}

Json to_json(const RateEstimate& r) {
  Json o;
  o["slope"] = real(r.slope);
  o["intercept"] = real(r.intercept);
  o["stderr"] = real(r.std_error);
  o["window"] = Json::array({real(r.t_start), real(r.t_end)});
  o["n_points"] = r.n_points;
  o["method"] = to_string(r.method);
  o["inconclusive"] = r.inconclusive;
  o["undersampled"] = r.undersampled;
  if (!r.note.empty()) o["note"] = r.note;
  return o;
}

Json to_json(const TheoreticalRates& t) {
  Json o;
  o["source"] = t.source;
  if (t.source == "transformed_constants") o["lambda"] = t.lambda;
  o["as_rate"] = real(t.as_rate_value);
  o["C_prefactor"] = real(t.C_prefactor);
  o["lp_exponent"] = p_map(t.lp_exponent);
  if (t.constants) o["constants"] = to_json(*t.constants);
  if (t.prop1_p2) o["prop1_p2"] = to_json(*t.prop1_p2);
  return o;
}

Json to_json(const VerificationReport& r) {
  Json o;
  o["simulation"] = to_json(r.spec);
  o["theoretical"] = to_json(r.theoretical);
  o["empirical_as_rate"] = to_json(r.empirical_as_rate);
  Json lp = Json::object();
  for (const auto& [p, e] : r.empirical_lp_rates) lp[format_real(p)] = to_json(e);
  o["empirical_lp_rates"] = std::move(lp);
  o["median_log10_drop"] = real(r.median_log10_drop);
  Json v = Json::array();
  for (const auto& d : r.verdicts) {
    Json e;
    e["claim"] = d.claim;
    e["status"] = to_string(d.status);
    e["margin"] = real(d.margin);
    e["note"] = d.note;
    v.push_back(std::move(e));
  }
  o["verdicts"] = std::move(v);
  return o;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace synchrosde
