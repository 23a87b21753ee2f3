#include "synchrosde/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "synchrosde/analyze.hpp"
#include "synchrosde/constants.hpp"
#include "synchrosde/errors.hpp"
#include "synchrosde/json_io.hpp"
#include "synchrosde/simulate.hpp"
#include "synchrosde/zvonkin.hpp"

namespace synchrosde {

namespace {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

class Log {
 public:
  Log(std::ostream& err, Level level) : err_(err), level_(level) {}
  void warn(const std::string& m) const { emit(Level::Warn, "warning", m); }
  void info(const std::string& m) const { emit(Level::Info, "info", m); }
  void debug(const std::string& m) const { emit(Level::Debug, "debug", m); }

 private:
  void emit(Level l, const char* tag, const std::string& m) const {
    if (static_cast<int>(l) <= static_cast<int>(level_)) err_ << tag << ": " << m << '\n';
  }
  std::ostream& err_;
  Level level_;
};

Level parse_level(const std::string& s) {
  if (s == "error") return Level::Error;
  if (s == "warn") return Level::Warn;
  if (s == "info") return Level::Info;
  if (s == "debug") return Level::Debug;
  throw ConfigError("unknown log level '" + s + "'");
}

/// Thrown after a validation report has been emitted.
struct ValidationFailed {};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << content;
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

void emit(std::ostream& out, const std::string& path, const std::string& content) {
  if (path.empty()) {
    out << content;
  } else {
    write_file(path, content);
  }
}

void report_failed_hypotheses(const ValidationReport& r, std::ostream& err) {
  for (const auto& h : r.results) {
    if (h.passed) continue;
    err << "hypothesis " << h.id << " FAILED: " << h.description;
    if (h.witness) err << " (witness x = " << format_real(*h.witness) << ")";
    err << '\n';
  }
}

void require_valid(const AnyModel& m, std::ostream& err) {
  const ValidationReport r = std::visit([](const auto& v) { return validate(v); }, m);
  if (!r.all_passed()) {
    report_failed_hypotheses(r, err);
    throw ValidationFailed{};
  }
}

struct SimOptions {
  double x0 = 0.0;
  double y0 = 1.0;
  double T = 10.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::size_t paths = 1;
  double coalesce_eps = 0.0;

  SimulationSpec spec() const {
    SimulationSpec s{x0, y0, T, dt, seed, paths, coalesce_eps};
    check_spec(s);
    return s;
  }
};

void add_sim_options(CLI::App* sub, SimOptions& o) {
  sub->add_option("--x0", o.x0, "initial value of X")->capture_default_str();
  sub->add_option("--y0", o.y0, "initial value of Y")->capture_default_str();
  sub->add_option("--T", o.T, "horizon")->capture_default_str();
  sub->add_option("--dt", o.dt, "time step")->capture_default_str();
  sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
  sub->add_option("--paths", o.paths, "number of trajectory pairs")->capture_default_str();
  sub->add_option("--coalesce-eps", o.coalesce_eps, "merge threshold (0 disables)")
      ->capture_default_str();
}

AnyModel apply_lambda(AnyModel m, const std::optional<double>& lambda) {
  if (!lambda) return m;
  if (auto* sde = std::get_if<SDEModel>(&m)) return sde->with_lambda(*lambda);
  throw ConfigError("--lambda applies only to models with a lambda");
}

Dynamics dynamics_of_any(const AnyModel& m) {
  return std::visit([](const auto& v) { return dynamics_of(v); }, m);
}

struct Pipeline {
  GammaConstruction gamma;
  std::shared_ptr<const ScaleTransform> transform;
  std::optional<TransformedModel> transformed;
  double min_slope = 0.0;
};

Pipeline build_pipeline(const SDEModel& m, const Log& log) {
  Pipeline p;
  p.gamma = build_gamma(m);
  log.debug("delta = " + format_real(p.gamma.delta) +
            (p.gamma.delta_clamped ? " (clamped to N_alpha)" : ""));
  p.transform = std::make_shared<const ScaleTransform>(build_scale(m, p.gamma));
  p.transformed.emplace(transformed_coefficients(m, p.transform, p.gamma));
  p.min_slope = check_slope(*p.transformed);
  log.info("minimum slope of the transformed identity: " + format_real(p.min_slope));
  return p;
}

std::string simulate_csv(const Dynamics& dyn, const SimulationSpec& spec, std::size_t stride) {
  const auto blocks = ensemble(dyn, spec, [&](const TrajectoryPair& tp) {
    std::string s;
    char buf[160];
    for (std::size_t k = 0; k < tp.times.size(); k += stride) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", tp.path, tp.times[k],
                    tp.X[k], tp.Y[k], std::abs(tp.X[k] - tp.Y[k]));
      s += buf;
    }
    const std::size_t last = tp.times.size() - 1;
    if (last % stride != 0) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", tp.path, tp.times[last],
                    tp.X[last], tp.Y[last], std::abs(tp.X[last] - tp.Y[last]));
      s += buf;
    }
    return s;
  });
  std::string csv = "path,t,X,Y,absdiff\n";
  for (const auto& b : blocks) csv += b;
  return csv;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synchronization analysis for scalar SDEs with singular drift", "synchrosde"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string dump_model_path;
  std::string log_level = "warn";
  app.add_option("--dump-model", dump_model_path, "write the parsed model as JSON");
  app.add_option("--log-level", log_level, "error|warn|info|debug")->capture_default_str();

  std::string model_path;
  std::string out_path;

  auto* validate_cmd = app.add_subcommand("validate", "check model hypotheses");
  validate_cmd->add_option("--model", model_path, "model JSON")->required();
  validate_cmd->add_option("--out", out_path, "report file (default stdout)");

  std::vector<double> ps{2.0};
  std::optional<double> lambda_override;
  auto* constants_cmd = app.add_subcommand("constants", "compute synchronization constants");
  constants_cmd->add_option("--model", model_path, "model JSON")->required();
  constants_cmd->add_option("--p", ps, "moment orders (>= 2)")->delimiter(',');
  constants_cmd->add_option("--lambda", lambda_override, "override lambda");
  constants_cmd->add_option("--out", out_path, "report file (default stdout)");

  std::string transform_csv;
  auto* transform_cmd = app.add_subcommand("transform", "tabulate the scale transform");
  transform_cmd->add_option("--model", model_path, "model JSON")->required();
  transform_cmd->add_option("--dump-transform", transform_csv, "CSV of x, s, s', gamma, alpha, slope");
  transform_cmd->add_option("--out", out_path, "summary file (default stdout)");

  SimOptions sim;
  std::size_t stride = 1;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate coupled trajectory pairs");
  simulate_cmd->add_option("--model", model_path, "model JSON")->required();
  add_sim_options(simulate_cmd, sim);
  simulate_cmd->add_option("--lambda", lambda_override, "override lambda");
  simulate_cmd->add_option("--stride", stride, "write every stride-th step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate_cmd->add_option("--out", out_path, "CSV file (default stdout)");

  std::size_t samples = 51;
  std::string rates_csv;
  auto* verify_cmd = app.add_subcommand("verify", "compare empirical and guaranteed rates");
  verify_cmd->add_option("--model", model_path, "model JSON")->required();
  add_sim_options(verify_cmd, sim);
  verify_cmd->add_option("--p", ps, "moment orders (>= 2)")->delimiter(',');
  verify_cmd->add_option("--lambda", lambda_override, "override lambda");
  verify_cmd->add_option("--samples", samples, "sample times for moments")
      ->check(CLI::Range(static_cast<std::size_t>(3), static_cast<std::size_t>(100000)))
      ->capture_default_str();
  verify_cmd->add_option("--out", out_path, "report file (default stdout)");
  verify_cmd->add_option("--rates-csv", rates_csv, "per-path a.s. slopes");

  std::vector<std::string> argv_store{"synchrosde"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const Log log(err, parse_level(log_level));
    AnyModel model = apply_lambda(load_model(model_path), lambda_override);
    if (!dump_model_path.empty()) write_file(dump_model_path, dump(to_json(model)));

    if (validate_cmd->parsed()) {
      const ValidationReport r = std::visit([](const auto& v) { return validate(v); }, model);
      emit(out, out_path, dump(to_json(r)));
      if (!r.all_passed()) {
        report_failed_hypotheses(r, err);
        return kExitValidation;
      }
      return kExitOk;
    }

    if (constants_cmd->parsed()) {
      require_valid(model, err);
      if (const auto* dm = std::get_if<DissipativeModel>(&model)) {
        Json o;
        o["source"] = "dissipative_drift";
        o["D_b"] = dm->D_b();
        o["L_sigma"] = dm->L_sigma();
        Json arr = Json::array();
        for (double p : ps) arr.push_back(to_json(prop1_constants(*dm, p)));
        o["rates"] = std::move(arr);
        emit(out, out_path, dump(o));
        return kExitOk;
      }
      const SDEModel& m = std::get<SDEModel>(model);
      const Pipeline p = build_pipeline(m, log);
      const ConstantsReport rep = synchronization_constants(
          m, p.gamma, lipschitz_constants(m, *p.transform, p.gamma), ps);
      if (rep.exact.below_threshold) {
        log.warn("lambda = " + format_real(m.lambda()) + " is below lambda0 = " +
                 format_real(rep.exact.lambda0));
      }
      Json o = to_json(rep);
      o["min_tilde_id_slope"] = p.min_slope;
      emit(out, out_path, dump(o));
      return kExitOk;
    }

    if (transform_cmd->parsed()) {
      const auto* m = std::get_if<SDEModel>(&model);
      if (!m) throw ConfigError("transform requires a model with a singular drift alpha");
      require_valid(model, err);
      const GammaConstruction gc = build_gamma(*m);
      const auto t = std::make_shared<const ScaleTransform>(build_scale(*m, gc));
      if (!transform_csv.empty()) {
        std::ostringstream csv;
        write_transform_csv(csv, *m, gc, *t);
        write_file(transform_csv, csv.str());
      }
      const TransformedModel tm = transformed_coefficients(*m, t, gc);
      const SlopeScan scan = scan_slope(tm);
      Json o;
      o["delta"] = std::isfinite(gc.delta) ? Json(gc.delta) : Json(nullptr);
      o["delta_clamped"] = gc.delta_clamped;
      o["L_s"] = t->L_s_exact();
      o["tail_truncated"] = t->tail_truncated();
      o["grid_points"] = t->grid_x().size();
      o["s_range"] = Json::array({t->s_values().front(), t->s_values().back()});
      o["min_tilde_id_slope"] = scan.min_slope;
      o["min_slope_at_y"] = scan.min_at_y;
      emit(out, out_path, dump(o));
      if (scan.violation_y) {
        err << "slope of the transformed identity drops below 1/2 near y = "
            << format_real(*scan.violation_y) << '\n';
        return kExitConstruction;
      }
      return kExitOk;
    }

    if (simulate_cmd->parsed()) {
      const ValidationReport r = std::visit([](const auto& v) { return validate(v); }, model);
      if (!r.all_passed()) log.warn("model fails some hypotheses; simulating anyway");
      emit(out, out_path, simulate_csv(dynamics_of_any(model), sim.spec(), stride));
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      require_valid(model, err);
      const SimulationSpec spec = sim.spec();
      TheoreticalRates theory;
      double lambda = 0.0;
      if (const auto* dm = std::get_if<DissipativeModel>(&model)) {
        theory = theoretical_rates(*dm, ps);
      } else {
        const SDEModel& m = std::get<SDEModel>(model);
        const Pipeline p = build_pipeline(m, log);
        theory = theoretical_rates(synchronization_constants(
            m, p.gamma, lipschitz_constants(m, *p.transform, p.gamma), ps));
        lambda = m.lambda();
      }
      std::vector<std::optional<LineFit>> fits;
      const VerificationReport rep =
          verify_model(dynamics_of_any(model), theory, lambda, spec, ps, samples, &fits);
      if (!rates_csv.empty()) {
        std::ostringstream csv;
        write_rates_csv(csv, fits);
        write_file(rates_csv, csv.str());
      }
      emit(out, out_path, dump(to_json(rep)));
      write_verdict_table(out_path.empty() ? err : out, rep);
      return kExitOk;
    }
  } catch (const ValidationFailed&) {
    return kExitValidation;
  } catch (const ConstructionError& e) {
    err << "construction error: " << e.what() << '\n';
    return kExitConstruction;
  } catch (const RefinementError& e) {
    err << "refinement error: " << e.what() << '\n';
    return kExitConstruction;
  } catch (const SimulationError& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitConstruction;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace synchrosde
