#include "synchrosde/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "synchrosde/rng.hpp"

namespace synchrosde {

void check_spec(const SimulationSpec& s) {
  if (!(s.T > 0.0) || !std::isfinite(s.T)) throw ConfigError("T must be positive and finite");
  if (!(s.dt > 0.0) || !(s.dt <= s.T)) throw ConfigError("dt must satisfy 0 < dt <= T");
  if (s.T / s.dt > 1e8) throw ConfigError("T/dt exceeds 1e8 steps");
  if (s.n_paths < 1) throw ConfigError("n_paths must be >= 1");
  if (!(s.coalescence_eps >= 0.0)) throw ConfigError("coalescence_eps must be >= 0");
  if (!std::isfinite(s.x0) || !std::isfinite(s.y0)) throw ConfigError("initial values must be finite");
}

std::size_t step_count(const SimulationSpec& s) {
  return static_cast<std::size_t>(std::llround(s.T / s.dt));
}

Dynamics dynamics_of(const SDEModel& m) {
  const double lambda = m.lambda();
  return {[lambda, beta = m.beta(), alpha = m.alpha()](double x) {
            return -lambda * x + beta(x) + alpha(x);
          },
          [sigma = m.sigma()](double x) { return sigma(x); }};
}

Dynamics dynamics_of(const DissipativeModel& m) {
  return {[b = m.b()](double x) { return b(x); }, [sigma = m.sigma()](double x) { return sigma(x); }};
}

Dynamics dynamics_of(const TransformedModel& m) {
  return {[m](double y) { return m.drift(y); }, [m](double y) { return m.diffusion(y); }};
}

std::vector<double> wiener_increments(std::uint64_t seed, std::size_t n_steps, double dt,
                                      std::uint64_t path) {
  std::vector<double> dW(n_steps);
  fill_standard_normals(seed, path, dW);
  const double scale = std::sqrt(dt);
  for (double& v : dW) v *= scale;
  return dW;
}

TrajectoryPair em_pair(const Dynamics& dyn, const SimulationSpec& spec, std::uint64_t path) {
  check_spec(spec);
  return em_pair(dyn, spec, wiener_increments(spec.seed, step_count(spec), spec.dt, path), path);
}

TrajectoryPair em_pair(const Dynamics& dyn, const SimulationSpec& spec, std::vector<double> dW,
                       std::uint64_t path) {
  check_spec(spec);
  const std::size_t n = step_count(spec);
  if (dW.size() != n) throw ConfigError("need exactly one Wiener increment per step");
  TrajectoryPair tp;
  tp.path = path;
  tp.dW = std::move(dW);
  tp.times.resize(n + 1);
  tp.X.resize(n + 1);
  tp.Y.resize(n + 1);
  tp.X[0] = spec.x0;
  tp.Y[0] = spec.y0;
  tp.times[0] = 0.0;

  bool merged = spec.coalescence_eps > 0.0 && std::abs(spec.x0 - spec.y0) < spec.coalescence_eps;
  if (merged) {
    tp.Y[0] = tp.X[0];
    tp.coalesced_at = 0.0;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double x = tp.X[k], y = tp.Y[k], w = tp.dW[k];
    const double xn = x + dyn.drift(x) * spec.dt + dyn.diffusion(x) * w;
    const double yn = merged ? xn : y + dyn.drift(y) * spec.dt + dyn.diffusion(y) * w;
    tp.times[k + 1] = static_cast<double>(k + 1) * spec.dt;
    if (!std::isfinite(xn) || !std::isfinite(yn)) {
      throw SimulationError("non-finite state at step " + std::to_string(k + 1), k + 1, path);
    }
    tp.X[k + 1] = xn;
    tp.Y[k + 1] = yn;
    if (!merged && spec.coalescence_eps > 0.0 && std::abs(xn - yn) < spec.coalescence_eps) {
      merged = true;
      tp.Y[k + 1] = xn;
      tp.coalesced_at = tp.times[k + 1];
    }
  }
  return tp;
}

std::vector<double> em_path(const Dynamics& dyn, double x0, const SimulationSpec& spec,
                            std::uint64_t path) {
  check_spec(spec);
  const std::size_t n = step_count(spec);
  const std::vector<double> dW = wiener_increments(spec.seed, n, spec.dt, path);
  std::vector<double> X(n + 1);
  X[0] = x0;
  for (std::size_t k = 0; k < n; ++k) {
    X[k + 1] = X[k] + dyn.drift(X[k]) * spec.dt + dyn.diffusion(X[k]) * dW[k];
    if (!std::isfinite(X[k + 1])) {
      throw SimulationError("non-finite state at step " + std::to_string(k + 1), k + 1, path);
    }
  }
  return X;
}

double ode_baseline(double lambda, double x0, double t) {
  const double sg = x0 > 0.0 ? 1.0 : (x0 < 0.0 ? -1.0 : 0.0);
  return sg / lambda + (x0 - sg / lambda) * std::exp(-lambda * t);
}

std::size_t worker_count(std::size_t n) {
  std::size_t w = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SYNCHROSDE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) w = std::min(w, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(1, std::min(w, n));
}

}  // namespace synchrosde
