#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "synchrosde/errors.hpp"
#include "synchrosde/model.hpp"
#include "synchrosde/zvonkin.hpp"

namespace synchrosde {

struct SimulationSpec {
  double x0 = 0.0;
  double y0 = 1.0;
  double T = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::size_t n_paths = 1;
  double coalescence_eps = 0.0;  // 0 disables clamping
};

/// Throws ConfigError unless T > 0, 0 < dt <= T, T/dt <= 1e8, n_paths >= 1
/// and coalescence_eps >= 0.
void check_spec(const SimulationSpec& spec);

/// round(T/dt).
std::size_t step_count(const SimulationSpec& spec);

struct TrajectoryPair {
  std::size_t path = 0;
  std::vector<double> times;
  std::vector<double> X;
  std::vector<double> Y;
  std::vector<double> dW;  // shared by X and Y
  std::optional<double> coalesced_at;
};

/// Drift and diffusion of a scalar SDE.
struct Dynamics {
  std::function<double(double)> drift;
  std::function<double(double)> diffusion;
};

/// -λx + β + α and σ.
Dynamics dynamics_of(const SDEModel& model);
/// b and σ.
Dynamics dynamics_of(const DissipativeModel& model);
/// b̃ and σ̃.
Dynamics dynamics_of(const TransformedModel& model);

/// Gaussian(0, dt) increments of path `path` under `seed`.
std::vector<double> wiener_increments(std::uint64_t seed, std::size_t n_steps, double dt,
                                      std::uint64_t path = 0);

/// Left-point Euler-Maruyama for both X (from x0) and Y (from y0) on one
/// Wiener path. Throws SimulationError on a non-finite state.
TrajectoryPair em_pair(const Dynamics& dyn, const SimulationSpec& spec, std::uint64_t path = 0);
/// Same scheme on caller-supplied increments (one per step).
TrajectoryPair em_pair(const Dynamics& dyn, const SimulationSpec& spec, std::vector<double> dW,
                       std::uint64_t path = 0);

/// Single Euler-Maruyama trajectory on the same Wiener path em_pair would use.
std::vector<double> em_path(const Dynamics& dyn, double x0, const SimulationSpec& spec,
                            std::uint64_t path = 0);

/// sgn(x)/λ + (x - sgn(x)/λ)e^{-λt}: solution of u' = -λu + sgn(u).
double ode_baseline(double lambda, double x0, double t);

/// min(hardware threads, SYNCHROSDE_THREADS, n), at least 1.
std::size_t worker_count(std::size_t n);

/// Runs f(path) for path = 0..n-1 on worker threads; results are indexed by
/// path, so scheduling does not affect them. The error of the lowest failing
/// path is rethrown.
template <class F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = worker_count(n);
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// em_pair for every path, each reduced by `reduce` as soon as it is produced.
template <class Reduce>
auto ensemble(const Dynamics& dyn, const SimulationSpec& spec, Reduce&& reduce) {
  check_spec(spec);
  return parallel_map(spec.n_paths, [&](std::size_t i) {
    try {
      return reduce(em_pair(dyn, spec, i));
    } catch (const SimulationError& e) {
      throw SimulationError(std::string(e.what()) + " (path " + std::to_string(i) + ")",
                            e.step(), i);
    }
  });
}

}  // namespace synchrosde
