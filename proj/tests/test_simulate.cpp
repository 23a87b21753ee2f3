#include <cmath>
#include <cstdlib>
#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "synchrosde/errors.hpp"
#include "synchrosde/rng.hpp"
#include "synchrosde/simulate.hpp"

using namespace synchrosde;

namespace {

Dynamics linear(double lambda, double sigma0) {
  return {[lambda](double x) { return -lambda * x; }, [sigma0](double) { return sigma0; }};
}

Dynamics geometric(double lambda) {
  return {[lambda](double x) { return -lambda * x; }, [](double x) { return x; }};
}

struct ThreadsEnv {
  explicit ThreadsEnv(const char* v) { setenv("SYNCHROSDE_THREADS", v, 1); }
  ~ThreadsEnv() { unsetenv("SYNCHROSDE_THREADS"); }
};

}  // namespace

TEST_CASE("philox known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms stay strictly inside the unit interval") {
  CHECK(uniform_open(0, 0) > 0.0);
  CHECK(uniform_open(0xffffffffu, 0xffffffffu) < 1.0);
  CHECK(uniform_open(0x80000000u, 0) == doctest::Approx(0.5));
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-15));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-15));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-14));
  CHECK(normal_quantile(1e-300) == doctest::Approx(-37.0470962993612).epsilon(1e-12));
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
  testing::Rng r(8);
  for (int i = 0; i < 2000; ++i) {
    const double p = r.uniform(1e-6, 1.0 - 1e-6);
    const double z = normal_quantile(p);
    const double back = 0.5 * std::erfc(-z / std::sqrt(2.0));
    CHECK(back == doctest::Approx(p).epsilon(1e-13));
  }
}

TEST_CASE("wiener increments are reproducible with the right moments") {
  const double dt = 1e-3;
  const auto a = wiener_increments(42, 1000000, dt);
  const auto b = wiener_increments(42, 1000000, dt);
  CHECK(a == b);
  CHECK(a != wiener_increments(43, 1000000, dt));
  CHECK(a != wiener_increments(42, 1000000, dt, 1));
  const double n = static_cast<double>(a.size());
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean);
  var /= n - 1.0;
  CHECK(std::abs(mean) <= 4.0 * std::sqrt(dt / n));
  CHECK(std::abs(var / dt - 1.0) <= 0.01);
  for (std::size_t i : {0u, 1u, 2u, 999u, 12345u}) {
    CHECK(a[i] == standard_normal(42, 0, i) * std::sqrt(dt));
  }
}

TEST_CASE("noiseless singular drift follows the ODE") {
  const Dynamics d{[](double x) { return -x + (x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0)); },
                   [](double) { return 0.0; }};
  SimulationSpec s;
  s.x0 = 2.0;
  s.y0 = -2.0;
  s.T = 10.0;
  s.dt = 1e-3;
  const auto tp = em_pair(d, s);
  for (std::size_t k = 0; k < tp.times.size(); ++k) {
    CHECK(std::abs(tp.X[k] - ode_baseline(1.0, 2.0, tp.times[k])) <= 5 * s.dt);
    CHECK(std::abs(tp.Y[k] - ode_baseline(1.0, -2.0, tp.times[k])) <= 5 * s.dt);
  }
  CHECK(tp.X.back() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(tp.Y.back() == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("ode baseline") {
  CHECK(ode_baseline(1.0, 2.0, 1.0) == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-15));
  CHECK(ode_baseline(1.0, 2.0, 100.0) == doctest::Approx(1.0));
  CHECK(ode_baseline(1.0, -2.0, 100.0) == doctest::Approx(-1.0));
  CHECK(ode_baseline(1.0, 0.0, 3.0) == 0.0);
}

TEST_CASE("common noise cancels for additive noise") {
  SimulationSpec s;
  s.x0 = -1.0;
  s.y0 = 2.0;
  s.T = 5.0;
  s.dt = 1e-3;
  s.seed = 9;
  s.n_paths = 100;
  const double lambda = 1.5;
  const auto errs = ensemble(linear(lambda, 1.0), s, [&](const TrajectoryPair& tp) {
    double worst = 0.0;
    double scale = 1.0;
    for (std::size_t k = 0; k < tp.X.size(); ++k) {
      scale = std::max({scale, std::abs(tp.X[k]), std::abs(tp.Y[k])});
      const double exact = std::pow(1.0 - lambda * s.dt, static_cast<double>(k)) * (s.x0 - s.y0);
      const double allowed = 64.0 * 2.220446049250313e-16 * static_cast<double>(k + 1) * scale;
      worst = std::max(worst, std::abs(tp.X[k] - tp.Y[k] - exact) / allowed);
    }
    return worst;
  });
  for (double e : errs) CHECK(e <= 1.0);
}

TEST_CASE("both trajectories consume the same increments") {
  SimulationSpec s;
  s.x0 = 0.3;
  s.y0 = -0.7;
  s.T = 1.0;
  s.dt = 0.01;
  s.seed = 5;
  const Dynamics d = geometric(1.0);
  const auto tp = em_pair(d, s, 3);
  CHECK(tp.dW == wiener_increments(5, 100, 0.01, 3));
  for (std::size_t k = 0; k + 1 < tp.X.size(); ++k) {
    CHECK(tp.X[k + 1] == tp.X[k] + d.drift(tp.X[k]) * s.dt + d.diffusion(tp.X[k]) * tp.dW[k]);
    CHECK(tp.Y[k + 1] == tp.Y[k] + d.drift(tp.Y[k]) * s.dt + d.diffusion(tp.Y[k]) * tp.dW[k]);
  }
  CHECK(tp.X.size() == 101);
  CHECK(tp.times.back() == doctest::Approx(1.0));
}

TEST_CASE("geometric difference converges strongly") {
  const double T = 1.0;
  auto mean_error = [&](double dt_fine, bool coarse) {
    double total = 0.0;
    const int paths = 200;
    for (int p = 0; p < paths; ++p) {
      const auto n_fine = static_cast<std::size_t>(std::llround(T / dt_fine));
      const auto fine = wiener_increments(77, n_fine, dt_fine, static_cast<std::uint64_t>(p));
      std::vector<double> dW = fine;
      double dt = dt_fine;
      if (coarse) {
        dW.clear();
        for (std::size_t i = 0; i + 1 < fine.size(); i += 2) dW.push_back(fine[i] + fine[i + 1]);
        dt *= 2.0;
      }
      SimulationSpec s;
      s.x0 = 1.0;
      s.y0 = 2.0;
      s.T = T;
      s.dt = dt;
      const auto tp = em_pair(geometric(1.0), s, dW);
      double w = 0.0, worst = 0.0;
      for (std::size_t k = 0; k < tp.X.size(); ++k) {
        if (k > 0) w += dW[k - 1];
        const double z = (s.y0 - s.x0) * std::exp(-1.5 * tp.times[k] + w);
        worst = std::max(worst, std::abs((tp.Y[k] - tp.X[k]) - z));
      }
      total += worst;
    }
    return total / paths;
  };
  const double e_coarse = mean_error(1e-3, true);
  const double e_fine = mean_error(1e-3, false);
  const double ratio = e_coarse / e_fine;
  MESSAGE("strong error ratio under step halving: " << ratio);
  CHECK(ratio >= 0.7 * std::sqrt(2.0));
  CHECK(ratio <= 1.3 * 2.0);
}

TEST_CASE("coalescence clamping") {
  SimulationSpec s;
  s.x0 = 0.0;
  s.y0 = 1.0;
  s.T = 10.0;
  s.dt = 1e-3;
  s.seed = 1;
  s.coalescence_eps = 1e-3;
  const auto tp = em_pair(linear(2.0, 1.0), s);
  REQUIRE(tp.coalesced_at);
  bool merged = false;
  for (std::size_t k = 0; k < tp.X.size(); ++k) {
    if (merged) CHECK(tp.X[k] == tp.Y[k]);
    if (std::abs(tp.X[k] - tp.Y[k]) < s.coalescence_eps) merged = true;
  }
  CHECK(merged);
  s.coalescence_eps = 0.0;
  CHECK_FALSE(em_pair(linear(2.0, 1.0), s).coalesced_at);
}

TEST_CASE("ensemble results do not depend on scheduling") {
  SimulationSpec s;
  s.x0 = -1.0;
  s.y0 = 1.0;
  s.T = 2.0;
  s.dt = 1e-2;
  s.seed = 123;
  s.n_paths = 17;
  auto last = [](const TrajectoryPair& tp) { return std::make_pair(tp.X.back(), tp.Y.back()); };
  std::vector<std::pair<double, double>> one, many;
  {
    ThreadsEnv env("1");
    one = ensemble(geometric(1.0), s, last);
  }
  {
    ThreadsEnv env("4");
    many = ensemble(geometric(1.0), s, last);
  }
  CHECK(one == many);
  for (std::size_t i = 0; i < s.n_paths; ++i) CHECK(one[i] == last(em_pair(geometric(1.0), s, i)));
  s.n_paths = 1;
  CHECK(ensemble(geometric(1.0), s, last)[0] == last(em_pair(geometric(1.0), s)));
}

TEST_CASE("blow-up is reported with step and path") {
  SimulationSpec s;
  s.x0 = 10.0;
  s.y0 = 11.0;
  s.T = 10.0;
  s.dt = 0.1;
  s.n_paths = 3;
  const Dynamics d{[](double x) { return x * x * x; }, [](double) { return 0.0; }};
  try {
    ensemble(d, s, [](const TrajectoryPair& tp) { return tp.X.back(); });
    FAIL("expected a simulation error");
  } catch (const SimulationError& e) {
    CHECK(e.path().value() == 0);
    CHECK(e.step() > 0);
    CHECK(e.step() < 10);
  }
}

TEST_CASE("simulation spec validation") {
  SimulationSpec s;
  s.T = 1.0;
  s.dt = 2.0;
  CHECK_THROWS_AS(check_spec(s), ConfigError);
  s.dt = 1e-9;
  s.T = 1.0;
  CHECK_THROWS_AS(check_spec(s), ConfigError);
  s.dt = 0.1;
  s.n_paths = 0;
  CHECK_THROWS_AS(check_spec(s), ConfigError);
  s.n_paths = 1;
  s.coalescence_eps = -1.0;
  CHECK_THROWS_AS(check_spec(s), ConfigError);
}
