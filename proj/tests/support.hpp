#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "synchrosde/funcspec.hpp"
#include "synchrosde/model.hpp"

namespace testing {

// SplitMix64: small, seedable, reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::uint64_t state_;
};

inline std::string num(double v) { return synchrosde::format_real(v); }

inline synchrosde::SDEModel canonical_model(double lambda = 2000.0) {
  synchrosde::SDEModel::Parts p;
  p.lambda = lambda;
  p.alpha = synchrosde::parse("sgn(x)*indicator[-1,1]");
  p.beta = synchrosde::parse("0");
  p.sigma = synchrosde::parse("1");
  return synchrosde::SDEModel(std::move(p));
}

inline synchrosde::SDEModel envelope_model(double lambda = 10.0) {
  synchrosde::SDEModel::Parts p;
  p.lambda = lambda;
  p.alpha = synchrosde::parse("sgn(x)*exp(-abs(x))");
  p.beta = synchrosde::parse("0");
  p.sigma = synchrosde::parse("1");
  p.mode = synchrosde::Mode::IntegrableEnvelope;
  p.envelope = synchrosde::parse("exp(-abs(x))");
  return synchrosde::SDEModel(std::move(p));
}

// σ = s0 + s1·cos(k x) with s0 - |s1| in [0.5, 1], so c_σ lies in [0.25, 1].
inline std::string random_sigma(Rng& r) {
  const double floor = r.uniform(0.5, 1.0);
  const double s1 = r.uniform(-0.3, 0.3);
  const double s0 = floor + std::abs(s1);
  return num(s0) + " + " + num(s1) + "*cos(" + num(r.uniform(0.2, 2.0)) + "*x)";
}

/// Compact-support singular drift with random amplitude and radius.
inline synchrosde::SDEModel random_compact_model(Rng& r, double lambda = 100.0) {
  const double a = r.uniform(0.1, 2.0);
  const double N = r.uniform(0.5, 2.5);
  std::string alpha;
  switch (r.integer(0, 3)) {
    case 0:
      alpha = num(a) + "*sgn(x)*indicator[" + num(-N) + "," + num(N) + "]";
      break;
    case 1:
      alpha = num(a) + "*indicator[" + num(-N) + "," + num(N / 3.0) + "]";
      break;
    case 2:
      alpha = num(a) + "*cos(" + num(r.uniform(0.5, 5.0)) + "*x)*indicator[" + num(-N) + "," +
              num(N) + "]";
      break;
    default:
      alpha = num(-a) + "*sgn(x - " + num(N / 4.0) + ")*indicator[" + num(-N) + "," + num(N) + "]";
      break;
  }
  synchrosde::SDEModel::Parts p;
  p.lambda = lambda;
  p.alpha = synchrosde::parse(alpha);
  p.beta = synchrosde::parse(num(r.uniform(-1.0, 1.0)) + "*sin(" + num(r.uniform(0.1, 1.0)) + "*x)");
  p.sigma = synchrosde::parse(random_sigma(r));
  return synchrosde::SDEModel(std::move(p));
}

/// Integrable-envelope model with an even exponential envelope.
inline synchrosde::SDEModel random_envelope_model(Rng& r, double lambda = 100.0) {
  const double A = r.uniform(0.1, 1.5);
  const double k = r.uniform(0.5, 3.0);
  const std::string g = num(A) + "*exp(" + num(-k) + "*abs(x))";
  std::string alpha;
  switch (r.integer(0, 2)) {
    case 0:
      alpha = "sgn(x)*" + g;
      break;
    case 1:
      alpha = g + "*cos(" + num(r.uniform(0.5, 4.0)) + "*x)";
      break;
    default:
      alpha = num(r.uniform(-1.0, 1.0)) + "*" + g;
      break;
  }
  synchrosde::SDEModel::Parts p;
  p.lambda = lambda;
  p.alpha = synchrosde::parse(alpha);
  p.beta = synchrosde::parse(num(r.uniform(-1.0, 1.0)) + "*sin(x)");
  p.sigma = synchrosde::parse(random_sigma(r));
  p.mode = synchrosde::Mode::IntegrableEnvelope;
  p.envelope = synchrosde::parse(g);
  return synchrosde::SDEModel(std::move(p));
}

/// Adaptive Simpson quadrature, independent of the library's tabulation.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                      int depth = 50) {
  const std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
          return left + right + (left + right - whole) / 15.0;
        }
        return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), depth);
}

}  // namespace testing
