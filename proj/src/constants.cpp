#include "synchrosde/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "synchrosde/errors.hpp"

namespace synchrosde {

namespace {

double sup_gamma_minus_alpha(const SDEModel& m, const GammaConstruction& gc,
                             const ScaleTransform& t) {
  auto diff = [&](double x) { return std::abs(gc.gamma(x) - m.alpha()(x)); };
  double s = 0.0;
  for (double x : t.grid_x()) s = std::max(s, diff(x));
  // One-sided limits at breakpoints, extrapolated linearly from two probes.
  for (double b : t.breakpoints()) {
    const double off = one_sided_offset(b);
    const double left = 2.0 * (gc.gamma(b - off) - m.alpha()(b - off)) -
                        (gc.gamma(b - 2.0 * off) - m.alpha()(b - 2.0 * off));
    const double right = 2.0 * (gc.gamma(b + off) - m.alpha()(b + off)) -
                         (gc.gamma(b + 2.0 * off) - m.alpha()(b + 2.0 * off));
    s = std::max({s, diff(b - off), diff(b + off), std::abs(left), std::abs(right)});
  }
  return s;
}

double transformed_lipschitz(double L_s, double L_s_prime, double L_f, double sup_f) {
  return (L_s * L_f + sup_f * L_s_prime) * L_s;
}

// N_α for closed forms; α ≡ 0 needs none.
double support_for_bounds(const SDEModel& m) {
  if (m.alpha_sup() == 0.0) return m.N_alpha().value_or(0.0);
  const auto N = m.N_alpha();
  if (!N) throw ConfigError("alpha has no provable compact support");
  return *N;
}

}  // namespace

const char* to_string(Variant v) {
  return v == Variant::ExactQuadrature ? "exact_quadrature" : "closed_form";
}

LipschitzConstants lipschitz_constants(const SDEModel& m, const ScaleTransform& t,
                                       const GammaConstruction& gc) {
  LipschitzConstants out;
  out.c_sigma = m.c_sigma();
  if (!(out.c_sigma > kEllipticityTolerance)) {
    throw ConfigError("sigma is not uniformly elliptic; c_sigma unavailable");
  }
  out.L_s = t.L_s_exact();
  out.tail_truncated = t.tail_truncated();
  out.L_gamma = gc.L_gamma;
  out.sup_gamma = gc.sup_gamma;
  out.sup_gamma_minus_alpha = sup_gamma_minus_alpha(m, gc, t);
  out.L_s_prime = 2.0 * out.sup_gamma_minus_alpha / out.c_sigma * out.L_s;
  out.L_beta = m.L_beta();
  out.L_sigma = m.L_sigma();

  if (m.mode() == Mode::CompactSupport) {
    const double radius = support_for_bounds(m) + 1.0;
    out.sup_beta = m.local_sup_beta(radius);
    out.sup_sigma = m.local_sup_sigma(radius);
  } else {
    out.sup_beta = m.beta_profile().sup_norm();
    out.sup_sigma = m.sigma_profile().sup_norm();
  }

  out.L_tilde_beta = transformed_lipschitz(out.L_s, out.L_s_prime, out.L_beta, out.sup_beta);
  out.L_tilde_gamma = transformed_lipschitz(out.L_s, out.L_s_prime, out.L_gamma, out.sup_gamma);
  out.L_tilde_sigma = transformed_lipschitz(out.L_s, out.L_s_prime, out.L_sigma, out.sup_sigma);
  return out;
}

ClosedFormBounds closed_form_bounds(const SDEModel& m) {
  const double c = m.c_sigma();
  if (!(c > kEllipticityTolerance)) throw ConfigError("sigma is not uniformly elliptic");
  const double L_beta = m.L_beta();
  const double L_sigma = m.L_sigma();
  ClosedFormBounds b;

  if (m.mode() == Mode::CompactSupport) {
    const double a = m.alpha_sup();
    const double N = support_for_bounds(m);
    const double sup_beta = m.local_sup_beta(N + 1.0);
    const double sup_sigma = m.local_sup_sigma(N + 1.0);
    const double k = 4.0 * a / c;
    const double e16 = std::exp(16.0 * a * (N + 1.0) / (c * c));
    b.L_s = std::exp(8.0 * a * (N + 1.0) / (c * c));
    b.L_s_prime = k * b.L_s;
    b.L_tilde_beta = (L_beta + sup_beta * k) * e16;
    b.L_tilde_gamma = a * (1.0 + k) * e16;
    b.L_tilde_sigma = (L_sigma + sup_sigma * k) * e16;
    b.sum = (a + L_beta + (a + sup_beta) * k) * e16;
    return b;
  }

  if (!m.envelope_profile()) throw ConfigError("mode A3prime requires an envelope g");
  const FunctionProfile& gp = *m.envelope_profile();
  const double gs = gp.sup_norm();
  const double L_g = gp.lipschitz();
  const double l1 = gp.l1_norm().value_or(std::numeric_limits<double>::infinity());
  const double sup_beta = m.beta_profile().sup_norm();
  const double sup_sigma = m.sigma_profile().sup_norm();
  const double k = 4.0 * gs / c;
  const double e8 = std::exp(8.0 * l1 / (c * c));
  b.L_s = std::exp(4.0 * l1 / (c * c));
  b.L_s_prime = k * b.L_s;
  b.L_tilde_beta = (L_beta + sup_beta * k) * e8;
  b.L_tilde_gamma = (L_g + 8.0 * gs * gs / c) * e8;
  b.L_tilde_sigma = (L_sigma + sup_sigma * k) * e8;
  b.sum = (L_beta + L_g + (sup_beta + 2.0 * gs * gs) * k) * e8;
  return b;
}

double closed_form_bound(const SDEModel& m) { return closed_form_bounds(m).sum; }

double c_lambda_p(double c_lambda, double L_tilde_sigma, double p) {
  if (!(p >= 2.0)) throw DomainError("moment order p must be >= 2");
  return p * c_lambda - 0.5 * p * (p - 1.0) * L_tilde_sigma * L_tilde_sigma;
}

RateConstants rate_constants(Variant variant, double lambda, double L_s, double L_tilde_beta,
                             double L_tilde_gamma, double L_tilde_sigma,
                             std::span<const double> ps) {
  RateConstants r;
  r.variant = variant;
  r.L_s = L_s;
  r.L_tilde_beta = L_tilde_beta;
  r.L_tilde_gamma = L_tilde_gamma;
  r.L_tilde_sigma = L_tilde_sigma;
  r.lambda0 = 2.0 * (L_tilde_beta + L_tilde_gamma);
  r.c_lambda = lambda / 2.0 - L_tilde_beta - L_tilde_gamma;
  r.D_tilde_b_lower = r.c_lambda;
  r.C_prefactor = L_s;
  r.below_threshold = !(r.c_lambda > 0.0);
  for (double p : ps) r.c_lambda_p[p] = c_lambda_p(r.c_lambda, L_tilde_sigma, p);
  return r;
}

ConstantsReport synchronization_constants(const SDEModel& m, const GammaConstruction& gc,
                                          const LipschitzConstants& lip,
                                          std::span<const double> ps) {
  for (double p : ps) {
    if (!(p >= 2.0)) throw DomainError("moment order p must be >= 2");
  }
  ConstantsReport rep;
  rep.mode = m.mode();
  rep.lambda = m.lambda();
  rep.delta = gc.delta;
  rep.delta_clamped = gc.delta_clamped;
  rep.lipschitz = lip;
  rep.closed = closed_form_bounds(m);
  rep.closed_form_value = rep.closed.sum;
  rep.exact = rate_constants(Variant::ExactQuadrature, m.lambda(), lip.L_s, lip.L_tilde_beta,
                             lip.L_tilde_gamma, lip.L_tilde_sigma, ps);
  rep.closed_rates = rate_constants(Variant::ClosedForm, m.lambda(), rep.closed.L_s,
                             rep.closed.L_tilde_beta, rep.closed.L_tilde_gamma,
                             rep.closed.L_tilde_sigma, ps);
  return rep;
}

std::map<double, double> ConstantsReport::nonpositive_c_lambda_p() const {
  std::map<double, double> out;
  for (const auto& [p, v] : exact.c_lambda_p) {
    if (!(v > 0.0)) out[p] = v;
  }
  return out;
}

ConstantsReport compute_constants(const SDEModel& m, std::span<const double> ps) {
  const GammaConstruction gc = build_gamma(m);
  const ScaleTransform t = build_scale(m, gc);
  return synchronization_constants(m, gc, lipschitz_constants(m, t, gc), ps);
}

Prop1Constants prop1_constants(const DissipativeModel& dm, double p) {
  if (!(p >= 2.0)) throw DomainError("moment order p must be >= 2");
  if (!dm.is_dissipative()) throw ConfigError("drift b is not dissipative (D_b <= 0)");
  Prop1Constants out;
  out.p = p;
  out.c_as_bound = dm.D_b();
  out.c_p = dm.D_b() - 0.5 * (p - 1.0) * dm.L_sigma() * dm.L_sigma();
  out.c_p_nonpositive = !(out.c_p > 0.0);
  return out;
}

}  // namespace synchrosde
