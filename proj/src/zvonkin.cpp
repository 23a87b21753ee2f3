#include "synchrosde/zvonkin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "synchrosde/errors.hpp"
#include "synchrosde/profile.hpp"

namespace synchrosde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_even_on_grid(const FunctionDescriptor& g, const GridSpec& grid) {
  for (double x : make_grid(grid)) {
    if (x < 0.0) continue;
    const double a = g(x), b = g(-x);
    if (std::abs(a - b) > 1e-15 * std::max(1.0, std::abs(a))) return false;
  }
  return true;
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

GammaConstruction gamma_compact(const SDEModel& m, double a, double delta) {
  const auto N = m.N_alpha();
  if (!N) throw ConfigError("alpha has no provable compact support");
  if (!(*N > 0.0)) throw ConfigError("alpha support radius must be positive");

  GammaConstruction gc;
  gc.mode = Mode::CompactSupport;
  if (delta >= *N) {
    delta = *N;
    gc.delta_clamped = true;
  }
  gc.delta = delta;

  const double n = *N;
  std::vector<Knot> knots;
  if (gc.delta_clamped) {
    knots = {{-n - 1.0, 0.0}, {-n, -a}, {n, a}, {n + 1.0, 0.0}};
  } else {
    knots = {{-n - 1.0, 0.0}, {-n, -a}, {-delta, -a}, {delta, a}, {n, a}, {n + 1.0, 0.0}};
  }
  for (const Knot& k : knots) gc.breakpoints.push_back(k.x);
  gc.breakpoints.push_back(0.0);
  sort_unique(gc.breakpoints);

  gc.gamma = FunctionDescriptor(expr::piecewise_linear(std::move(knots)));
  gc.L_gamma = std::max(a / delta, a);
  gc.sup_gamma = a;
  gc.l1_gamma = 2.0 * (0.5 * a * delta + a * (n - delta) + 0.5 * a);
  return gc;
}

GammaConstruction gamma_envelope(const SDEModel& m, double delta) {
  if (!m.envelope()) throw ConfigError("mode A3prime requires an envelope g");
  const FunctionDescriptor& g = *m.envelope();
  const bool even = is_even_on_grid(g, m.grid());

  using namespace expr;
  const NodePtr absx = unary(Op::Abs, var());
  const NodePtr clamped = binary(Op::Max, absx, constant(delta));
  NodePtr profile_part = compose(g.root_ptr(), clamped);
  if (!even) {
    profile_part =
        binary(Op::Max, profile_part, compose(g.root_ptr(), unary(Op::Neg, clamped)));
  }
  const NodePtr ramp = binary(Op::Min, binary(Op::Div, absx, constant(delta)), constant(1.0));
  const NodePtr root =
      binary(Op::Mul, binary(Op::Mul, ramp, unary(Op::Sgn, var())), profile_part);

  GammaConstruction gc;
  gc.mode = Mode::IntegrableEnvelope;
  gc.delta = delta;
  gc.gamma = FunctionDescriptor(root);
  gc.breakpoints = {-delta, 0.0, delta};
  for (double b : g.breakpoints()) {
    if (std::abs(b) >= delta) {
      gc.breakpoints.push_back(std::abs(b));
      gc.breakpoints.push_back(-std::abs(b));
    }
  }
  sort_unique(gc.breakpoints);

  const double g_delta = gc.gamma(delta);
  const double L_g = m.envelope_profile()->lipschitz();
  gc.L_gamma = std::max(g_delta / delta, L_g);

  const FunctionProfile gp = profile(gc.gamma, m.grid());
  gc.sup_gamma = gp.sup_norm_est;
  const auto tail = g.tail_mass_bound(m.grid().R);
  gc.l1_gamma = gp.l1_norm_est.value_or(0.0) + (tail ? (even ? 1.0 : 2.0) * *tail : 0.0);
  return gc;
}

}  // namespace

GammaConstruction build_gamma(const SDEModel& m) {
  if (m.mode() == Mode::IntegrableEnvelope && !m.envelope()) {
    throw ConfigError("mode A3prime requires an envelope g");
  }
  const double a = m.alpha_sup();
  if (a == 0.0) {
    GammaConstruction gc;
    gc.mode = m.mode();
    gc.delta = kInf;
    return gc;
  }
  const double c = m.c_sigma();
  if (!(c > kEllipticityTolerance)) throw ConfigError("sigma is not uniformly elliptic");
  const double delta = c / (4.0 * a);
  return m.mode() == Mode::CompactSupport ? gamma_compact(m, a, delta)
                                          : gamma_envelope(m, delta);
}

// ---------------------------------------------------------------------------

ScaleTransform::ScaleTransform(std::vector<double> x, std::vector<double> s,
                               std::vector<double> s_prime, double L_s_exact,
                               bool tail_truncated, std::vector<double> breakpoints)
    : x_(std::move(x)),
      s_(std::move(s)),
      sp_(std::move(s_prime)),
      L_s_(L_s_exact),
      tail_truncated_(tail_truncated),
      breakpoints_(std::move(breakpoints)) {
  if (x_.size() < 2 || s_.size() != x_.size() || sp_.size() != x_.size()) {
    throw DomainError("scale table needs at least two nodes of equal-length columns");
  }
}

std::size_t ScaleTransform::cell_of(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto i = static_cast<std::size_t>(it - x_.begin());
  return std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
}

double ScaleTransform::scale(double x) const {
  if (x <= x_.front()) return s_.front() + sp_.front() * (x - x_.front());
  if (x >= x_.back()) return s_.back() + sp_.back() * (x - x_.back());
  const std::size_t i = cell_of(x);
  const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return s_[i] + w * (s_[i + 1] - s_[i]);
}

double ScaleTransform::scale_prime(double x) const {
  if (x <= x_.front()) return sp_.front();
  if (x >= x_.back()) return sp_.back();
  const std::size_t i = cell_of(x);
  const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return sp_[i] + w * (sp_[i + 1] - sp_[i]);
}

double ScaleTransform::inversion_tol(double y) const {
  return 1e-12 * std::max(1.0, std::abs(y));
}

double ScaleTransform::inverse(double y) const {
  if (y <= s_.front()) return x_.front() + (y - s_.front()) / sp_.front();
  if (y >= s_.back()) return x_.back() + (y - s_.back()) / sp_.back();

  // Locate the monotone cell, solve the linear piece, then bisect if the
  // residual is still above tolerance.
  const auto it = std::upper_bound(s_.begin(), s_.end(), y);
  const std::size_t i =
      std::clamp<std::size_t>(static_cast<std::size_t>(it - s_.begin()), 1, s_.size() - 1) - 1;
  double lo = x_[i], hi = x_[i + 1];
  double guess = lo + (y - s_[i]) * (hi - lo) / (s_[i + 1] - s_[i]);
  guess = std::clamp(guess, lo, hi);
  const double tol = inversion_tol(y);
  if (std::abs(scale(guess) - y) <= tol) return guess;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double r = scale(mid) - y;
    if (std::abs(r) <= tol) return mid;
    (r < 0.0 ? lo : hi) = mid;
    if (hi - lo <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

double scale(const ScaleTransform& t, double x) { return t.scale(x); }
double scale_prime(const ScaleTransform& t, double x) { return t.scale_prime(x); }
double inverse_scale(const ScaleTransform& t, double y) { return t.inverse(y); }

ScaleTransform build_scale(const SDEModel& m, const GammaConstruction& gc) {
  return build_scale(m, gc, m.grid().R, m.grid().h);
}

ScaleTransform build_scale(const SDEModel& m, const GammaConstruction& gc, double R, double h) {
  const double c = m.c_sigma();
  if (!(c > kEllipticityTolerance)) throw ConfigError("sigma is not uniformly elliptic");

  if (m.mode() == Mode::CompactSupport && m.alpha_sup() > 0.0) {
    const auto N = m.N_alpha();
    if (!N) throw ConfigError("alpha has no provable compact support");
    if (!(R > *N + 1.0)) {
      throw ConfigError("grid radius must exceed N_alpha + 1 to cover the support of alpha - gamma");
    }
  }

  std::vector<double> bps = m.alpha().breakpoints();
  for (const auto& extra : {gc.breakpoints, m.sigma().breakpoints()}) {
    bps.insert(bps.end(), extra.begin(), extra.end());
  }
  bps.push_back(0.0);
  std::erase_if(bps, [R](double b) { return b < -R || b > R; });
  sort_unique(bps);

  const std::vector<double> x = make_grid({R, h}, bps);
  const std::size_t n = x.size();

  const auto& alpha = m.alpha();
  const auto& gamma = gc.gamma;
  const auto& sigma = m.sigma();
  auto integrand = [&](double z) {
    const double sg = sigma(z);
    return (alpha(z) - gamma(z)) / (sg * sg);
  };
  auto abs_integrand = [&](double z) { return std::abs(integrand(z)); };

  std::vector<double> q(n), aq(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = integrand(x[i]);
    aq[i] = std::abs(q[i]);
  }
  const std::vector<double> cells = cell_integrals(x, q, integrand, bps);
  const std::vector<double> abs_cells = cell_integrals(x, aq, abs_integrand, bps);

  const auto zero_it = std::lower_bound(x.begin(), x.end(), 0.0);
  const auto i0 = static_cast<std::size_t>(zero_it - x.begin());

  // I(y) = 2∫_0^y (α-γ)/σ², s' = exp(-I).
  std::vector<double> I(n, 0.0);
  for (std::size_t i = i0 + 1; i < n; ++i) I[i] = I[i - 1] + 2.0 * cells[i - 1];
  for (std::size_t i = i0; i-- > 0;) I[i] = I[i + 1] - 2.0 * cells[i];

  std::vector<double> sp(n);
  for (std::size_t i = 0; i < n; ++i) sp[i] = std::exp(-I[i]);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(sp[i + 1] / sp[i] - 1.0) > 0.1) {
      throw RefinementError("scale derivative varies by more than 10% between x = " +
                            format_real(x[i]) + " and " + format_real(x[i + 1]) +
                            "; use a smaller grid step");
    }
  }

  std::vector<double> s(n, 0.0);
  for (std::size_t i = i0 + 1; i < n; ++i) {
    s[i] = s[i - 1] + 0.5 * (sp[i - 1] + sp[i]) * (x[i] - x[i - 1]);
  }
  for (std::size_t i = i0; i-- > 0;) {
    s[i] = s[i + 1] - 0.5 * (sp[i] + sp[i + 1]) * (x[i + 1] - x[i]);
  }

  double mass = 0.0;
  for (double v : abs_cells) mass += v;

  bool truncated = false;
  if (m.mode() == Mode::IntegrableEnvelope && m.envelope() && m.alpha_sup() > 0.0) {
    // Beyond R: |α - γ| <= |α| + |γ| <= g + (symmetrized g).
    const bool even = is_even_on_grid(*m.envelope(), m.grid());
    if (const auto tail = m.envelope()->tail_mass_bound(R)) {
      mass += (even ? 2.0 : 3.0) * *tail / c;
    } else {
      truncated = true;
    }
  }
  const double L_s = std::exp(2.0 * mass);
  return ScaleTransform(x, std::move(s), std::move(sp), L_s, truncated, std::move(bps));
}

// ---------------------------------------------------------------------------

TransformedModel::TransformedModel(double lambda, FunctionDescriptor beta,
                                   FunctionDescriptor gamma, FunctionDescriptor sigma,
                                   std::shared_ptr<const ScaleTransform> transform)
    : lambda_(lambda),
      beta_(std::move(beta)),
      gamma_(std::move(gamma)),
      sigma_(std::move(sigma)),
      transform_(std::move(transform)) {
  if (!transform_) throw DomainError("null scale transform");
}

double TransformedModel::tilde_id(double y) const {
  const double u = transform_->inverse(y);
  return transform_->scale_prime(u) * u;
}

double TransformedModel::tilde_beta(double y) const {
  const double u = transform_->inverse(y);
  return transform_->scale_prime(u) * beta_(u);
}

double TransformedModel::tilde_gamma(double y) const {
  const double u = transform_->inverse(y);
  return transform_->scale_prime(u) * gamma_(u);
}

double TransformedModel::tilde_sigma(double y) const {
  const double u = transform_->inverse(y);
  return transform_->scale_prime(u) * sigma_(u);
}

double TransformedModel::drift(double y) const {
  const double u = transform_->inverse(y);
  return transform_->scale_prime(u) * (-lambda_ * u + beta_(u) + gamma_(u));
}

TransformedModel transformed_coefficients(const SDEModel& m,
                                          std::shared_ptr<const ScaleTransform> transform,
                                          const GammaConstruction& gc) {
  return TransformedModel(m.lambda(), m.beta(), gc.gamma, m.sigma(), std::move(transform));
}

// ---------------------------------------------------------------------------

SlopeScan scan_slope(const TransformedModel& tm, double y_lo, double y_hi, std::size_t n) {
  if (n < 2 || !(y_hi > y_lo)) throw DomainError("slope scan needs n >= 2 and y_hi > y_lo");
  SlopeScan out;
  out.n_points = n;
  out.y_lo = y_lo;
  out.y_hi = y_hi;
  out.min_slope = kInf;

  const double step = (y_hi - y_lo) / static_cast<double>(n - 1);
  auto y_at = [&](std::size_t i) {
    return i + 1 == n ? y_hi : y_lo + static_cast<double>(i) * step;
  };
  double prev_y = y_at(0);
  double prev_v = tm.tilde_id(prev_y);
  double best_dist = kInf;
  for (std::size_t i = 1; i < n; ++i) {
    const double y = y_at(i);
    const double v = tm.tilde_id(y);
    const double slope = (v - prev_v) / (y - prev_y);
    if (slope < out.min_slope) {
      out.min_slope = slope;
      out.min_at_y = prev_y;
    }
    if (slope < kSlopeThreshold) {
      const double mid = 0.5 * (y + prev_y);
      if (std::abs(mid) < best_dist) {
        best_dist = std::abs(mid);
        out.violation_y = mid;
      }
    }
    prev_y = y;
    prev_v = v;
  }
  if (out.violation_y) out.violation_u = tm.transform().inverse(*out.violation_y);
  return out;
}

SlopeScan scan_slope(const TransformedModel& tm, std::size_t n) {
  const ScaleTransform& t = tm.transform();
  return scan_slope(tm, t.s_values().front(), t.s_values().back(), n);
}

double check_slope(const TransformedModel& tm, std::size_t n) {
  const SlopeScan scan = scan_slope(tm, n);
  if (scan.violation_y) {
    throw ConstructionError("slope of the transformed identity drops to " +
                                format_real(scan.min_slope) + " < 1/2 near y = " +
                                format_real(*scan.violation_y) + " (x = " +
                                format_real(*scan.violation_u) + ")",
                            *scan.violation_y);
  }
  return scan.min_slope;
}

void write_transform_csv(std::ostream& os, const SDEModel& m, const GammaConstruction& gc,
                         const ScaleTransform& t) {
  const auto& x = t.grid_x();
  const auto& s = t.s_values();
  const auto& sp = t.s_prime_values();
  os << "x,s,s_prime,gamma,alpha,tilde_id_slope\n";
  char buf[512];
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t a = i + 1 < x.size() ? i : i - 1;
    const double slope = (sp[a + 1] * x[a + 1] - sp[a] * x[a]) / (s[a + 1] - s[a]);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x[i], s[i], sp[i],
                  gc.gamma(x[i]), m.alpha()(x[i]), slope);
    os << buf;
  }
}

}  // namespace synchrosde
