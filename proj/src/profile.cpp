#include "synchrosde/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "synchrosde/errors.hpp"

namespace synchrosde {

namespace {

constexpr double kZeroLevel = 1e-12;

void check_grid(double R, double h) {
  if (!(R > 0.0) || !(h > 0.0) || !std::isfinite(R) || !std::isfinite(h)) {
    throw DomainError("grid requires R > 0 and h > 0");
  }
  if (R / h > 5e7) throw DomainError("grid too large (R/h > 5e7)");
}

// Breakpoints and their one-sided probes inside [-R, R].
std::vector<double> probe_points(std::span<const double> bps, double R) {
  std::vector<double> out;
  for (double b : bps) {
    if (b < -R || b > R) continue;
    const double off = one_sided_offset(b);
    out.push_back(b);
    if (b - off >= -R) out.push_back(b - off);
    if (b + off <= R) out.push_back(b + off);
  }
  return out;
}

}  // namespace

GridSpec default_grid(std::optional<double> support_radius) {
  GridSpec g;
  if (support_radius) g.R = std::max(10.0, 2.0 * (*support_radius + 1.0));
  return g;
}

double one_sided_offset(double b) { return 1e-9 * std::max(1.0, std::abs(b)); }

std::vector<double> make_grid(const GridSpec& g, std::span<const double> extra) {
  check_grid(g.R, g.h);
  const auto n = static_cast<long long>(std::floor(g.R / g.h * (1.0 + 1e-12)));
  struct Pt {
    double x;
    bool extra;
  };
  std::vector<Pt> pts;
  pts.reserve(static_cast<std::size_t>(2 * n + 3) + extra.size());
  for (long long i = -n; i <= n; ++i) pts.push_back({static_cast<double>(i) * g.h, false});
  pts.push_back({-g.R, true});
  pts.push_back({g.R, true});
  for (double e : extra) {
    if (std::isfinite(e) && e >= -g.R && e <= g.R) pts.push_back({e, true});
  }
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.x < b.x; });

  const double tol = 1e-9 * g.h;
  std::vector<Pt> merged;
  merged.reserve(pts.size());
  for (const Pt& p : pts) {
    if (!merged.empty() && p.x - merged.back().x <= tol) {
      if (p.extra && !merged.back().extra) merged.back() = p;
      continue;
    }
    merged.push_back(p);
  }
  std::vector<double> x;
  x.reserve(merged.size());
  for (const Pt& p : merged) x.push_back(p.x);
  return x;
}

std::vector<double> cell_integrals(std::span<const double> x, std::span<const double> fx,
                                   const std::function<double(double)>& f,
                                   std::span<const double> breakpoints) {
  std::vector<double> out(x.size() > 0 ? x.size() - 1 : 0);
  auto is_bp = [&](double v) {
    return std::binary_search(breakpoints.begin(), breakpoints.end(), v);
  };
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double w = x[i + 1] - x[i];
    if (is_bp(x[i]) || is_bp(x[i + 1])) {
      out[i] = w * f(0.5 * (x[i] + x[i + 1]));
    } else {
      out[i] = 0.5 * w * (fx[i] + fx[i + 1]);
    }
  }
  return out;
}

FunctionProfile profile(const FunctionDescriptor& f, double R, double h) {
  check_grid(R, h);
  FunctionProfile p;
  p.grid = {R, h};
  p.declared = f.declared();

  const std::vector<double> bps = f.breakpoints();
  const std::vector<double> x = make_grid(p.grid, bps);
  std::vector<double> fx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) fx[i] = f(x[i]);

  // Sup and inf of f^2 over nodes plus one-sided probes.
  p.sup_norm_est = -1.0;
  p.inf_sq_est = std::numeric_limits<double>::infinity();
  auto visit = [&](double xi, double v) {
    const double a = std::abs(v);
    if (a > p.sup_norm_est) {
      p.sup_norm_est = a;
      p.sup_norm_witness = xi;
    }
    if (v * v < p.inf_sq_est) {
      p.inf_sq_est = v * v;
      p.inf_sq_witness = xi;
    }
  };
  for (std::size_t i = 0; i < x.size(); ++i) visit(x[i], fx[i]);
  const std::vector<double> probes = probe_points(bps, R);
  for (double q : probes) visit(q, f(q));

  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double q = std::abs(fx[i + 1] - fx[i]) / (x[i + 1] - x[i]);
    if (q > p.lipschitz_est) {
      p.lipschitz_est = q;
      p.lipschitz_witness = x[i];
    }
  }

  const std::optional<double> proven = f.proven_support_radius();
  if (proven) {
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(fx[i]) > kZeroLevel) r = std::max(r, std::abs(x[i]));
    }
    for (double q : probes) {
      if (std::abs(f(q)) > kZeroLevel) r = std::max(r, std::abs(q));
    }
    p.support_radius_est = *proven > R ? *proven : r;
  }

  std::vector<double> afx(fx.size());
  for (std::size_t i = 0; i < fx.size(); ++i) afx[i] = std::abs(fx[i]);
  const auto cells = cell_integrals(x, afx, [&f](double t) { return std::abs(f(t)); }, bps);
  double inner = 0.0;
  for (double c : cells) inner += c;

  if (proven && *proven <= R) {
    p.l1_norm_est = inner;
  } else if (const auto tail = f.tail_mass_bound(R)) {
    p.l1_norm_est = inner + *tail;
  } else {
    const double edge = std::max(afx.front(), afx.back());
    if (edge <= 1e-6 * p.sup_norm_est || edge <= kZeroLevel) {
      p.l1_norm_est = inner;
      p.l1_tail_truncated = true;
    }
  }
  return p;
}

double local_sup(const FunctionDescriptor& f, double radius, double h) {
  if (radius <= 0.0) return std::abs(f(0.0));
  const std::vector<double> bps = f.breakpoints();
  const std::vector<double> x = make_grid({radius, std::min(h, radius)}, bps);
  double s = 0.0;
  for (double xi : x) s = std::max(s, std::abs(f(xi)));
  for (double q : probe_points(bps, radius)) s = std::max(s, std::abs(f(q)));
  return s;
}

}  // namespace synchrosde
