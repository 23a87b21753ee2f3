#include "synchrosde/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "synchrosde/errors.hpp"

namespace synchrosde {

const char* to_string(Mode m) {
  return m == Mode::CompactSupport ? "A3" : "A3prime";
}

Mode mode_from_string(const std::string& s) {
  if (s == "A3") return Mode::CompactSupport;
  if (s == "A3prime" || s == "A3'") return Mode::IntegrableEnvelope;
  throw ConfigError("unknown mode '" + s + "' (expected A3 or A3prime)");
}

namespace {

struct GridLipschitz {
  double estimate = 0.0;
  double witness = 0.0;
};

GridLipschitz grid_lipschitz(const FunctionDescriptor& f, const GridSpec& g) {
  const auto x = make_grid(g, f.breakpoints());
  GridLipschitz out;
  double prev = f(x[0]);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double next = f(x[i + 1]);
    const double q = std::abs(next - prev) / (x[i + 1] - x[i]);
    if (q > out.estimate) {
      out.estimate = q;
      out.witness = x[i];
    }
    prev = next;
  }
  return out;
}

GridSpec model_grid(const SDEModel::Parts& p) {
  if (p.grid) return *p.grid;
  std::optional<double> support = p.alpha.declared().support_radius;
  if (!support) support = p.alpha.proven_support_radius();
  return default_grid(support);
}

HypothesisResult pass(std::string id, std::string desc, std::optional<double> value) {
  HypothesisResult r;
  r.id = std::move(id);
  r.description = std::move(desc);
  r.passed = true;
  r.value = value;
  return r;
}

HypothesisResult fail(std::string id, std::string desc, std::optional<double> witness,
                      std::optional<double> value = std::nullopt) {
  HypothesisResult r;
  r.id = std::move(id);
  r.description = std::move(desc);
  r.passed = false;
  r.witness = witness;
  r.value = value;
  return r;
}

HypothesisResult lipschitz_result(const std::string& id, const std::string& what,
                                  const FunctionDescriptor& f, const GridSpec& g) {
  const LipschitzCheck c = lipschitz_check(f, g);
  if (c.lipschitz) return pass(id, what + " is Lipschitz on the grid", c.estimate);
  return fail(id, what + " has a jump (difference quotient grows under refinement)", c.witness,
              c.estimate);
}

HypothesisResult bounded_result(const std::string& id, const std::string& what,
                                const FunctionDescriptor& f, const GridSpec& g) {
  const BoundednessCheck c = boundedness_check(f, g);
  if (c.bounded) return pass(id, what + " is bounded", c.sup);
  return fail(id, what + " grows beyond the grid radius", c.witness, c.sup);
}

}  // namespace

// ---------------------------------------------------------------------------

SDEModel::SDEModel(Parts parts)
    : parts_(std::move(parts)), grid_(model_grid(parts_)) {
  if (!(parts_.lambda > 0.0) || !std::isfinite(parts_.lambda)) {
    throw ConfigError("lambda must be a positive finite number");
  }
  beta_profile_ = profile(parts_.beta, grid_);
  alpha_profile_ = profile(parts_.alpha, grid_);
  sigma_profile_ = profile(parts_.sigma, grid_);
  if (parts_.envelope) envelope_profile_ = profile(*parts_.envelope, grid_);
}

SDEModel SDEModel::with_lambda(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be a positive finite number");
  }
  SDEModel copy = *this;
  copy.parts_.lambda = lambda;
  return copy;
}

std::optional<double> SDEModel::N_alpha() const {
  const auto r = alpha_profile_.support_radius();
  if (!r) return std::nullopt;
  return std::ceil(*r * 1000.0 - 1e-9) / 1000.0;
}

double SDEModel::local_sup_beta(double radius) const {
  return local_sup(parts_.beta, radius, grid_.h);
}

double SDEModel::local_sup_sigma(double radius) const {
  return local_sup(parts_.sigma, radius, grid_.h);
}

// ---------------------------------------------------------------------------

DissipativeModel::DissipativeModel(FunctionDescriptor b, FunctionDescriptor sigma,
                                   std::optional<GridSpec> grid,
                                   std::optional<double> declared_D_b)
    : b_(std::move(b)),
      sigma_(std::move(sigma)),
      grid_(grid.value_or(GridSpec{})),
      grid_declared_(grid.has_value()),
      declared_D_b_(declared_D_b) {
  const DissipativityScan scan = dissipativity_scan(b_, grid_.R, grid_.h);
  D_b_ = declared_D_b_.value_or(scan.estimate);
  D_b_witness_ = scan.witness;
  sigma_profile_ = profile(sigma_, grid_);
}

bool DissipativeModel::is_dissipative() const { return D_b_ > kDissipativityTolerance; }

DissipativityScan dissipativity_scan(const FunctionDescriptor& b, double R, double h) {
  const auto x = make_grid({R, h}, b.breakpoints());
  DissipativityScan out{std::numeric_limits<double>::infinity(), 0.0};
  double prev = b(x[0]);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double next = b(x[i + 1]);
    const double d = -(next - prev) / (x[i + 1] - x[i]);
    if (d < out.estimate) {
      out.estimate = d;
      out.witness = x[i];
    }
    prev = next;
  }
  return out;
}

LipschitzCheck lipschitz_check(const FunctionDescriptor& f, const GridSpec& g) {
  if (f.declared().lipschitz) return {true, *f.declared().lipschitz, 0.0};
  const GridLipschitz coarse = grid_lipschitz(f, g);
  const GridLipschitz fine = grid_lipschitz(f, {g.R, 0.5 * g.h});
  const bool ok = fine.estimate <= 1.5 * coarse.estimate + 1e-9;
  return {ok, ok ? coarse.estimate : fine.estimate, ok ? coarse.witness : fine.witness};
}

BoundednessCheck boundedness_check(const FunctionDescriptor& f, const GridSpec& g) {
  if (f.declared().sup_norm) return {true, *f.declared().sup_norm, 0.0};
  const FunctionProfile inner = profile(f, g);
  const GridSpec wide{2.0 * g.R, g.h};
  const auto x = make_grid(wide, f.breakpoints());
  double sup = 0.0, witness = 0.0;
  for (double xi : x) {
    const double v = std::abs(f(xi));
    if (v > sup) {
      sup = v;
      witness = xi;
    }
  }
  const bool ok = sup <= inner.sup_norm_est * (1.0 + 1e-6) + 1e-12;
  return {ok, ok ? inner.sup_norm_est : sup, witness};
}

// ---------------------------------------------------------------------------

bool ValidationReport::all_passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const HypothesisResult& r) { return r.passed; });
}

const HypothesisResult* ValidationReport::find(const std::string& id) const {
  for (const auto& r : results) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

ValidationReport validate(const SDEModel& m) {
  ValidationReport rep;
  auto& out = rep.results;
  const GridSpec& g = m.grid();

  out.push_back(pass("lambda_positive", "dissipative coefficient lambda > 0", m.lambda()));
  out.push_back(lipschitz_result("beta_lipschitz", "beta", m.beta(), g));
  out.push_back(lipschitz_result("sigma_lipschitz", "sigma", m.sigma(), g));

  const FunctionProfile& sp = m.sigma_profile();
  if (sp.inf_sq_est > kEllipticityTolerance) {
    out.push_back(pass("sigma_uniformly_elliptic", "inf sigma^2 > 0", sp.inf_sq_est));
  } else {
    out.push_back(fail("sigma_uniformly_elliptic", "sigma^2 vanishes", sp.inf_sq_witness,
                       sp.inf_sq_est));
  }

  if (m.mode() == Mode::CompactSupport) {
    out.push_back(pass("alpha_bounded", "alpha is bounded", m.alpha_sup()));
    if (const auto N = m.N_alpha()) {
      out.push_back(pass("alpha_compact_support", "alpha has compact support [-N, N]", *N));
      if (g.R > *N + 1.0) {
        out.push_back(pass("grid_covers_support", "grid radius exceeds N + 1", g.R));
      } else {
        out.push_back(fail("grid_covers_support", "grid radius must exceed N + 1", g.R, g.R));
      }
    } else {
      double far = g.R;
      const auto x = make_grid(g, m.alpha().breakpoints());
      for (auto it = x.rbegin(); it != x.rend(); ++it) {
        if (std::abs(m.alpha()(*it)) > 1e-12 || std::abs(m.alpha()(-*it)) > 1e-12) {
          far = *it;
          break;
        }
      }
      out.push_back(fail("alpha_compact_support",
                         "support of alpha is not provably compact", far));
    }
    return rep;
  }

  // Integrable envelope.
  if (!m.envelope()) {
    out.push_back(fail("envelope_present", "mode A3prime requires an envelope g", std::nullopt));
    return rep;
  }
  const FunctionDescriptor& env = *m.envelope();
  out.push_back(pass("envelope_present", "envelope g supplied", std::nullopt));

  {
    std::vector<double> bps = m.alpha().breakpoints();
    const auto gb = env.breakpoints();
    bps.insert(bps.end(), gb.begin(), gb.end());
    std::vector<double> pts = make_grid(g, bps);
    for (double b : bps) {
      const double off = one_sided_offset(b);
      pts.push_back(b - off);
      pts.push_back(b + off);
    }
    std::optional<double> witness;
    double worst = -std::numeric_limits<double>::infinity();
    for (double xi : pts) {
      if (xi < -g.R || xi > g.R) continue;
      const double excess = std::abs(m.alpha()(xi)) - env(xi);
      if (excess > worst) worst = excess;
      if (excess > 1e-12 && !witness) witness = xi;
    }
    if (witness) {
      out.push_back(fail("envelope_dominates_alpha", "|alpha| exceeds g", witness, worst));
    } else {
      out.push_back(pass("envelope_dominates_alpha", "|alpha| <= g on the grid", worst));
    }
  }

  const FunctionProfile& ep = *m.envelope_profile();
  if (const auto l1 = ep.l1_norm()) {
    out.push_back(pass("envelope_integrable", "g is integrable", *l1));
  } else {
    const double edge = std::abs(env(g.R)) >= std::abs(env(-g.R)) ? g.R : -g.R;
    out.push_back(fail("envelope_integrable", "g does not decay at the grid edge", edge));
  }
  out.push_back(bounded_result("envelope_bounded", "g", env, g));
  out.push_back(lipschitz_result("envelope_lipschitz", "g", env, g));
  out.push_back(bounded_result("beta_bounded", "beta", m.beta(), g));
  out.push_back(bounded_result("sigma_bounded", "sigma", m.sigma(), g));
  return rep;
}

ValidationReport validate(const DissipativeModel& m) {
  ValidationReport rep;
  if (m.is_dissipative()) {
    rep.results.push_back(pass("b_dissipative", "(b(y)-b(x))(y-x) <= -D (y-x)^2", m.D_b()));
  } else {
    HypothesisResult r = fail("b_dissipative", "drift is not dissipative on the grid",
                              m.D_b_witness(), m.D_b());
    r.witness_y = m.D_b_witness() + m.grid().h;
    rep.results.push_back(std::move(r));
  }
  rep.results.push_back(lipschitz_result("sigma_lipschitz", "sigma", m.sigma(), m.grid()));
  return rep;
}

}  // namespace synchrosde
