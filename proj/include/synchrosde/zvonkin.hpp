#pragma once

// Partial scale transform removing the singular part α - γ of the drift.
//
//   s(x)  = ∫_0^x exp(-2 ∫_0^y (α - γ)/σ² dz) dy
//   X̃ = s(X) solves dX̃ = (-λ ĩd + β̃ + γ̃)(X̃) dt + σ̃(X̃) dw with
//   ĩd = (s'∘s⁻¹)·s⁻¹, β̃ = (s'∘s⁻¹)·(β∘s⁻¹), γ̃ = (s'∘s⁻¹)·(γ∘s⁻¹),
//   σ̃ = (s'∘s⁻¹)·(σ∘s⁻¹).

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "synchrosde/funcspec.hpp"
#include "synchrosde/model.hpp"

namespace synchrosde {

/// Odd, bounded, Lipschitz, integrable intermediate drift γ with
/// (γ(u) - α(u))·u >= 0 for |u| >= δ.
struct GammaConstruction {
  FunctionDescriptor gamma;
  double delta = 0.0;  // +inf when α ≡ 0
  Mode mode = Mode::CompactSupport;
  double L_gamma = 0.0;
  double sup_gamma = 0.0;
  double l1_gamma = 0.0;
  bool delta_clamped = false;        // c_σ/(4‖α‖∞) exceeded N_α and was reduced to N_α
  std::vector<double> breakpoints;   // kinks of γ
};

/// δ = c_σ/(4‖α‖∞).
///   compact support: γ = ‖α‖∞·u/δ on [0,δ], ‖α‖∞ on [δ,N], ‖α‖∞(N+1-u) on
///   [N,N+1], 0 beyond, extended oddly.
///   envelope: γ = g(δ)·u/δ on [0,δ], g(u) beyond, extended oddly (g is
///   symmetrized as max(g(u), g(-u)) when it is not even).
/// Throws ConfigError when the envelope is missing or σ is not elliptic.
GammaConstruction build_gamma(const SDEModel& model);

class ScaleTransform {
 public:
  ScaleTransform(std::vector<double> x, std::vector<double> s, std::vector<double> s_prime,
                 double L_s_exact, bool tail_truncated, std::vector<double> breakpoints);

  double scale(double x) const;
  double scale_prime(double x) const;
  double inverse(double y) const;

  const std::vector<double>& grid_x() const { return x_; }
  const std::vector<double>& s_values() const { return s_; }
  const std::vector<double>& s_prime_values() const { return sp_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  double R() const { return x_.back(); }

  /// exp(2∫|α-γ|/σ²), including the analytic tail bound when available.
  double L_s_exact() const { return L_s_; }
  /// The tail beyond R was ignored (no closed form); L_s is truncated at R.
  bool tail_truncated() const { return tail_truncated_; }
  double slope_left() const { return sp_.front(); }
  double slope_right() const { return sp_.back(); }
  double inversion_tol(double y) const;

 private:
  std::size_t cell_of(double x) const;

  std::vector<double> x_;
  std::vector<double> s_;
  std::vector<double> sp_;
  double L_s_;
  bool tail_truncated_;
  std::vector<double> breakpoints_;
};

/// Tabulate s and s' on the grid [-R, R] with step h (breakpoints of α, γ, σ
/// inserted exactly). Throws RefinementError when s' changes by more than 10%
/// between adjacent nodes and ConfigError when R does not cover the support
/// of α - γ in compact-support mode.
ScaleTransform build_scale(const SDEModel& model, const GammaConstruction& gamma, double R,
                           double h);
ScaleTransform build_scale(const SDEModel& model, const GammaConstruction& gamma);

double scale(const ScaleTransform& t, double x);
double scale_prime(const ScaleTransform& t, double x);
double inverse_scale(const ScaleTransform& t, double y);

/// Coefficients of the transformed equation.
class TransformedModel {
 public:
  TransformedModel(double lambda, FunctionDescriptor beta, FunctionDescriptor gamma,
                   FunctionDescriptor sigma, std::shared_ptr<const ScaleTransform> transform);

  double tilde_id(double y) const;
  double tilde_beta(double y) const;
  double tilde_gamma(double y) const;
  double tilde_sigma(double y) const;
  /// b̃ = -λ ĩd + β̃ + γ̃
  double drift(double y) const;
  double diffusion(double y) const { return tilde_sigma(y); }

  double lambda() const { return lambda_; }
  const ScaleTransform& transform() const { return *transform_; }
  std::shared_ptr<const ScaleTransform> transform_ptr() const { return transform_; }

 private:
  double lambda_;
  FunctionDescriptor beta_;
  FunctionDescriptor gamma_;
  FunctionDescriptor sigma_;
  std::shared_ptr<const ScaleTransform> transform_;
};

TransformedModel transformed_coefficients(const SDEModel& model,
                                          std::shared_ptr<const ScaleTransform> transform,
                                          const GammaConstruction& gamma);

inline constexpr double kSlopeThreshold = 0.5 - 1e-6;

struct SlopeScan {
  double min_slope = 0.0;
  double min_at_y = 0.0;                    // left end of the minimizing difference
  std::optional<double> violation_y;        // violating difference closest to 0
  std::optional<double> violation_u;        // the same point in original coordinates
  std::size_t n_points = 0;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

/// Finite-difference slopes of ĩd on n uniform points of [y_lo, y_hi].
SlopeScan scan_slope(const TransformedModel& tm, double y_lo, double y_hi, std::size_t n);
/// Same over [s(-R), s(R)].
SlopeScan scan_slope(const TransformedModel& tm, std::size_t n = 10000);

/// Minimum slope of ĩd; throws ConstructionError (witness: violating y closest
/// to 0) when it falls below 1/2 - 1e-6.
double check_slope(const TransformedModel& tm, std::size_t n = 10000);

/// CSV with columns x, s, s_prime, gamma, alpha, tilde_id_slope (17
/// significant digits), one row per grid node.
void write_transform_csv(std::ostream& os, const SDEModel& model,
                         const GammaConstruction& gamma, const ScaleTransform& t);

}  // namespace synchrosde
