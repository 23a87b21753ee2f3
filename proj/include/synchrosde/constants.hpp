#pragma once

#include <map>
#include <optional>
#include <span>

#include "synchrosde/model.hpp"
#include "synchrosde/zvonkin.hpp"

namespace synchrosde {

/// Lipschitz constants of the scale transform and the transformed coefficients.
struct LipschitzConstants {
  double L_s = 1.0;
  double L_s_prime = 0.0;
  double L_gamma = 0.0;
  double sup_gamma = 0.0;
  double sup_gamma_minus_alpha = 0.0;
  double sup_beta = 0.0;   // ‖β‖_{N_α+1} (compact support) or ‖β‖_∞
  double sup_sigma = 0.0;  // same convention for σ
  double L_beta = 0.0;
  double L_sigma = 0.0;
  double c_sigma = 0.0;
  double L_tilde_beta = 0.0;
  double L_tilde_gamma = 0.0;
  double L_tilde_sigma = 0.0;
  bool tail_truncated = false;
};

/// L_s' = 2‖γ-α‖_∞/c_σ·L_s and, for f in {β, γ, σ}, L_f̃ = (L_s L_f + ‖f‖ L_s')L_s.
LipschitzConstants lipschitz_constants(const SDEModel& model, const ScaleTransform& transform,
                                       const GammaConstruction& gamma);

/// The same constants written with raw model parameters only.
struct ClosedFormBounds {
  double L_s = 1.0;
  double L_s_prime = 0.0;
  double L_tilde_beta = 0.0;
  double L_tilde_gamma = 0.0;
  double L_tilde_sigma = 0.0;
  double sum = 0.0;  // bound on L_β̃ + L_γ̃
};

/// Compact support:
///   (‖α‖ + L_β + (‖α‖ + ‖β‖_{N+1})·4‖α‖/c_σ)·exp(16‖α‖(N+1)/c_σ²)
/// Integrable envelope:
///   (L_β + L_g + (‖β‖ + 2‖g‖²)·4‖g‖/c_σ)·exp(8‖g‖_1/c_σ²)
ClosedFormBounds closed_form_bounds(const SDEModel& model);
double closed_form_bound(const SDEModel& model);

enum class Variant { ExactQuadrature, ClosedForm };
const char* to_string(Variant v);

/// Threshold, rate and moment exponents derived from one set of Lipschitz
/// constants.
struct RateConstants {
  Variant variant = Variant::ExactQuadrature;
  double L_s = 1.0;
  double L_tilde_beta = 0.0;
  double L_tilde_gamma = 0.0;
  double L_tilde_sigma = 0.0;
  double lambda0 = 0.0;
  double c_lambda = 0.0;
  double D_tilde_b_lower = 0.0;
  double C_prefactor = 1.0;
  std::map<double, double> c_lambda_p;
  bool below_threshold = false;
};

struct ConstantsReport {
  Mode mode = Mode::CompactSupport;
  double lambda = 0.0;
  double delta = 0.0;
  bool delta_clamped = false;
  LipschitzConstants lipschitz;
  ClosedFormBounds closed;
  RateConstants exact;
  RateConstants closed_rates;
  double closed_form_value = 0.0;  // closed.sum

  /// p → value for every p with c_{λ,p} <= 0 in the exact variant.
  std::map<double, double> nonpositive_c_lambda_p() const;
};

/// p·c_λ - p(p-1)/2·L_σ̃². Throws DomainError for p < 2.
double c_lambda_p(double c_lambda, double L_tilde_sigma, double p);

RateConstants rate_constants(Variant variant, double lambda, double L_s, double L_tilde_beta,
                             double L_tilde_gamma, double L_tilde_sigma,
                             std::span<const double> ps);

/// λ₀ = 2(L_β̃ + L_γ̃), c_λ = λ/2 - L_β̃ - L_γ̃, C = L_s, c_{λ,p} for each p,
/// in both variants.
ConstantsReport synchronization_constants(const SDEModel& model, const GammaConstruction& gamma,
                                          const LipschitzConstants& lip,
                                          std::span<const double> ps);

/// Builds γ and the scale transform, then all constants.
ConstantsReport compute_constants(const SDEModel& model, std::span<const double> ps);

struct Prop1Constants {
  double c_as_bound = 0.0;  // D_b
  double c_p = 0.0;         // D_b - (p-1)/2·L_σ²
  double p = 2.0;
  bool c_p_nonpositive = false;
};

/// Throws DomainError for p < 2 and ConfigError when the drift is not dissipative.
Prop1Constants prop1_constants(const DissipativeModel& model, double p);

}  // namespace synchrosde
