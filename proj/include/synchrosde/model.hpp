#pragma once

#include <optional>
#include <string>
#include <vector>

#include "synchrosde/funcspec.hpp"
#include "synchrosde/profile.hpp"

namespace synchrosde {

/// Which hypothesis on the singular drift α the model claims.
enum class Mode {
  CompactSupport,      // α bounded with compact support ("A3")
  IntegrableEnvelope,  // |α| <= g, g bounded Lipschitz integrable; β, σ bounded ("A3prime")
};

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// dX = (-λX + β(X) + α(X)) dt + σ(X) dw.
class SDEModel {
 public:
  struct Parts {
    double lambda = 1.0;
    FunctionDescriptor beta;
    FunctionDescriptor alpha;
    FunctionDescriptor sigma;
    Mode mode = Mode::CompactSupport;
    std::optional<FunctionDescriptor> envelope;  // g, required for IntegrableEnvelope
    std::optional<GridSpec> grid;                // default_grid(support of α) otherwise
  };

  explicit SDEModel(Parts parts);

  double lambda() const { return parts_.lambda; }
  const FunctionDescriptor& beta() const { return parts_.beta; }
  const FunctionDescriptor& alpha() const { return parts_.alpha; }
  const FunctionDescriptor& sigma() const { return parts_.sigma; }
  Mode mode() const { return parts_.mode; }
  const std::optional<FunctionDescriptor>& envelope() const { return parts_.envelope; }
  const GridSpec& grid() const { return grid_; }
  bool grid_was_declared() const { return parts_.grid.has_value(); }
  const Parts& parts() const { return parts_; }

  const FunctionProfile& beta_profile() const { return beta_profile_; }
  const FunctionProfile& alpha_profile() const { return alpha_profile_; }
  const FunctionProfile& sigma_profile() const { return sigma_profile_; }
  const std::optional<FunctionProfile>& envelope_profile() const { return envelope_profile_; }

  /// Same model with a different λ (profiles are reused).
  SDEModel with_lambda(double lambda) const;

  /// inf σ² on the grid.
  double c_sigma() const { return sigma_profile_.inf_sq_est; }
  double alpha_sup() const { return alpha_profile_.sup_norm(); }
  double L_beta() const { return beta_profile_.lipschitz(); }
  double L_sigma() const { return sigma_profile_.lipschitz(); }

  /// Support radius of α rounded up to 3 decimals; nullopt when not proven.
  std::optional<double> N_alpha() const;

  /// sup over |x| <= radius.
  double local_sup_beta(double radius) const;
  double local_sup_sigma(double radius) const;

 private:
  Parts parts_;
  GridSpec grid_;
  FunctionProfile beta_profile_;
  FunctionProfile alpha_profile_;
  FunctionProfile sigma_profile_;
  std::optional<FunctionProfile> envelope_profile_;
};

/// dY = b(Y) dt + σ(Y) dw with b dissipative and σ Lipschitz.
class DissipativeModel {
 public:
  DissipativeModel(FunctionDescriptor b, FunctionDescriptor sigma,
                   std::optional<GridSpec> grid = std::nullopt,
                   std::optional<double> declared_D_b = std::nullopt);

  const FunctionDescriptor& b() const { return b_; }
  const FunctionDescriptor& sigma() const { return sigma_; }
  const GridSpec& grid() const { return grid_; }
  bool grid_was_declared() const { return grid_declared_; }
  std::optional<double> declared_D_b() const { return declared_D_b_; }

  /// Declared value, else the grid scan estimate.
  double D_b() const { return D_b_; }
  double D_b_witness() const { return D_b_witness_; }
  double L_sigma() const { return sigma_profile_.lipschitz(); }
  const FunctionProfile& sigma_profile() const { return sigma_profile_; }
  bool is_dissipative() const;

 private:
  FunctionDescriptor b_;
  FunctionDescriptor sigma_;
  GridSpec grid_;
  bool grid_declared_;
  std::optional<double> declared_D_b_;
  double D_b_ = 0.0;
  double D_b_witness_ = 0.0;
  FunctionProfile sigma_profile_;
};

/// Threshold under which a dissipativity estimate is not trusted as positive.
inline constexpr double kDissipativityTolerance = 1e-6;
/// Threshold under which inf σ² is considered zero.
inline constexpr double kEllipticityTolerance = 1e-12;

struct DissipativityScan {
  double estimate;  // min over adjacent grid pairs of -(b(y)-b(x))/(y-x)
  double witness;   // left node of the minimizing pair
};

DissipativityScan dissipativity_scan(const FunctionDescriptor& b, double R, double h);

struct HypothesisResult {
  std::string id;
  std::string description;
  bool passed = false;
  std::optional<double> value;
  std::optional<double> witness;
  std::optional<double> witness_y;
};

struct ValidationReport {
  std::vector<HypothesisResult> results;
  bool all_passed() const;
  const HypothesisResult* find(const std::string& id) const;
};

ValidationReport validate(const SDEModel& model);
ValidationReport validate(const DissipativeModel& model);

/// Grid Lipschitz certificate: the estimate at h is compared with the
/// estimate at h/2; a jump roughly doubles it.
struct LipschitzCheck {
  bool lipschitz;
  double estimate;
  double witness;
};
LipschitzCheck lipschitz_check(const FunctionDescriptor& f, const GridSpec& g);

/// Boundedness certificate: sup on [-2R, 2R] must not exceed sup on [-R, R].
struct BoundednessCheck {
  bool bounded;
  double sup;
  double witness;
};
BoundednessCheck boundedness_check(const FunctionDescriptor& f, const GridSpec& g);

}  // namespace synchrosde
