#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "synchrosde/funcspec.hpp"

namespace synchrosde {

struct GridSpec {
  double R = 10.0;  // half-width
  double h = 1e-3;  // step
};

/// Default grid for a function whose compact support (if any) has the given
/// radius: R = max(10, 2(radius + 1)), h = 1e-3.
GridSpec default_grid(std::optional<double> support_radius);

/// Nodes i*h for |i*h| <= R, the endpoints ±R, and every extra point inside
/// [-R, R]. Sorted; points closer than 1e-9*h to a node are merged into it.
/// Refining h -> h/2 keeps every uniform node bit-identical.
std::vector<double> make_grid(const GridSpec& g, std::span<const double> extra = {});

/// Integral of f over each cell [x_i, x_{i+1}]: trapezoid, except cells with
/// an endpoint in `breakpoints` which use the midpoint rule so jumps located
/// at nodes are sampled one-sided.
std::vector<double> cell_integrals(std::span<const double> x, std::span<const double> fx,
                                   const std::function<double(double)>& f,
                                   std::span<const double> breakpoints);

/// Probe offsets used to sample one-sided limits at a breakpoint.
double one_sided_offset(double b);

struct FunctionProfile {
  GridSpec grid;
  double sup_norm_est = 0.0;
  double sup_norm_witness = 0.0;
  double lipschitz_est = 0.0;
  double lipschitz_witness = 0.0;        // left node of the steepest cell
  std::optional<double> support_radius_est;  // nullopt: unbounded
  std::optional<double> l1_norm_est;         // nullopt: unbounded
  bool l1_tail_truncated = false;            // tail mass ignored (no closed form)
  double inf_sq_est = 0.0;
  double inf_sq_witness = 0.0;
  DeclaredMetadata declared;

  // Effective values: declared metadata wins over estimates.
  double sup_norm() const { return declared.sup_norm.value_or(sup_norm_est); }
  double lipschitz() const { return declared.lipschitz.value_or(lipschitz_est); }
  std::optional<double> support_radius() const {
    return declared.support_radius ? declared.support_radius : support_radius_est;
  }
  std::optional<double> l1_norm() const {
    return declared.l1_norm ? declared.l1_norm : l1_norm_est;
  }
};

/// Grid profile of f on [-R, R] with step h (breakpoints inserted exactly).
/// Deterministic: identical inputs give bit-identical outputs.
FunctionProfile profile(const FunctionDescriptor& f, double R, double h);
inline FunctionProfile profile(const FunctionDescriptor& f, const GridSpec& g) {
  return profile(f, g.R, g.h);
}

/// sup |f| over |x| <= radius (grid with step h plus breakpoints and their
/// one-sided probes).
double local_sup(const FunctionDescriptor& f, double radius, double h);

}  // namespace synchrosde
