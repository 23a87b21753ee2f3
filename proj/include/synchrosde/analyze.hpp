#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synchrosde/constants.hpp"
#include "synchrosde/simulate.hpp"

namespace synchrosde {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope·t. Throws DomainError for
/// fewer than 2 points or constant t.
LineFit fit_line(std::span<const double> t, std::span<const double> y);
/// Weighted least squares; the slope stderr is scaled by the weighted residuals.
LineFit fit_line(std::span<const double> t, std::span<const double> y,
                 std::span<const double> w);

enum class RateMethod { PerPathRegression, EnsembleMeanLog };
const char* to_string(RateMethod m);

struct RateEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t n_points = 0;  // paths for per-path regression, times for the moment fit
  RateMethod method = RateMethod::PerPathRegression;
  bool inconclusive = false;
  bool undersampled = false;
  std::string note;
};

struct TimeWindow {
  double t_start = 0.0;
  double t_end = 0.0;
};

/// [0.1T, T].
TimeWindow default_window(double T);

/// 1e-14·|y0 - x0|.
double default_floor(double x0, double y0);

/// Slope of log|Δ| against t over [t_start, min(t_end, first t with |Δ| <= floor)).
/// nullopt when fewer than 3 points remain.
std::optional<LineFit> path_log_slope(std::span<const double> t, std::span<const double> dist,
                                      TimeWindow window, double floor);
std::optional<LineFit> path_log_slope(const TrajectoryPair& pair, TimeWindow window, double floor);

/// Median of the per-path fits; std_error = 1.4826·MAD·1.2533/√n.
/// Inconclusive when no path has a usable window.
RateEstimate combine_as_rates(std::span<const std::optional<LineFit>> fits, TimeWindow window);

RateEstimate estimate_as_rate(std::span<const TrajectoryPair> pairs, TimeWindow window,
                              double floor);

/// |Δ| of every path at common sample times.
struct DistanceSamples {
  std::vector<double> times;
  std::vector<std::size_t> steps;
  std::vector<std::vector<double>> per_path;  // per_path[path][j] = |Δ(times[j])|
};

/// `count` step indices spread evenly over [0, n_steps] (both ends included).
std::vector<std::size_t> sample_steps(std::size_t n_steps, std::size_t count);

/// |X - Y| at the given steps.
std::vector<double> distances_at(const TrajectoryPair& pair, std::span<const std::size_t> steps);

struct MomentCurve {
  std::vector<double> times;
  std::vector<double> mean;        // Ê|Δ|^p
  std::vector<double> rel_stderr;  // Monte Carlo stderr / mean
};

/// Compensated (Neumaier) mean of |Δ|^p at each sample time.
MomentCurve moments(const DistanceSamples& samples, double p);

inline constexpr double kMaxRelStderr = 0.1;
inline constexpr double kMinRelStderr = 1e-3;

/// Slope of log Ê|Δ|^p against t over the leading sample times whose
/// relative stderr stays below 10%, weighted by 1/rel², with rel floored at
/// 1e-3 (the t = 0 moment has no spread). Undersampled when that prefix is
/// shorter than the full grid. Throws DomainError for p < 2.
RateEstimate estimate_lp_rate(const DistanceSamples& samples, double p);
RateEstimate estimate_lp_rate(const MomentCurve& curve, double p);

/// Ê|Δ_t|^p <= prefactor·e^{-exponent·t}·(1 + 3·relative stderr) at every
/// sample time.
struct BoundCheck {
  bool holds = true;
  double worst_ratio = 0.0;  // max of Ê|Δ|^p / (bound·(1 + 3 rel stderr))
  double worst_time = 0.0;
};
BoundCheck check_moment_bound(const MomentCurve& curve, double prefactor, double exponent);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Rates a model guarantees.
struct TheoreticalRates {
  std::string source;  // "transformed_constants" or "dissipative_drift"
  double lambda = 0.0;                // 0 for dissipative models
  std::optional<double> as_rate;      // c_λ or D_b; nullopt when not positive
  double as_rate_value = 0.0;         // raw value, possibly <= 0
  double C_prefactor = 1.0;
  std::map<double, double> lp_exponent;  // p → k with E|Δ|^p <= (C|Δ0|)^p e^{-k t}
  std::optional<ConstantsReport> constants;
  std::optional<Prop1Constants> prop1_p2;
};

TheoreticalRates theoretical_rates(const ConstantsReport& constants);
TheoreticalRates theoretical_rates(const DissipativeModel& model, std::span<const double> ps);

enum class Status { Pass, Fail, Inconclusive };
const char* to_string(Status s);

struct Verdict {
  std::string claim;
  Status status = Status::Inconclusive;
  double margin = 0.0;  // tolerance headroom; negative means violated
  std::string note;
};

struct VerificationInput {
  double model_lambda = 0.0;  // λ the ensemble was simulated with (0 for dissipative models)
  SimulationSpec spec;
  RateEstimate as_rate;
  std::map<double, RateEstimate> lp_rates;
  std::map<double, MomentCurve> lp_curves;
  double median_log10_drop = 0.0;  // median of log10(|Δ0| / |Δ_T|) over paths
};

struct VerificationReport {
  TheoreticalRates theoretical;
  SimulationSpec spec;
  RateEstimate empirical_as_rate;
  std::map<double, RateEstimate> empirical_lp_rates;
  std::vector<Verdict> verdicts;
  double median_log10_drop = 0.0;
  const Verdict* find(const std::string& claim) const;
};

/// One-sided checks: PASS when slope <= -rate + 3·stderr + rate²·dt, FAIL
/// otherwise, INCONCLUSIVE when the guaranteed rate is not positive or the
/// estimate is unusable. Throws ConfigError when λ differs between theory
/// and simulation.
VerificationReport verify(const TheoreticalRates& theory, const VerificationInput& input);

/// Full pipeline: simulate the ensemble, estimate rates, compare.
VerificationReport verify_model(const Dynamics& dyn, const TheoreticalRates& theory,
                                double model_lambda, const SimulationSpec& spec,
                                std::span<const double> ps, std::size_t n_samples,
                                std::vector<std::optional<LineFit>>* per_path_fits = nullptr);

/// Fixed-width table of the verdicts.
void write_verdict_table(std::ostream& os, const VerificationReport& report);

/// CSV path,slope,intercept,slope_stderr,n (empty fields for unusable paths).
void write_rates_csv(std::ostream& os, std::span<const std::optional<LineFit>> fits);

}  // namespace synchrosde
