#include "synchrosde/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "synchrosde/errors.hpp"

namespace synchrosde {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string p_label(double p) { return format_real(p); }

double safe_log10_drop(double d0, double dT) {
  return std::log10(d0 / std::max(dT, std::numeric_limits<double>::denorm_min()));
}

}  // namespace

const char* to_string(RateMethod m) {
  return m == RateMethod::PerPathRegression ? "per_path_regression" : "ensemble_mean_log";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "PASS";
    case Status::Fail:
      return "FAIL";
    case Status::Inconclusive:
      break;
  }
  return "INCONCLUSIVE";
}

LineFit fit_line(std::span<const double> t, std::span<const double> y) {
  return fit_line(t, y, {});
}

LineFit fit_line(std::span<const double> t, std::span<const double> y,
                 std::span<const double> w) {
  const std::size_t n = t.size();
  if (n < 2 || y.size() != n) throw DomainError("line fit needs at least 2 paired points");
  if (!w.empty() && w.size() != n) throw DomainError("one weight per point required");
  auto weight = [&](std::size_t i) { return w.empty() ? 1.0 : w[i]; };
  double sw = 0.0, mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weight(i) > 0.0)) throw DomainError("weights must be positive");
    sw += weight(i);
    mt += weight(i) * t[i];
    my += weight(i) * y[i];
  }
  mt /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += weight(i) * (t[i] - mt) * (t[i] - mt);
    sxy += weight(i) * (t[i] - mt) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("line fit needs non-constant abscissae");
  LineFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mt;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * t[i];
      ssr += weight(i) * r * r;
    }
    f.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

TimeWindow default_window(double T) { return {0.1 * T, T}; }

double default_floor(double x0, double y0) { return 1e-14 * std::abs(y0 - x0); }

std::optional<LineFit> path_log_slope(std::span<const double> t, std::span<const double> dist,
                                      TimeWindow w, double floor) {
  std::vector<double> tt, ly;
  for (std::size_t i = 0; i < t.size() && i < dist.size(); ++i) {
    if (t[i] > w.t_end) break;
    if (dist[i] <= floor) break;
    if (t[i] < w.t_start) continue;
    tt.push_back(t[i]);
    ly.push_back(std::log(dist[i]));
  }
  if (tt.size() < 3 || !(tt.back() > tt.front())) return std::nullopt;
  return fit_line(tt, ly);
}

std::optional<LineFit> path_log_slope(const TrajectoryPair& p, TimeWindow w, double floor) {
  std::vector<double> d(p.X.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(p.X[i] - p.Y[i]);
  return path_log_slope(p.times, d, w, floor);
}

RateEstimate combine_as_rates(std::span<const std::optional<LineFit>> fits, TimeWindow w) {
  RateEstimate r;
  r.method = RateMethod::PerPathRegression;
  r.t_start = w.t_start;
  r.t_end = w.t_end;
  std::vector<double> slopes, intercepts;
  double single_stderr = 0.0;
  for (const auto& f : fits) {
    if (!f) continue;
    slopes.push_back(f->slope);
    intercepts.push_back(f->intercept);
    single_stderr = f->slope_stderr;
  }
  r.n_points = slopes.size();
  if (slopes.empty()) {
    r.inconclusive = true;
    r.note = "every path fell below the log floor before the window";
    return r;
  }
  r.slope = median(slopes);
  r.intercept = median(intercepts);
  if (slopes.size() == 1) {
    r.std_error = single_stderr;
  } else {
    std::vector<double> dev(slopes.size());
    for (std::size_t i = 0; i < slopes.size(); ++i) dev[i] = std::abs(slopes[i] - r.slope);
    r.std_error = 1.4826 * median(dev) * 1.2533 / std::sqrt(static_cast<double>(slopes.size()));
  }
  if (slopes.size() < fits.size()) {
    r.note = std::to_string(fits.size() - slopes.size()) + " path(s) without a usable window";
  }
  return r;
}

RateEstimate estimate_as_rate(std::span<const TrajectoryPair> pairs, TimeWindow w, double floor) {
  std::vector<std::optional<LineFit>> fits;
  fits.reserve(pairs.size());
  for (const auto& p : pairs) fits.push_back(path_log_slope(p, w, floor));
  return combine_as_rates(fits, w);
}

std::vector<std::size_t> sample_steps(std::size_t n_steps, std::size_t count) {
  if (count < 2) throw DomainError("need at least 2 sample times");
  count = std::min(count, n_steps + 1);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t k = static_cast<std::size_t>(std::llround(
        static_cast<double>(j) * static_cast<double>(n_steps) / static_cast<double>(count - 1)));
    if (out.empty() || k > out.back()) out.push_back(k);
  }
  return out;
}

std::vector<double> distances_at(const TrajectoryPair& p, std::span<const std::size_t> steps) {
  std::vector<double> d;
  d.reserve(steps.size());
  for (std::size_t k : steps) d.push_back(std::abs(p.X.at(k) - p.Y.at(k)));
  return d;
}

MomentCurve moments(const DistanceSamples& s, double p) {
  MomentCurve c;
  c.times = s.times;
  const std::size_t m = s.times.size();
  const double n = static_cast<double>(s.per_path.size());
  c.mean.resize(m);
  c.rel_stderr.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    CompensatedSum sum;
    for (const auto& row : s.per_path) sum.add(std::pow(row[j], p));
    const double mean = sum.value() / n;
    CompensatedSum sq;
    for (const auto& row : s.per_path) {
      const double d = std::pow(row[j], p) - mean;
      sq.add(d * d);
    }
    const double var = n > 1.0 ? sq.value() / (n - 1.0) : 0.0;
    c.mean[j] = mean;
    c.rel_stderr[j] = mean > 0.0 ? std::sqrt(var / n) / mean
                                 : std::numeric_limits<double>::infinity();
  }
  return c;
}

RateEstimate estimate_lp_rate(const MomentCurve& c, double p) {
  if (!(p >= 2.0)) throw DomainError("moment order p must be >= 2");
  RateEstimate r;
  r.method = RateMethod::EnsembleMeanLog;
  std::vector<double> t, ly, w;
  for (std::size_t j = 0; j < c.times.size(); ++j) {
    if (!(c.mean[j] > 0.0) || !(c.rel_stderr[j] < kMaxRelStderr)) break;
    t.push_back(c.times[j]);
    ly.push_back(std::log(c.mean[j]));
    const double rel = std::max(c.rel_stderr[j], kMinRelStderr);
    w.push_back(1.0 / (rel * rel));
  }
  r.undersampled = t.size() < c.times.size();
  r.n_points = t.size();
  if (!c.times.empty()) {
    r.t_start = c.times.front();
    r.t_end = t.empty() ? c.times.front() : t.back();
  }
  if (t.size() < 3) {
    r.inconclusive = true;
    r.note = "fewer than 3 sample times with relative stderr below " +
             format_real(100.0 * kMaxRelStderr) + "%";
    return r;
  }
  const LineFit f = fit_line(t, ly, w);
  r.slope = f.slope;
  r.intercept = f.intercept;
  r.std_error = f.slope_stderr;
  if (r.undersampled) {
    r.note = "fit truncated at t = " + format_real(r.t_end) +
             " where the Monte Carlo relative stderr reaches " +
             format_real(100.0 * kMaxRelStderr) + "%";
  }
  return r;
}

RateEstimate estimate_lp_rate(const DistanceSamples& s, double p) {
  return estimate_lp_rate(moments(s, p), p);
}

BoundCheck check_moment_bound(const MomentCurve& c, double prefactor, double exponent) {
  BoundCheck b;
  for (std::size_t j = 0; j < c.times.size(); ++j) {
    const double bound = prefactor * std::exp(-exponent * c.times[j]);
    const double rel = std::isfinite(c.rel_stderr[j]) ? c.rel_stderr[j] : 0.0;
    const double ratio = c.mean[j] / (bound * (1.0 + 3.0 * rel));
    if (ratio > b.worst_ratio) {
      b.worst_ratio = ratio;
      b.worst_time = c.times[j];
    }
    if (ratio > 1.0 + 1e-12) b.holds = false;
  }
  return b;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS distance needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

TheoreticalRates theoretical_rates(const ConstantsReport& c) {
  TheoreticalRates t;
  t.source = "transformed_constants";
  t.lambda = c.lambda;
  t.as_rate_value = c.exact.c_lambda;
  if (c.exact.c_lambda > 0.0) t.as_rate = c.exact.c_lambda;
  t.C_prefactor = c.exact.C_prefactor;
  t.lp_exponent = c.exact.c_lambda_p;
  t.constants = c;
  return t;
}

TheoreticalRates theoretical_rates(const DissipativeModel& m, std::span<const double> ps) {
  TheoreticalRates t;
  t.source = "dissipative_drift";
  t.as_rate_value = m.D_b();
  if (m.is_dissipative()) t.as_rate = m.D_b();
  t.C_prefactor = 1.0;
  for (double p : ps) {
    if (!(p >= 2.0)) throw DomainError("moment order p must be >= 2");
    const double c_p = m.D_b() - 0.5 * (p - 1.0) * m.L_sigma() * m.L_sigma();
    t.lp_exponent[p] = p * c_p;
  }
  if (m.is_dissipative()) t.prop1_p2 = prop1_constants(m, 2.0);
  return t;
}

const Verdict* VerificationReport::find(const std::string& claim) const {
  for (const auto& v : verdicts) {
    if (v.claim == claim) return &v;
  }
  return nullptr;
}

VerificationReport verify(const TheoreticalRates& th, const VerificationInput& in) {
  if (th.lambda != in.model_lambda) {
    throw ConfigError("lambda of the constants (" + format_real(th.lambda) +
                      ") differs from the simulated model (" + format_real(in.model_lambda) + ")");
  }
  VerificationReport rep;
  rep.theoretical = th;
  rep.spec = in.spec;
  rep.empirical_as_rate = in.as_rate;
  rep.empirical_lp_rates = in.lp_rates;
  rep.median_log10_drop = in.median_log10_drop;
  const double dt = in.spec.dt;
  const std::string decay_note = "median distance decayed " +
                                 format_real(std::round(in.median_log10_drop * 100.0) / 100.0) +
                                 " orders of magnitude over T = " + format_real(in.spec.T);

  auto one_sided = [&](const std::string& claim, double rate, const RateEstimate& est) {
    Verdict v;
    v.claim = claim;
    if (est.inconclusive) {
      v.status = Status::Inconclusive;
      v.note = est.note;
      return v;
    }
    const double allowed = -rate + 3.0 * est.std_error + rate * rate * dt;
    v.margin = allowed - est.slope;
    v.status = est.slope <= allowed ? Status::Pass : Status::Fail;
    v.note = "empirical slope " + format_real(est.slope) + " vs guaranteed decay " +
             format_real(-rate);
    if (est.undersampled) v.note += "; " + est.note;
    return v;
  };

  if (th.as_rate) {
    rep.verdicts.push_back(one_sided("as_sync_rate", *th.as_rate, in.as_rate));
  } else {
    Verdict v;
    v.claim = "as_sync_rate";
    v.status = Status::Inconclusive;
    v.margin = th.as_rate_value;
    v.note = "guaranteed rate " + format_real(th.as_rate_value) +
             " is not positive (lambda below threshold); " + decay_note;
    rep.verdicts.push_back(std::move(v));
  }

  const double gap = std::abs(in.spec.y0 - in.spec.x0);
  for (const auto& [p, k] : th.lp_exponent) {
    const std::string label = p_label(p);
    const auto est = in.lp_rates.find(p);
    const auto curve = in.lp_curves.find(p);
    if (k <= 0.0) {
      for (const char* prefix : {"lp_rate_p", "lp_moment_bound_p"}) {
        Verdict v;
        v.claim = prefix + label;
        v.status = Status::Inconclusive;
        v.margin = k;
        v.note = "bound not applicable: decay exponent " + format_real(k) + " is not positive";
        if (est != in.lp_rates.end() && !est->second.inconclusive) {
          v.note += "; empirical slope " + format_real(est->second.slope);
        }
        rep.verdicts.push_back(std::move(v));
      }
      continue;
    }
    if (est != in.lp_rates.end()) {
      rep.verdicts.push_back(one_sided("lp_rate_p" + label, k, est->second));
    }
    if (curve != in.lp_curves.end()) {
      const double prefactor = std::pow(th.C_prefactor * gap, p);
      const BoundCheck b = check_moment_bound(curve->second, prefactor, k);
      Verdict v;
      v.claim = "lp_moment_bound_p" + label;
      v.status = b.holds ? Status::Pass : Status::Fail;
      v.margin = 1.0 - b.worst_ratio;
      v.note = "worst ratio to the bound " + format_real(b.worst_ratio) + " at t = " +
               format_real(b.worst_time);
      rep.verdicts.push_back(std::move(v));
    }
  }
  return rep;
}

namespace {

struct PathSummary {
  std::optional<LineFit> fit;
  std::vector<double> dist;
  double log10_drop = 0.0;
};

}  // namespace

VerificationReport verify_model(const Dynamics& dyn, const TheoreticalRates& th,
                                double model_lambda, const SimulationSpec& spec,
                                std::span<const double> ps, std::size_t n_samples,
                                std::vector<std::optional<LineFit>>* per_path_fits) {
  check_spec(spec);
  if (spec.x0 == spec.y0) throw ConfigError("x0 and y0 must differ");
  for (double p : ps) {
    if (!(p >= 2.0)) throw DomainError("moment order p must be >= 2");
  }
  if (th.lambda != model_lambda) {
    throw ConfigError("lambda of the constants differs from the simulated model");
  }
  const TimeWindow w = default_window(spec.T);
  const double floor = default_floor(spec.x0, spec.y0);
  const std::size_t n = step_count(spec);
  const std::vector<std::size_t> steps = sample_steps(n, n_samples);
  const double gap = std::abs(spec.y0 - spec.x0);

  const std::vector<PathSummary> paths = ensemble(dyn, spec, [&](const TrajectoryPair& tp) {
    PathSummary s;
    s.fit = path_log_slope(tp, w, floor);
    s.dist = distances_at(tp, steps);
    s.log10_drop = safe_log10_drop(gap, std::abs(tp.X.back() - tp.Y.back()));
    return s;
  });

  VerificationInput in;
  in.model_lambda = model_lambda;
  in.spec = spec;
  std::vector<std::optional<LineFit>> fits;
  std::vector<double> drops;
  DistanceSamples samples;
  for (std::size_t k : steps) samples.times.push_back(static_cast<double>(k) * spec.dt);
  samples.steps = steps;
  for (const auto& s : paths) {
    fits.push_back(s.fit);
    drops.push_back(s.log10_drop);
    samples.per_path.push_back(s.dist);
  }
  in.as_rate = combine_as_rates(fits, w);
  in.median_log10_drop = median(drops);
  for (double p : ps) {
    MomentCurve c = moments(samples, p);
    in.lp_rates[p] = estimate_lp_rate(c, p);
    in.lp_curves[p] = std::move(c);
  }
  if (per_path_fits) *per_path_fits = std::move(fits);
  return verify(th, in);
}

void write_verdict_table(std::ostream& os, const VerificationReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %-13s %14s  %s\n", "claim", "status", "margin", "note");
  os << buf;
  for (const auto& v : r.verdicts) {
    std::snprintf(buf, sizeof buf, "%-24s %-13s %14.6g  ", v.claim.c_str(), to_string(v.status),
                  v.margin);
    os << buf << v.note << '\n';
  }
}

void write_rates_csv(std::ostream& os, std::span<const std::optional<LineFit>> fits) {
  os << "path,slope,intercept,slope_stderr,n\n";
  char buf[256];
  for (std::size_t i = 0; i < fits.size(); ++i) {
    if (fits[i]) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%zu\n", i, fits[i]->slope,
                    fits[i]->intercept, fits[i]->slope_stderr, fits[i]->n);
    } else {
      std::snprintf(buf, sizeof buf, "%zu,,,,\n", i);
    }
    os << buf;
  }
}

}  // namespace synchrosde
