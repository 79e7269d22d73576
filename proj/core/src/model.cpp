#include "statealign/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "statealign/error.hpp"

namespace statealign {

namespace {

constexpr double kMinInitialVariance = 1e-8;
constexpr double kDegenerateVariance = 1e-12;
constexpr double kVarianceFloorRatio = 1e-12;

double sample_variance(std::span<const double> values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

// Starting (q, r) from the first differences d[t] = y[t] - y[t-1] of a local
// level model: Var(d) = q + 2r and Cov(d[t], d[t-1]) = -r.
std::pair<double, double> moment_start(std::span<const double> y) {
  const std::size_t m = y.size() - 1;
  std::vector<double> d(m);
  for (std::size_t t = 0; t < m; ++t) d[t] = y[t + 1] - y[t];
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(m);
  double g0 = 0.0;
  double g1 = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    g0 += (d[t] - mean) * (d[t] - mean);
    if (t > 0) g1 += (d[t] - mean) * (d[t - 1] - mean);
  }
  g0 /= static_cast<double>(m);
  g1 /= static_cast<double>(m);
  const double r = std::clamp(-g1, 0.05 * g0, 0.5 * g0);
  const double q = std::max(g0 - 2.0 * r, 0.05 * g0);
  return {q, r};
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": length mismatch (" << a << " vs " << b << ")";
    throw Error(ErrorCode::ContractViolation, os.str());
  }
}

}  // namespace

void TimeSeriesSegment::validate() const {
  if (timestamps.size() != values.size()) {
    throw Error(ErrorCode::ContractViolation,
                "segment '" + series_id + "' has mismatched timestamp/value lengths");
  }
  if (values.size() < 2) {
    throw Error(ErrorCode::ContractViolation, "segment '" + series_id + "' has fewer than 2 points");
  }
  const EpochSeconds stride = timestamps[1] - timestamps[0];
  if (stride <= 0) {
    throw Error(ErrorCode::ContractViolation, "segment '" + series_id + "' timestamps not increasing");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] - timestamps[i - 1] != stride) {
      throw Error(ErrorCode::ContractViolation, "segment '" + series_id + "' has non-uniform stride");
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::ContractViolation, "segment '" + series_id + "' has non-finite values");
    }
  }
  for (std::size_t i = 0; i < meta.dimension_labels.size(); ++i) {
    for (std::size_t j = i + 1; j < meta.dimension_labels.size(); ++j) {
      if (meta.dimension_labels[i].first == meta.dimension_labels[j].first) {
        throw Error(ErrorCode::ContractViolation,
                    "segment '" + series_id + "' repeats dimension key '" +
                        meta.dimension_labels[i].first + "'");
      }
    }
  }
}

TimeSeriesSegment TimeSeriesSegment::from_values(std::string id, std::vector<double> values,
                                                 EpochSeconds start, EpochSeconds stride) {
  TimeSeriesSegment seg;
  seg.series_id = std::move(id);
  seg.timestamps.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    seg.timestamps[i] = start + static_cast<EpochSeconds>(i) * stride;
  }
  seg.values = std::move(values);
  return seg;
}

std::string validate(const ModelParams& p) {
  const bool finite = std::isfinite(p.a) && std::isfinite(p.c) && std::isfinite(p.q) &&
                      std::isfinite(p.r) && std::isfinite(p.x0) && std::isfinite(p.p0);
  if (!finite) throw Error(ErrorCode::ContractViolation, "model parameters must be finite");
  // q = 0 is a valid (deterministic-level) filter configuration; fitted models always have q > 0.
  if (p.q < 0.0) throw Error(ErrorCode::ContractViolation, "process variance q must be >= 0");
  if (p.r <= 0.0) throw Error(ErrorCode::ContractViolation, "measurement variance r must be > 0");
  if (p.p0 <= 0.0) throw Error(ErrorCode::ContractViolation, "initial variance p0 must be > 0");
  if (std::abs(p.c) > 1.0 + 1e-9) {
    return "transition coefficient |c| > 1: the state process is explosive";
  }
  return {};
}

FilterResult kalman_filter(const ModelParams& p, std::span<const double> y) {
  validate(p);
  const std::size_t n = y.size();
  FilterResult f;
  f.pred_mean.resize(n);
  f.pred_var.resize(n);
  f.filt_mean.resize(n);
  f.filt_var.resize(n);
  f.gains.resize(n);

  for (std::size_t t = 0; t < n; ++t) {
    double m = p.x0;
    double v = p.p0;
    if (t > 0) {
      m = p.c * f.filt_mean[t - 1];
      v = p.c * p.c * f.filt_var[t - 1] + p.q;
    }
    const double s = p.a * p.a * v + p.r;
    if (!(s > 0.0) || !std::isfinite(s)) {
      std::ostringstream os;
      os << "innovation variance " << s << " at t=" << t;
      throw Error(ErrorCode::NumericalBreakdown, os.str());
    }
    const double k = v * p.a / s;
    const double e = y[t] - p.a * m;
    f.pred_mean[t] = m;
    f.pred_var[t] = v;
    f.gains[t] = k;
    f.filt_mean[t] = m + k * e;
    // v - k*a*v rewritten as v*r/s; stays positive under rounding.
    f.filt_var[t] = v * p.r / s;
    f.loglik += -0.5 * (std::log(2.0 * std::numbers::pi * s) + e * e / s);
  }
  return f;
}

FilterResult kalman_filter(const ModelParams& params, const TimeSeriesSegment& segment) {
  return kalman_filter(params, std::span<const double>(segment.values));
}

SmoothResult kalman_smooth(const ModelParams& p, const FilterResult& f) {
  const std::size_t n = f.filt_mean.size();
  SmoothResult s;
  s.smooth_mean = f.filt_mean;
  s.smooth_var = f.filt_var;
  s.smoother_gain.assign(n, 0.0);
  if (n < 2) return s;

  for (std::size_t t = n - 1; t-- > 0;) {
    const double pv_next = f.pred_var[t + 1];
    if (!(pv_next > 0.0)) {
      std::ostringstream os;
      os << "predicted variance " << pv_next << " at t=" << (t + 1);
      throw Error(ErrorCode::NumericalBreakdown, os.str());
    }
    const double l = f.filt_var[t] * p.c / pv_next;
    s.smoother_gain[t] = l;
    s.smooth_mean[t] = f.filt_mean[t] + l * (s.smooth_mean[t + 1] - f.pred_mean[t + 1]);
    const double v = f.filt_var[t] + l * l * (s.smooth_var[t + 1] - pv_next);
    s.smooth_var[t] = std::max(v, f.filt_var[t] * kVarianceFloorRatio);
  }
  return s;
}

LocalLevelFit fit_local_level_traced(std::span<const double> y, const FitOptions& opts) {
  const std::size_t n = y.size();
  if (n < 8) {
    throw Error(ErrorCode::SegmentTooShort,
                "local-level fit needs at least 8 points, got " + std::to_string(n));
  }
  const double var = sample_variance(y);
  if (!(var >= kDegenerateVariance)) {
    throw Error(ErrorCode::DegenerateSeries, "sample variance below 1e-12 (constant series)");
  }
  const double floor = var * kVarianceFloorRatio;

  LocalLevelFit fit;
  ModelParams& p = fit.params;
  p.a = 1.0;
  p.c = 1.0;
  p.x0 = y[0];
  p.p0 = std::max(var, kMinInitialVariance);
  // EM creeps along flat ridges (r -> 0 for a near random walk), so start
  // from whichever of the moment estimate and a grid of signal-to-noise
  // ratios q/r (holding q + 2r at the first-difference variance) has the
  // highest likelihood.
  const auto [q0, r0] = moment_start(y);
  p.q = std::max(q0, floor);
  p.r = std::max(r0, floor);
  {
    const double g0 = q0 + 2.0 * r0;
    double best = kalman_filter(p, y).loglik;
    ModelParams cand = p;
    for (double ratio : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4}) {
      cand.r = std::max(g0 / (ratio + 2.0), floor);
      cand.q = std::max(ratio * cand.r, floor);
      const double ll = kalman_filter(cand, y).loglik;
      if (ll > best) {
        best = ll;
        p.q = cand.q;
        p.r = cand.r;
      }
    }
  }

  for (int it = 0;; ++it) {
    const FilterResult f = kalman_filter(p, y);
    fit.loglik_trace.push_back(f.loglik);
    fit.iterations = it;
    if (it > 0 && f.loglik - fit.loglik_trace[it - 1] < opts.loglik_tol) {
      fit.converged = true;
      break;
    }
    if (it >= opts.max_em_iters) break;

    // M-step with a = c = 1 and the prior fixed; exact EM for (q, r).
    const SmoothResult s = kalman_smooth(p, f);
    double r_acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double e = y[t] - s.smooth_mean[t];
      r_acc += e * e + s.smooth_var[t];
    }
    double q_acc = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
      const double d = s.smooth_mean[t] - s.smooth_mean[t - 1];
      // Cov(x[t], x[t-1] | y) = L[t-1] * P[t|T]
      const double lag_cov = s.smoother_gain[t - 1] * s.smooth_var[t];
      q_acc += d * d + s.smooth_var[t] + s.smooth_var[t - 1] - 2.0 * lag_cov;
    }
    p.r = std::max(r_acc / static_cast<double>(n), floor);
    p.q = std::max(q_acc / static_cast<double>(n - 1), floor);
  }
  return fit;
}

ModelParams fit_local_level(const TimeSeriesSegment& segment, const FitOptions& opts) {
  return fit_local_level_traced(segment.values, opts).params;
}

namespace {

ResidualProcess residuals_from(const TimeSeriesSegment& seg, const std::vector<double>& mean,
                               const std::vector<double>& var, const ModelParams& p) {
  check_lengths(seg.values.size(), mean.size(), "extract_residuals");
  check_lengths(mean.size(), var.size(), "extract_residuals");
  ResidualProcess out;
  out.series_id = seg.series_id;
  out.residuals.resize(mean.size());
  out.scale.resize(mean.size());
  for (std::size_t t = 0; t < mean.size(); ++t) {
    out.residuals[t] = seg.values[t] - p.a * mean[t];
    out.scale[t] = std::sqrt(p.a * p.a * var[t] + p.r);
  }
  return out;
}

}  // namespace

ResidualProcess extract_residuals(const TimeSeriesSegment& segment, const SmoothResult& smooth,
                                  const ModelParams& params) {
  return residuals_from(segment, smooth.smooth_mean, smooth.smooth_var, params);
}

ResidualProcess extract_filtered_residuals(const TimeSeriesSegment& segment,
                                           const FilterResult& filter, const ModelParams& params) {
  return residuals_from(segment, filter.filt_mean, filter.filt_var, params);
}

}  // namespace statealign
