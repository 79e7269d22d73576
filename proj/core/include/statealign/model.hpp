#pragma once

#include <span>
#include <string>
#include <vector>

#include "statealign/series.hpp"

namespace statealign {

/// Scalar linear-Gaussian state-space model
///
///   x[t+1] = c * x[t] + w[t],   w ~ N(0, q)
///   y[t]   = a * x[t] + v[t],   v ~ N(0, r)
///
/// with prior x[0] ~ N(x0, p0) on the first observed state.
struct ModelParams {
  double a = 1.0;
  double c = 1.0;
  double q = 1.0;
  double r = 1.0;
  double x0 = 0.0;
  double p0 = 1.0;

  bool operator==(const ModelParams&) const = default;
};

/// Throws Error(ContractViolation) unless q, r, p0 are positive and finite.
/// Returns a warning message (empty when none) if |c| exceeds 1 + 1e-9.
std::string validate(const ModelParams& params);

struct FitOptions {
  int max_em_iters = 50;
  double loglik_tol = 1e-6;
};

struct FilterResult {
  std::vector<double> pred_mean;  // x[t | t-1]; entry 0 is the prior
  std::vector<double> pred_var;
  std::vector<double> filt_mean;  // x[t | t]
  std::vector<double> filt_var;
  std::vector<double> gains;
  double loglik = 0.0;
};

struct SmoothResult {
  std::vector<double> smooth_mean;  // x[t | T]
  std::vector<double> smooth_var;
  std::vector<double> smoother_gain;  // L[t]; the last entry is unused and 0
};

struct ResidualProcess {
  std::string series_id;
  std::vector<double> residuals;
  std::vector<double> scale;
};

/// Result of the EM fit together with the per-iteration log-likelihood trace.
struct LocalLevelFit {
  ModelParams params;
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
};

/// Local-level model (a = c = 1) with q and r estimated by EM over the smoother.
/// x0 is the first observation, p0 the sample variance (floored at 1e-8).
/// EM starts from the moments of the first differences and floors q and r at
/// 1e-12 times the sample variance.
/// Errors: SegmentTooShort (< 8 points), DegenerateSeries (variance < 1e-12).
LocalLevelFit fit_local_level_traced(std::span<const double> values, const FitOptions& opts = {});
ModelParams fit_local_level(const TimeSeriesSegment& segment, const FitOptions& opts = {});

FilterResult kalman_filter(const ModelParams& params, std::span<const double> values);
FilterResult kalman_filter(const ModelParams& params, const TimeSeriesSegment& segment);

/// Rauch-Tung-Striebel backward pass anchored at the last filtered state.
SmoothResult kalman_smooth(const ModelParams& params, const FilterResult& filter);

/// residual[t] = y[t] - a * x[t|T]; scale[t] = sqrt(a^2 * P[t|T] + r).
ResidualProcess extract_residuals(const TimeSeriesSegment& segment, const SmoothResult& smooth,
                                  const ModelParams& params);

/// Same as extract_residuals but built from the filtered moments x[t|t], P[t|t].
ResidualProcess extract_filtered_residuals(const TimeSeriesSegment& segment,
                                           const FilterResult& filter, const ModelParams& params);

}  // namespace statealign
