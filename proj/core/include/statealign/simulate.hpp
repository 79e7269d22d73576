#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "statealign/align.hpp"
#include "statealign/cluster.hpp"
#include "statealign/config.hpp"
#include "statealign/series.hpp"

namespace statealign {

enum class SimMode { Causal, NonCausal };

std::string_view to_string(SimMode mode) noexcept;

/// Grouped synthetic data with one injected anomaly per group.
///
/// Each group shares a fluctuation stream: unit-variance Gaussian noise plus
/// sparse large shocks and the 3-point anomaly, whose intensity is in units of
/// that Gaussian noise. In causal mode followers see the stream delayed by
/// their tier times the group lag; in non-causal mode all members see it at
/// once. Every series adds its own random-walk level and a little
/// idiosyncratic noise, and the whole series is multiplied by the group's
/// scale factor 10^exponent. Member ids are shuffled within the group; the
/// schedule says which one leads.
struct SimSpec {
  int n_groups = 5;
  int series_per_group = 10;
  int length = 50;
  std::vector<double> scale_exponents{0.0, 1.25, 2.5, 3.75, 5.0};
  std::vector<double> anomaly_intensities{3.0, 5.0, 8.0};
  std::vector<int> causal_lags{2, 3, 4};  // cycled over groups
  SimMode mode = SimMode::Causal;
  std::uint64_t seed = 0;

  // Generator shape. Level noise variance q is log-uniform in
  // [10^q_log10_min, 10^q_log10_max] per group.
  double q_log10_min = -2.0;
  double q_log10_max = -1.0;
  double idiosyncratic_sd = 0.2;  // share of the unit noise that is series-specific
  double shock_rate = 3.0;        // expected shared shocks per `length` steps
  double shock_min = 20.0;
  double shock_max = 20.0;
  int epicenter_min = 8;  // epicenters drawn without replacement from [min, max)
  int epicenter_max = 30;
  double level_offset = 10.0;  // baseline added before scaling
  double trend_sd = 0.0;       // per-series linear drift per step, N(0, trend_sd^2)
  // Followers are grouped into tiers of `fanout` members; tier i trails the
  // leader by i * lag. fanout 1 is a chain, fanout >= series_per_group - 1 a star.
  int fanout = 1;

  // Experiment sweep.
  std::vector<int> m_max_sweep{2, 3, 4, 5, 6, 7, 8};

  bool operator==(const SimSpec&) const = default;

  /// Throws Error(SpecInvalid) naming the offending field.
  void validate() const;
};

SimSpec parse_sim_spec(std::string_view json_text);
SimSpec load_sim_spec(const std::filesystem::path& path);
std::string to_json(const SimSpec& spec);

/// Ground truth for one series.
struct Injection {
  std::string series_id;
  std::string group;
  int member = 0;      // position within the group; 0 is the leader
  int onset = 0;       // planned first anomalous index (may lie past the end)
  int visible = 0;     // anomalous points inside the window (0..3)
};

struct SimDataset {
  std::vector<TimeSeriesSegment> segments;  // sorted by series_id; group_label set
  std::vector<Injection> schedule;          // parallel to segments
  std::vector<int> epicenters;              // per group
  double intensity = 0.0;
};

/// Deterministic under spec.seed; the intensity is in noise-sigma units.
/// Errors: SpecInvalid.
SimDataset generate_dataset(const SimSpec& spec, double intensity);

/// Min-max normalisation to [0, 1]; a constant series becomes all 0.5.
std::vector<double> minmax_normalize(const std::vector<double>& values);

/// Baseline: normalised raw values, real-valued DTW, same shift machinery.
PairwiseMatrices cdtw_baseline(const std::vector<TimeSeriesSegment>& segments, int tau_max);

enum class Method { SacFilter, SacSmoother, CDtw };
std::string_view to_string(Method method) noexcept;
inline constexpr Method kAllMethods[] = {Method::SacFilter, Method::SacSmoother, Method::CDtw};

/// Clustering and scores of one method on one dataset.
struct MethodRun {
  PairwiseMatrices pairwise;
  std::map<int, ClusterResult> by_m_max;
};

MethodRun run_method(Method method, const std::vector<TimeSeriesSegment>& segments,
                     const PipelineConfig& config, const std::vector<int>& m_max_values);

struct ExperimentResult {
  // (method, m_max) -> classification error averaged over intensities, in spec.mode.
  std::map<std::pair<Method, int>, double> classification_error;
  // (method, mode) -> cluster causality scores at config.m_max, both modes.
  std::map<std::pair<Method, SimMode>, std::vector<double>> dci_samples;
  std::map<Method, std::int64_t> runtime_ms;
};

/// Runs every method on every intensity, for spec.mode and its opposite mode
/// (the latter only feeds dci_samples).
ExperimentResult run_experiment(const SimSpec& spec, const PipelineConfig& config);

}  // namespace statealign
