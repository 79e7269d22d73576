#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "statealign/align.hpp"
#include "statealign/cluster.hpp"
#include "statealign/config.hpp"
#include "statealign/discretize.hpp"
#include "statealign/model.hpp"
#include "statealign/series.hpp"

namespace statealign {

struct SeriesAnalysis {
  std::string series_id;
  ModelParams params;
  bool degenerate = false;  // constant series, assigned the normal state throughout
  std::vector<double> z;
  StateSequence states;
};

struct GroupSummary {
  std::string group;
  int size = 0;
  double dci_avg = 1.0;  // member-weighted mean of the cluster scores
  bool causal = false;   // dci_avg below config.causal_threshold
};

struct Evaluation {
  GiniResult gini;
  double classification_error = 0.0;
  std::map<int, double> error_by_m_max;  // classification error when the cap is m
  std::vector<GroupSummary> groups;      // sorted by group label
};

struct ClusterRanking {
  int cluster = 0;
  bool actionable = false;  // >= 2 members and causality score < 1
  std::vector<RankEntry> entries;
};

struct PipelineResult {
  PipelineConfig config;
  int tau_max = 0;
  int m_max_used = 0;
  std::vector<SeriesAnalysis> series;
  PairwiseMatrices pairwise;
  ClusterResult clusters;
  std::vector<std::optional<double>> raw_min_shifted_cost;  // per cluster; empty for singletons
  std::vector<ClusterRanking> rankings;                     // clusters with >= 2 members
  std::optional<Evaluation> evaluation;
  std::vector<std::string> warnings;

  std::vector<StateSequence> sequences() const;
};

/// Model fit, residual extraction and discretization for every segment.
/// Constant segments get all-normal states and a warning. Errors name the
/// series and stage and keep the original error code.
std::vector<SeriesAnalysis> analyze_series(const PipelineConfig& config,
                                           const std::vector<TimeSeriesSegment>& segments,
                                           std::vector<std::string>& warnings);

/// Full composition: states, pairwise alignment, clustering, scores, ranking,
/// and an evaluation block when every segment carries a group label.
/// Errors: PreconditionViolation (< 2 segments), ContractViolation (unequal lengths),
/// ConfigError (tau_max out of range), plus anything the stages raise.
PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<TimeSeriesSegment>& segments);

}  // namespace statealign
