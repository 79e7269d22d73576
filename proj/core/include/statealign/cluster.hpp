#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "statealign/discretize.hpp"
#include "statealign/matrix.hpp"

namespace statealign {

/// Medoid clustering over a precomputed alignment-cost matrix. Series are
/// identified by their row index.
struct ClusterResult {
  int n_clusters = 0;
  std::vector<int> assignments;  // cluster index per series
  std::vector<int> medoids;      // series index per cluster
  double within_cost = 0.0;
  std::vector<double> causality_scores;       // min pairwise DCI per cluster
  std::map<int, double> selection_curve;      // M -> mean silhouette
  std::map<int, double> within_cost_curve;    // M -> best within-cluster cost

  std::vector<std::vector<int>> members() const;
};

/// For every M in 2..m_max, keeps the best of iter_max seeded random medoid
/// restarts (plus one restart warm-started from the best M-1 solution), then
/// selects M by the largest mean silhouette, ties going to the smaller M.
/// When every off-diagonal cost is zero the series are indistinguishable and
/// a single cluster is returned.
/// Errors: BadDistanceMatrix, PreconditionViolation (n < 2, m_max or iter_max out of range).
ClusterResult sac_dtw_cluster(const Matrix<double>& dmat, const Matrix<double>& dci, int m_max,
                              int iter_max, std::uint64_t seed);

/// Fixed-M medoid clustering used by sac_dtw_cluster; exposed for testing.
ClusterResult kmedoids(const Matrix<double>& dmat, int m, int iter_max, std::uint64_t seed,
                       const std::vector<int>* warm_start = nullptr);

/// Mean silhouette on a precomputed distance matrix; singletons contribute 0.
double silhouette(const Matrix<double>& dmat, const std::vector<int>& assignments);

/// Min DCI over unordered member pairs; 1 for a singleton.
double cluster_causality_score(const std::vector<int>& members, const Matrix<double>& dci);

struct GiniResult {
  std::vector<double> per_cluster;
  double weighted = 0.0;
};

/// Errors: MissingLabels if any series lacks a truth label.
GiniResult gini_impurity(const std::vector<int>& assignments,
                         const std::vector<std::optional<std::string>>& truth);

/// 1 - (matched / n) under greedy maximum-overlap matching of clusters to
/// truth groups. Errors: MissingLabels.
double classification_error(const std::vector<int>& assignments,
                            const std::vector<std::optional<std::string>>& truth);

struct RankEntry {
  int series = 0;
  std::string series_id;
  int precedence = 0;
  std::size_t first_top = 0;  // first top-state index, or sequence length
};

/// Precedence = sum over peers of sign(best_tau(U, V)); descending, ties by
/// earliest top-state entry and then series_id.
/// Errors: PreconditionViolation if fewer than 2 members.
std::vector<RankEntry> rank_root_causes(const std::vector<int>& members,
                                        const Matrix<int>& best_tau,
                                        const std::vector<StateSequence>& seqs);

}  // namespace statealign
