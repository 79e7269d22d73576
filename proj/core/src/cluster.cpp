#include "statealign/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "statealign/error.hpp"
#include "statealign/parallel.hpp"

namespace statealign {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kSymmetryTol = 1e-9;

void validate_matrix(const Matrix<double>& d, const char* name) {
  if (d.rows() != d.cols()) {
    throw Error(ErrorCode::BadDistanceMatrix, std::string(name) + " is not square");
  }
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) {
        throw Error(ErrorCode::BadDistanceMatrix, std::string(name) + " has a negative or non-finite entry");
      }
      if (std::abs(d(i, j) - d(j, i)) > kSymmetryTol) {
        throw Error(ErrorCode::BadDistanceMatrix, std::string(name) + " is not symmetric");
      }
    }
  }
}

struct Solution {
  std::vector<int> medoids;
  std::vector<int> assignments;
  double cost = std::numeric_limits<double>::infinity();
};

void assign(const Matrix<double>& d, Solution& s) {
  const std::size_t n = d.rows();
  s.assignments.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    for (int c = 1; c < static_cast<int>(s.medoids.size()); ++c) {
      if (d(i, s.medoids[c]) < d(i, s.medoids[best])) best = c;
    }
    s.assignments[i] = best;
  }
  for (int c = 0; c < static_cast<int>(s.medoids.size()); ++c) s.assignments[s.medoids[c]] = c;
  s.cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) s.cost += d(i, s.medoids[s.assignments[i]]);
}

// Alternates nearest-medoid assignment and per-cluster medoid update until
// neither changes. The current medoid is kept on ties.
Solution refine(const Matrix<double>& d, std::vector<int> medoids) {
  const std::size_t n = d.rows();
  Solution s;
  s.medoids = std::move(medoids);
  assign(d, s);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool changed = false;
    for (int c = 0; c < static_cast<int>(s.medoids.size()); ++c) {
      auto within = [&](int cand) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if (s.assignments[i] == c) sum += d(i, cand);
        return sum;
      };
      int best = s.medoids[c];
      double best_sum = within(best);
      for (std::size_t i = 0; i < n; ++i) {
        if (s.assignments[i] != c || static_cast<int>(i) == s.medoids[c]) continue;
        const double sum = within(static_cast<int>(i));
        if (sum < best_sum) {
          best_sum = sum;
          best = static_cast<int>(i);
        }
      }
      if (best != s.medoids[c]) {
        s.medoids[c] = best;
        changed = true;
      }
    }
    const std::vector<int> before = s.assignments;
    assign(d, s);
    if (!changed && before == s.assignments) break;
  }
  return s;
}

std::vector<int> random_medoids(std::size_t n, int m, std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  // Partial Fisher-Yates; modulo keeps the draw identical across standard libraries.
  for (int k = 0; k < m; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng() % (n - k));
    std::swap(pool[k], pool[j]);
  }
  pool.resize(m);
  return pool;
}

std::vector<int> extend_medoids(const Matrix<double>& d, const std::vector<int>& base) {
  const std::size_t n = d.rows();
  std::vector<int> medoids = base;
  int far = -1;
  double far_dist = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(base.begin(), base.end(), static_cast<int>(i)) != base.end()) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (int m : base) nearest = std::min(nearest, d(i, m));
    if (nearest > far_dist) {
      far_dist = nearest;
      far = static_cast<int>(i);
    }
  }
  medoids.push_back(far);
  return medoids;
}

ClusterResult to_result(const Solution& s) {
  ClusterResult r;
  r.n_clusters = static_cast<int>(s.medoids.size());
  r.assignments = s.assignments;
  r.medoids = s.medoids;
  r.within_cost = s.cost;
  return r;
}

}  // namespace

std::vector<std::vector<int>> ClusterResult::members() const {
  std::vector<std::vector<int>> out(n_clusters);
  for (std::size_t i = 0; i < assignments.size(); ++i) out[assignments[i]].push_back(static_cast<int>(i));
  return out;
}

ClusterResult kmedoids(const Matrix<double>& d, int m, int iter_max, std::uint64_t seed,
                       const std::vector<int>* warm_start) {
  const std::size_t n = d.rows();
  if (m < 1 || static_cast<std::size_t>(m) > n) {
    throw Error(ErrorCode::PreconditionViolation, "kmedoids: cluster count out of range");
  }
  if (iter_max < 1) throw Error(ErrorCode::PreconditionViolation, "kmedoids: iter_max must be >= 1");

  const int runs = iter_max + (warm_start ? 1 : 0);
  std::vector<Solution> solutions(runs);
  parallel_for(static_cast<std::size_t>(runs), [&](std::size_t k) {
    const int restart = static_cast<int>(k);
    std::vector<int> start = restart < iter_max ? random_medoids(n, m, seed, restart)
                                                : extend_medoids(d, *warm_start);
    solutions[k] = refine(d, std::move(start));
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < solutions.size(); ++k) {
    if (solutions[k].cost < solutions[best].cost) best = k;
  }
  return to_result(solutions[best]);
}

double silhouette(const Matrix<double>& d, const std::vector<int>& assignments) {
  const std::size_t n = d.rows();
  const int k = assignments.empty() ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
  std::vector<int> sizes(k, 0);
  for (int a : assignments) ++sizes[a];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int own = assignments[i];
    if (sizes[own] <= 1) continue;
    std::vector<double> sums(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) sums[assignments[j]] += d(i, j);
    const double a = sums[own] / (sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / sizes[c]);
    }
    if (!std::isfinite(b)) continue;
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return n ? total / static_cast<double>(n) : 0.0;
}

double cluster_causality_score(const std::vector<int>& members, const Matrix<double>& dci) {
  double score = 1.0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      score = std::min(score, dci(members[i], members[j]));
  return score;
}

ClusterResult sac_dtw_cluster(const Matrix<double>& dmat, const Matrix<double>& dci, int m_max,
                              int iter_max, std::uint64_t seed) {
  validate_matrix(dmat, "D_opt matrix");
  const std::size_t n = dmat.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(dmat(i, i)) > kSymmetryTol) {
      throw Error(ErrorCode::BadDistanceMatrix, "D_opt matrix has a nonzero diagonal");
    }
  }
  if (dci.rows() != n || dci.cols() != n) {
    throw Error(ErrorCode::BadDistanceMatrix, "DCI matrix shape differs from D_opt matrix");
  }
  if (n < 2) throw Error(ErrorCode::PreconditionViolation, "sac_dtw_cluster: need at least 2 series");
  if (m_max < 2 || static_cast<std::size_t>(m_max) > n) {
    throw Error(ErrorCode::PreconditionViolation,
                "sac_dtw_cluster: m_max must lie in [2, n] (n=" + std::to_string(n) + ")");
  }
  if (iter_max < 1) throw Error(ErrorCode::PreconditionViolation, "sac_dtw_cluster: iter_max must be >= 1");

  bool all_zero = true;
  for (double v : dmat.data()) all_zero = all_zero && v == 0.0;

  ClusterResult chosen;
  if (all_zero) {
    chosen.n_clusters = 1;
    chosen.assignments.assign(n, 0);
    chosen.medoids = {0};
  } else {
    double best_sil = -std::numeric_limits<double>::infinity();
    std::vector<ClusterResult> by_m;
    for (int m = 2; m <= m_max; ++m) {
      const std::vector<int>* warm = by_m.empty() ? nullptr : &by_m.back().medoids;
      by_m.push_back(kmedoids(dmat, m, iter_max, seed, warm));
      const ClusterResult& r = by_m.back();
      const double sil = silhouette(dmat, r.assignments);
      chosen.selection_curve[m] = sil;
      chosen.within_cost_curve[m] = r.within_cost;
      if (sil > best_sil) best_sil = sil;
    }
    int pick = 2;
    for (int m = 2; m <= m_max; ++m) {
      if (chosen.selection_curve[m] == best_sil) {
        pick = m;
        break;
      }
    }
    const ClusterResult& r = by_m[pick - 2];
    chosen.n_clusters = r.n_clusters;
    chosen.assignments = r.assignments;
    chosen.medoids = r.medoids;
    chosen.within_cost = r.within_cost;
  }
  for (const auto& members : chosen.members()) {
    chosen.causality_scores.push_back(cluster_causality_score(members, dci));
  }
  return chosen;
}

namespace {

std::vector<std::string> require_labels(const std::vector<int>& assignments,
                                        const std::vector<std::optional<std::string>>& truth) {
  if (truth.size() != assignments.size()) {
    throw Error(ErrorCode::MissingLabels, "truth labels do not cover every series");
  }
  std::vector<std::string> out;
  out.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth[i]) throw Error(ErrorCode::MissingLabels, "series " + std::to_string(i) + " has no group label");
    out.push_back(*truth[i]);
  }
  return out;
}

}  // namespace

GiniResult gini_impurity(const std::vector<int>& assignments,
                         const std::vector<std::optional<std::string>>& truth) {
  const auto labels = require_labels(assignments, truth);
  const int k = assignments.empty() ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
  std::vector<std::map<std::string, int>> counts(k);
  std::vector<int> sizes(k, 0);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    ++counts[assignments[i]][labels[i]];
    ++sizes[assignments[i]];
  }
  GiniResult g;
  g.per_cluster.assign(k, 0.0);
  for (int c = 0; c < k; ++c) {
    if (sizes[c] == 0) continue;
    double sum_sq = 0.0;
    for (const auto& [label, count] : counts[c]) {
      const double p = static_cast<double>(count) / sizes[c];
      sum_sq += p * p;
    }
    g.per_cluster[c] = 1.0 - sum_sq;
    g.weighted += g.per_cluster[c] * sizes[c];
  }
  if (!assignments.empty()) g.weighted /= static_cast<double>(assignments.size());
  return g;
}

double classification_error(const std::vector<int>& assignments,
                            const std::vector<std::optional<std::string>>& truth) {
  const auto labels = require_labels(assignments, truth);
  if (assignments.empty()) return 0.0;
  std::map<std::pair<int, std::string>, int> overlap;
  for (std::size_t i = 0; i < assignments.size(); ++i) ++overlap[{assignments[i], labels[i]}];
  std::vector<std::pair<std::pair<int, std::string>, int>> cells(overlap.begin(), overlap.end());
  std::stable_sort(cells.begin(), cells.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::set<int> used_clusters;
  std::set<std::string> used_groups;
  int matched = 0;
  for (const auto& [key, count] : cells) {
    if (used_clusters.contains(key.first) || used_groups.contains(key.second)) continue;
    used_clusters.insert(key.first);
    used_groups.insert(key.second);
    matched += count;
  }
  return 1.0 - static_cast<double>(matched) / static_cast<double>(assignments.size());
}

std::vector<RankEntry> rank_root_causes(const std::vector<int>& members, const Matrix<int>& best_tau,
                                        const std::vector<StateSequence>& seqs) {
  if (members.size() < 2) {
    throw Error(ErrorCode::PreconditionViolation, "rank_root_causes: cluster needs at least 2 members");
  }
  std::vector<RankEntry> out;
  out.reserve(members.size());
  for (int u : members) {
    RankEntry e;
    e.series = u;
    e.series_id = seqs[u].series_id;
    e.first_top = seqs[u].first_top_entry();
    for (int v : members) {
      if (v == u) continue;
      const int t = best_tau(u, v);
      e.precedence += (t > 0) - (t < 0);
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.precedence != b.precedence) return a.precedence > b.precedence;
    if (a.first_top != b.first_top) return a.first_top < b.first_top;
    return a.series_id < b.series_id;
  });
  return out;
}

}  // namespace statealign
