#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "statealign/discretize.hpp"
#include "statealign/matrix.hpp"

namespace statealign {

/// Monotone warping path from (0,0) to (n-1,m-1) using unit horizontal,
/// vertical and diagonal steps.
struct WarpPath {
  std::vector<std::pair<std::size_t, std::size_t>> points;

  std::size_t size() const noexcept { return points.size(); }
};

struct AlignmentResult {
  double cost = 0.0;
  WarpPath path;
};

/// Shift-augmented alignment summary for one ordered pair.
///
/// best_tau > 0 means the first sequence leads the second by best_tau steps.
struct DCIResult {
  double dci = 1.0;
  int best_tau = 0;
  double d_opt_zero = 0.0;
  double d_opt_best = 0.0;
  std::map<int, double> tau_profile;
};

/// Ordinal distance |r1 - r2|.
inline double state_distance(int r1, int r2) noexcept {
  return static_cast<double>(r1 > r2 ? r1 - r2 : r2 - r1);
}

/// Full-matrix DTW with backtrace. Backtrace ties prefer the diagonal, then
/// the vertical (i-1, j), then the horizontal (i, j-1) predecessor.
/// Errors: EmptySequence, AlphabetMismatch.
AlignmentResult dtw(const StateSequence& a, const StateSequence& b);

/// Cost-only DTW on rank vectors (two-row DP).
double dtw_cost(std::span<const int> a, std::span<const int> b);
/// Cost-only DTW on real values with |x - y| as the local distance.
double dtw_cost(std::span<const double> a, std::span<const double> b);

/// Default shift bound floor(N/4), clamped to the allowed range [1, floor(N/3)].
int default_tau_max(std::size_t n);

/// DTW cost of a[0:N-tau] against b[tau:N] for tau >= 0, and of a[|tau|:N]
/// against b[0:N-|tau|] for tau < 0. tau_max < 0 means "only |tau| < N".
/// Errors: ShiftTooLarge, EmptySequence, AlphabetMismatch, ContractViolation
/// (unequal lengths).
double shifted_dtw(const StateSequence& a, const StateSequence& b, int tau, int tau_max = -1);
double shifted_dtw(std::span<const double> a, std::span<const double> b, int tau, int tau_max = -1);

/// Evaluates every tau in [-tau_max, tau_max]. Ties on the minimum go to the
/// smallest |tau|; between +tau and -tau, the negative shift wins when a is
/// lexicographically <= b, otherwise the positive one. That keeps
/// best_tau(a, b) == -best_tau(b, a) exactly.
/// Errors: PreconditionViolation unless 1 <= tau_max <= floor(N/3).
DCIResult causality_index(const StateSequence& a, const StateSequence& b, int tau_max);
DCIResult causality_index(std::span<const double> a, std::span<const double> b, int tau_max);

struct PairwiseMatrices {
  Matrix<double> d_opt;             // D_opt(0), symmetric, zero diagonal
  Matrix<double> dci;               // symmetric, unit diagonal
  Matrix<int> best_tau;             // antisymmetric
  Matrix<double> min_shifted_cost;  // min_tau D_opt(tau), symmetric

  std::size_t size() const noexcept { return d_opt.rows(); }
};

/// All unordered pairs; evaluated concurrently with results independent of
/// the schedule. Errors: PreconditionViolation (< 2 sequences) plus anything
/// causality_index raises.
PairwiseMatrices pairwise_alignment(const std::vector<StateSequence>& seqs, int tau_max);
PairwiseMatrices pairwise_alignment(const std::vector<std::vector<double>>& series, int tau_max);

}  // namespace statealign
