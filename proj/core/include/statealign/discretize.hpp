#pragma once

#include <span>
#include <string>
#include <vector>

#include "statealign/matrix.hpp"
#include "statealign/model.hpp"

namespace statealign {

/// Ordered state alphabet. Ranks are 0..K-1 and ascend with severity, except
/// for the signed alphabet where rank K/2 is the normal state and ranks grow
/// from the most negative to the most positive excursion.
struct StateAlphabet {
  std::vector<std::string> labels;
  bool signed_states = false;

  int size() const noexcept { return static_cast<int>(labels.size()); }
  /// Number of magnitude levels (K for unsigned, (K+1)/2 for signed).
  int magnitude_levels() const noexcept { return signed_states ? (size() + 1) / 2 : size(); }
  /// Rank of the most severe state (any sign).
  bool is_top(int rank) const noexcept;
  /// Throws Error(ContractViolation) if K < 2 or a signed alphabet has even size.
  void validate() const;

  static StateAlphabet three_state();        // alpha, beta, lambda
  static StateAlphabet five_state_signed();  // lambda-, beta-, alpha, beta+, lambda+
  static StateAlphabet magnitude(int k);

  bool operator==(const StateAlphabet&) const = default;
};

struct StateSequence {
  std::string series_id;
  std::vector<int> states;
  StateAlphabet alphabet;

  std::size_t size() const noexcept { return states.size(); }
  /// Index of the first top-state entry, or size() if the series never gets there.
  std::size_t first_top_entry() const noexcept;
};

/// z[t] = residual[t] / scale[t]. Throws ContractViolation if any scale <= 0.
std::vector<double> standardize(const ResidualProcess& residuals);

/// Rank = number of cuts strictly below |z| (boundary values fall to the lower
/// state). For a signed alphabet the magnitude level is mirrored by sign.
StateSequence threshold_discretize(std::span<const double> z, const StateAlphabet& alphabet,
                                   std::span<const double> cuts, std::string series_id = {});

/// Default cuts for the given alphabet: the 2-sigma warning and 3-sigma anomaly edges.
std::vector<double> default_cuts(const StateAlphabet& alphabet);

/// Gaussian-emission HMM over |z| with states sorted by ascending emission mean.
struct HmmParams {
  int n_states = 0;
  std::vector<double> init_probs;
  Matrix<double> trans;
  std::vector<double> emit_means;
  std::vector<double> emit_vars;
};

struct HmmOptions {
  int max_iters = 100;
  double loglik_tol = 1e-6;
  double variance_floor = 1e-10;
};

struct HmmFit {
  HmmParams params;
  double loglik = 0.0;
  int iterations = 0;
  bool degenerate = false;  // an emission variance was floored
  std::vector<std::string> warnings;
};

/// Baum-Welch on magnitudes pooled across all sequences (one shared model).
/// Preconditions: k >= 2 and at least 10*k observations in total.
HmmFit hmm_fit(const std::vector<std::vector<double>>& z_all, int k, const HmmOptions& opts = {});

/// Viterbi decoding in log space. The alphabet must have n_states magnitude levels.
StateSequence hmm_decode(const HmmParams& params, std::span<const double> z,
                         const StateAlphabet& alphabet, std::string series_id = {});

/// Log-density of the most probable path; exposed for oracle tests.
double hmm_path_log_prob(const HmmParams& params, std::span<const double> z,
                         std::span<const int> path);

}  // namespace statealign
