#include "statealign/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "statealign/error.hpp"
#include "statealign/parallel.hpp"

namespace statealign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename T>
double local_distance(T x, T y) {
  return std::abs(static_cast<double>(x) - static_cast<double>(y));
}

template <typename T>
double dtw_rolling(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySequence, "dtw: empty input");
  const std::size_t m = b.size();
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0 && j > 0) best = prev[j - 1];
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, cur[j - 1]);
      }
      cur[j] = best + local_distance(a[i], b[j]);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

void check_pair(const StateSequence& a, const StateSequence& b) {
  if (a.states.empty() || b.states.empty()) {
    throw Error(ErrorCode::EmptySequence, "dtw: empty state sequence");
  }
  if (!(a.alphabet == b.alphabet)) {
    throw Error(ErrorCode::AlphabetMismatch,
                "dtw: '" + a.series_id + "' and '" + b.series_id + "' use different alphabets");
  }
}

template <typename T>
double shifted_cost(std::span<const T> a, std::span<const T> b, int tau, int tau_max) {
  const std::size_t n = a.size();
  if (b.size() != n) throw Error(ErrorCode::ContractViolation, "shifted_dtw: unequal lengths");
  const std::size_t shift = static_cast<std::size_t>(tau < 0 ? -static_cast<long>(tau) : tau);
  if (shift >= n || (tau_max >= 0 && shift > static_cast<std::size_t>(tau_max))) {
    throw Error(ErrorCode::ShiftTooLarge,
                "shifted_dtw: |tau|=" + std::to_string(shift) + " with N=" + std::to_string(n) +
                    (tau_max >= 0 ? ", tau_max=" + std::to_string(tau_max) : std::string{}));
  }
  const std::size_t len = n - shift;
  if (tau >= 0) return dtw_rolling(a.subspan(0, len), b.subspan(shift, len));
  return dtw_rolling(a.subspan(shift, len), b.subspan(0, len));
}

template <typename T>
DCIResult causality(std::span<const T> a, std::span<const T> b, int tau_max) {
  const std::size_t n = a.size();
  if (b.size() != n) throw Error(ErrorCode::ContractViolation, "causality_index: unequal lengths");
  if (tau_max < 1 || static_cast<std::size_t>(tau_max) > n / 3) {
    throw Error(ErrorCode::PreconditionViolation,
                "causality_index: tau_max must lie in [1, floor(N/3)] (N=" + std::to_string(n) +
                    ", tau_max=" + std::to_string(tau_max) + ")");
  }
  DCIResult r;
  for (int tau = -tau_max; tau <= tau_max; ++tau) {
    r.tau_profile[tau] = shifted_cost(a, b, tau, tau_max);
  }
  r.d_opt_zero = r.tau_profile.at(0);
  const bool negative_first = std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()) ||
                              std::equal(a.begin(), a.end(), b.begin(), b.end());
  int best = 0;
  double best_cost = r.d_opt_zero;
  for (int s = 1; s <= tau_max; ++s) {
    const int first = negative_first ? -s : s;
    for (int tau : {first, -first}) {
      const double c = r.tau_profile.at(tau);
      if (c < best_cost) {
        best_cost = c;
        best = tau;
      }
    }
  }
  r.d_opt_best = best_cost;
  if (r.d_opt_zero == 0.0) {
    r.dci = 1.0;
    r.best_tau = 0;
  } else {
    r.dci = best_cost / r.d_opt_zero;
    r.best_tau = best;
  }
  return r;
}

template <typename Seq, typename Fn>
PairwiseMatrices pairwise(const std::vector<Seq>& items, Fn&& index) {
  const std::size_t n = items.size();
  if (n < 2) throw Error(ErrorCode::PreconditionViolation, "pairwise_alignment: need at least 2 series");
  PairwiseMatrices pm{Matrix<double>(n, n, 0.0), Matrix<double>(n, n, 1.0), Matrix<int>(n, n, 0),
                      Matrix<double>(n, n, 0.0)};
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) pairs.emplace_back(u, v);

  std::vector<DCIResult> results(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    results[k] = index(items[pairs[k].first], items[pairs[k].second]);
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [u, v] = pairs[k];
    const DCIResult& r = results[k];
    pm.d_opt(u, v) = pm.d_opt(v, u) = r.d_opt_zero;
    pm.dci(u, v) = pm.dci(v, u) = r.dci;
    pm.min_shifted_cost(u, v) = pm.min_shifted_cost(v, u) = r.d_opt_best;
    pm.best_tau(u, v) = r.best_tau;
    pm.best_tau(v, u) = -r.best_tau;
  }
  return pm;
}

}  // namespace

AlignmentResult dtw(const StateSequence& a, const StateSequence& b) {
  check_pair(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  Matrix<double> acc(n, m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double best = 0.0;
      if (i > 0 || j > 0) {
        best = kInf;
        if (i > 0 && j > 0) best = acc(i - 1, j - 1);
        if (i > 0) best = std::min(best, acc(i - 1, j));
        if (j > 0) best = std::min(best, acc(i, j - 1));
      }
      acc(i, j) = best + state_distance(a.states[i], b.states[j]);
    }
  }

  AlignmentResult out;
  out.cost = acc(n - 1, m - 1);
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  out.path.points.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const double d = acc(i - 1, j - 1);
      const double v = acc(i - 1, j);
      const double h = acc(i, j - 1);
      if (d <= v && d <= h) {
        --i;
        --j;
      } else if (v <= h) {
        --i;
      } else {
        --j;
      }
    } else if (i > 0) {
      --i;
    } else {
      --j;
    }
    out.path.points.emplace_back(i, j);
  }
  std::reverse(out.path.points.begin(), out.path.points.end());
  return out;
}

double dtw_cost(std::span<const int> a, std::span<const int> b) { return dtw_rolling(a, b); }

double dtw_cost(std::span<const double> a, std::span<const double> b) { return dtw_rolling(a, b); }

int default_tau_max(std::size_t n) {
  const auto upper = static_cast<int>(n / 3);
  return std::clamp(static_cast<int>(n / 4), 1, std::max(1, upper));
}

double shifted_dtw(const StateSequence& a, const StateSequence& b, int tau, int tau_max) {
  check_pair(a, b);
  return shifted_cost(std::span<const int>(a.states), std::span<const int>(b.states), tau, tau_max);
}

double shifted_dtw(std::span<const double> a, std::span<const double> b, int tau, int tau_max) {
  return shifted_cost(a, b, tau, tau_max);
}

DCIResult causality_index(const StateSequence& a, const StateSequence& b, int tau_max) {
  check_pair(a, b);
  return causality(std::span<const int>(a.states), std::span<const int>(b.states), tau_max);
}

DCIResult causality_index(std::span<const double> a, std::span<const double> b, int tau_max) {
  return causality(a, b, tau_max);
}

PairwiseMatrices pairwise_alignment(const std::vector<StateSequence>& seqs, int tau_max) {
  for (std::size_t i = 1; i < seqs.size(); ++i) {
    if (!(seqs[i].alphabet == seqs[0].alphabet)) {
      throw Error(ErrorCode::AlphabetMismatch, "pairwise_alignment: mixed alphabets");
    }
    if (seqs[i].size() != seqs[0].size()) {
      throw Error(ErrorCode::ContractViolation, "pairwise_alignment: unequal lengths");
    }
  }
  return pairwise(seqs, [tau_max](const StateSequence& a, const StateSequence& b) {
    return causality_index(a, b, tau_max);
  });
}

PairwiseMatrices pairwise_alignment(const std::vector<std::vector<double>>& series, int tau_max) {
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].size() != series[0].size()) {
      throw Error(ErrorCode::ContractViolation, "pairwise_alignment: unequal lengths");
    }
  }
  return pairwise(series, [tau_max](const std::vector<double>& a, const std::vector<double>& b) {
    return causality_index(std::span<const double>(a), std::span<const double>(b), tau_max);
  });
}

}  // namespace statealign
