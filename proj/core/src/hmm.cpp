#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "statealign/discretize.hpp"
#include "statealign/error.hpp"

namespace statealign {

namespace {

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> init_quantile_levels(int k) {
  if (k == 3) return {0.50, 0.90, 0.99};
  // Tail mass shrinks geometrically from 0.5 to 0.01.
  std::vector<double> levels(k);
  for (int i = 0; i < k; ++i) {
    levels[i] = 1.0 - 0.5 * std::pow(0.02, static_cast<double>(i) / (k - 1));
  }
  return levels;
}

// Keeps the emission means strictly ascending; equal means are pushed apart by a
// tiny relative step so that state ranks stay well defined.
void enforce_ascending(std::vector<double>& means) {
  for (std::size_t i = 1; i < means.size(); ++i) {
    const double step = 1e-6 * std::max(1.0, std::abs(means[i - 1]));
    if (!(means[i] > means[i - 1])) means[i] = means[i - 1] + step;
  }
}

void sort_states(HmmParams& p) {
  const int k = p.n_states;
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return p.emit_means[a] < p.emit_means[b]; });
  HmmParams s;
  s.n_states = k;
  s.init_probs.resize(k);
  s.emit_means.resize(k);
  s.emit_vars.resize(k);
  s.trans = Matrix<double>(k, k);
  for (int i = 0; i < k; ++i) {
    s.init_probs[i] = p.init_probs[order[i]];
    s.emit_means[i] = p.emit_means[order[i]];
    s.emit_vars[i] = p.emit_vars[order[i]];
    for (int j = 0; j < k; ++j) s.trans(i, j) = p.trans(order[i], order[j]);
  }
  enforce_ascending(s.emit_means);
  p = std::move(s);
}

struct Accumulators {
  std::vector<double> init;
  Matrix<double> xi;
  std::vector<double> gamma_from;  // gamma summed over t < T-1
  std::vector<double> gamma;
  std::vector<double> gamma_x;
  std::vector<double> gamma_xx;
  double loglik = 0.0;

  explicit Accumulators(int k)
      : init(k, 0.0), xi(k, k, 0.0), gamma_from(k, 0.0), gamma(k, 0.0), gamma_x(k, 0.0),
        gamma_xx(k, 0.0) {}
};

// Scaled forward-backward on one sequence. Emission densities are normalised by
// their per-step maximum so that no step can underflow to an all-zero row.
void accumulate(const HmmParams& p, const std::vector<double>& x, Accumulators& acc) {
  const int k = p.n_states;
  const std::size_t n = x.size();
  if (n == 0) return;

  Matrix<double> b(n, k);
  std::vector<double> log_shift(n);
  for (std::size_t t = 0; t < n; ++t) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      b(t, i) = log_normal_pdf(x[t], p.emit_means[i], p.emit_vars[i]);
      mx = std::max(mx, b(t, i));
    }
    log_shift[t] = mx;
    for (int i = 0; i < k; ++i) b(t, i) = std::exp(b(t, i) - mx);
  }

  Matrix<double> alpha(n, k);
  std::vector<double> scale(n);
  for (std::size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      double a = 0.0;
      if (t == 0) {
        a = p.init_probs[j];
      } else {
        for (int i = 0; i < k; ++i) a += alpha(t - 1, i) * p.trans(i, j);
      }
      alpha(t, j) = a * b(t, j);
      sum += alpha(t, j);
    }
    if (!(sum > 0.0)) {
      // Every reachable state has zero emission weight; fall back to uniform.
      for (int j = 0; j < k; ++j) alpha(t, j) = 1.0 / k;
      sum = 1.0;
    } else {
      for (int j = 0; j < k; ++j) alpha(t, j) /= sum;
    }
    scale[t] = sum;
    acc.loglik += std::log(sum) + log_shift[t];
  }

  Matrix<double> beta(n, k, 1.0);
  for (std::size_t t = n - 1; t-- > 0;) {
    for (int i = 0; i < k; ++i) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) s += p.trans(i, j) * b(t + 1, j) * beta(t + 1, j);
      beta(t, i) = s / scale[t + 1];
    }
  }

  for (std::size_t t = 0; t < n; ++t) {
    double norm = 0.0;
    for (int i = 0; i < k; ++i) norm += alpha(t, i) * beta(t, i);
    for (int i = 0; i < k; ++i) {
      const double g = norm > 0.0 ? alpha(t, i) * beta(t, i) / norm : 0.0;
      if (t == 0) acc.init[i] += g;
      if (t + 1 < n) acc.gamma_from[i] += g;
      acc.gamma[i] += g;
      acc.gamma_x[i] += g * x[t];
      acc.gamma_xx[i] += g * x[t] * x[t];
    }
    if (t + 1 < n) {
      double xi_norm = 0.0;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          xi_norm += alpha(t, i) * p.trans(i, j) * b(t + 1, j) * beta(t + 1, j);
      if (xi_norm > 0.0) {
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j)
            acc.xi(i, j) += alpha(t, i) * p.trans(i, j) * b(t + 1, j) * beta(t + 1, j) / xi_norm;
      }
    }
  }
}

}  // namespace

HmmFit hmm_fit(const std::vector<std::vector<double>>& z_all, int k, const HmmOptions& opts) {
  if (k < 2) throw Error(ErrorCode::PreconditionViolation, "hmm_fit: need at least 2 states");

  std::vector<std::vector<double>> mags;
  std::vector<double> pooled;
  for (const auto& z : z_all) {
    if (z.empty()) continue;
    std::vector<double> m(z.size());
    std::transform(z.begin(), z.end(), m.begin(), [](double v) { return std::abs(v); });
    pooled.insert(pooled.end(), m.begin(), m.end());
    mags.push_back(std::move(m));
  }
  if (pooled.size() < static_cast<std::size_t>(10 * k)) {
    throw Error(ErrorCode::PreconditionViolation,
                "hmm_fit: need at least " + std::to_string(10 * k) + " observations, got " +
                    std::to_string(pooled.size()));
  }
  std::sort(pooled.begin(), pooled.end());

  HmmFit fit;
  HmmParams& p = fit.params;
  p.n_states = k;
  p.init_probs.assign(k, 1.0 / k);
  p.trans = Matrix<double>(k, k, 0.1 / (k - 1));
  for (int i = 0; i < k; ++i) p.trans(i, i) = 0.9;

  const double mean = std::accumulate(pooled.begin(), pooled.end(), 0.0) / pooled.size();
  double var = 0.0;
  for (double v : pooled) var += (v - mean) * (v - mean);
  var /= static_cast<double>(pooled.size());

  auto note_floor = [&](double& v) {
    if (v < opts.variance_floor) {
      v = opts.variance_floor;
      if (!fit.degenerate) {
        fit.warnings.push_back("DegenerateFit: emission variance collapsed; floored at " +
                               std::to_string(opts.variance_floor));
      }
      fit.degenerate = true;
    }
  };

  for (double level : init_quantile_levels(k)) p.emit_means.push_back(quantile(pooled, level));
  enforce_ascending(p.emit_means);
  p.emit_vars.assign(k, var);
  for (double& v : p.emit_vars) note_floor(v);

  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iters; ++it) {
    Accumulators acc(k);
    for (const auto& m : mags) accumulate(p, m, acc);
    fit.loglik = acc.loglik;
    fit.iterations = it + 1;
    if (it > 0 && acc.loglik - prev < opts.loglik_tol) break;
    prev = acc.loglik;

    const double n_seq = static_cast<double>(mags.size());
    for (int i = 0; i < k; ++i) p.init_probs[i] = acc.init[i] / n_seq;
    for (int i = 0; i < k; ++i) {
      if (acc.gamma_from[i] > 0.0) {
        double row = 0.0;
        for (int j = 0; j < k; ++j) row += acc.xi(i, j);
        if (row > 0.0) {
          for (int j = 0; j < k; ++j) p.trans(i, j) = acc.xi(i, j) / row;
        }
      }
      if (acc.gamma[i] > 0.0) {
        const double mu = acc.gamma_x[i] / acc.gamma[i];
        double v = acc.gamma_xx[i] / acc.gamma[i] - mu * mu;
        p.emit_means[i] = mu;
        note_floor(v);
        p.emit_vars[i] = v;
      }
    }
    sort_states(p);
  }
  return fit;
}

StateSequence hmm_decode(const HmmParams& p, std::span<const double> z,
                         const StateAlphabet& alphabet, std::string series_id) {
  alphabet.validate();
  if (alphabet.magnitude_levels() != p.n_states) {
    throw Error(ErrorCode::ContractViolation, "hmm_decode: alphabet does not match HMM state count");
  }
  const int k = p.n_states;
  const std::size_t n = z.size();
  StateSequence out;
  out.series_id = std::move(series_id);
  out.alphabet = alphabet;
  if (n == 0) return out;

  std::vector<double> log_pi(k);
  Matrix<double> log_a(k, k);
  for (int i = 0; i < k; ++i) {
    log_pi[i] = std::log(p.init_probs[i]);
    for (int j = 0; j < k; ++j) log_a(i, j) = std::log(p.trans(i, j));
  }

  Matrix<double> delta(n, k);
  Matrix<int> back(n, k, 0);
  for (int i = 0; i < k; ++i) {
    delta(0, i) = log_pi[i] + log_normal_pdf(std::abs(z[0]), p.emit_means[i], p.emit_vars[i]);
  }
  for (std::size_t t = 1; t < n; ++t) {
    const double x = std::abs(z[t]);
    for (int j = 0; j < k; ++j) {
      double best = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int i = 0; i < k; ++i) {
        const double v = delta(t - 1, i) + log_a(i, j);
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      delta(t, j) = best + log_normal_pdf(x, p.emit_means[j], p.emit_vars[j]);
      back(t, j) = arg;
    }
  }

  std::vector<int> path(n);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    if (delta(n - 1, i) > best) {
      best = delta(n - 1, i);
      path[n - 1] = i;
    }
  }
  for (std::size_t t = n - 1; t > 0; --t) path[t - 1] = back(t, path[t]);

  out.states.resize(n);
  const int centre = k - 1;
  for (std::size_t t = 0; t < n; ++t) {
    if (!alphabet.signed_states) {
      out.states[t] = path[t];
    } else {
      out.states[t] = z[t] < 0.0 ? centre - path[t] : centre + path[t];
    }
  }
  return out;
}

double hmm_path_log_prob(const HmmParams& p, std::span<const double> z, std::span<const int> path) {
  if (z.size() != path.size()) {
    throw Error(ErrorCode::ContractViolation, "hmm_path_log_prob: length mismatch");
  }
  double lp = 0.0;
  for (std::size_t t = 0; t < z.size(); ++t) {
    const int s = path[t];
    lp += t == 0 ? std::log(p.init_probs[s]) : std::log(p.trans(path[t - 1], s));
    lp += log_normal_pdf(std::abs(z[t]), p.emit_means[s], p.emit_vars[s]);
  }
  return lp;
}

}  // namespace statealign
