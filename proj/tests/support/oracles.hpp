#pragma once

// Independent reference implementations used to check the library. They are
// deliberately naive: dense linear algebra and exhaustive enumeration.

#include <span>
#include <vector>

#include "statealign/discretize.hpp"
#include "statealign/model.hpp"

namespace statealign::oracle {

struct Posterior {
  std::vector<double> mean;
  std::vector<double> var;
};

/// Posterior of x[0..T-1] given y[0..T-1] by solving the joint Gaussian
/// precision system. Requires q > 0.
Posterior joint_gaussian_posterior(const ModelParams& p, std::span<const double> y);

/// Minimum path cost over every monotone warping path, enumerated recursively.
double brute_force_dtw(std::span<const int> a, std::span<const int> b);
double brute_force_dtw(std::span<const double> a, std::span<const double> b);

/// Number of monotone warping paths between sequences of length n and m.
long long count_warp_paths(std::size_t n, std::size_t m);

struct BestPath {
  std::vector<int> path;
  double log_prob = 0.0;
};

/// Most probable state path by enumerating all K^T paths.
BestPath brute_force_viterbi(const HmmParams& params, std::span<const double> z);

/// Log joint density of a path, written out from the model definition.
double path_log_prob(const HmmParams& params, std::span<const double> z, std::span<const int> path);

}  // namespace statealign::oracle
