#include "statealign/discretize.hpp"

#include <algorithm>
#include <cmath>

#include "statealign/error.hpp"

namespace statealign {

bool StateAlphabet::is_top(int rank) const noexcept {
  if (signed_states) return rank == 0 || rank == size() - 1;
  return rank == size() - 1;
}

void StateAlphabet::validate() const {
  if (size() < 2) throw Error(ErrorCode::ContractViolation, "state alphabet needs at least 2 states");
  if (signed_states && size() % 2 == 0) {
    throw Error(ErrorCode::ContractViolation, "signed alphabet must have an odd number of states");
  }
}

StateAlphabet StateAlphabet::three_state() { return {{"alpha", "beta", "lambda"}, false}; }

StateAlphabet StateAlphabet::five_state_signed() {
  return {{"lambda-", "beta-", "alpha", "beta+", "lambda+"}, true};
}

StateAlphabet StateAlphabet::magnitude(int k) {
  if (k == 3) return three_state();
  StateAlphabet a;
  for (int i = 0; i < k; ++i) a.labels.push_back("s" + std::to_string(i));
  return a;
}

std::size_t StateSequence::first_top_entry() const noexcept {
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (alphabet.is_top(states[t])) return t;
  }
  return states.size();
}

std::vector<double> standardize(const ResidualProcess& rp) {
  if (rp.residuals.size() != rp.scale.size()) {
    throw Error(ErrorCode::ContractViolation, "standardize: residual/scale length mismatch");
  }
  std::vector<double> z(rp.residuals.size());
  for (std::size_t t = 0; t < z.size(); ++t) {
    if (!(rp.scale[t] > 0.0)) {
      throw Error(ErrorCode::ContractViolation,
                  "standardize: non-positive scale at t=" + std::to_string(t));
    }
    z[t] = rp.residuals[t] / rp.scale[t];
  }
  return z;
}

std::vector<double> default_cuts(const StateAlphabet& alphabet) {
  const int levels = alphabet.magnitude_levels();
  if (levels == 2) return {3.0};
  if (levels == 3) return {2.0, 3.0};
  std::vector<double> cuts;
  for (int i = 0; i < levels - 1; ++i) cuts.push_back(2.0 + static_cast<double>(i) / (levels - 2));
  return cuts;
}

StateSequence threshold_discretize(std::span<const double> z, const StateAlphabet& alphabet,
                                   std::span<const double> cuts, std::string series_id) {
  alphabet.validate();
  const int levels = alphabet.magnitude_levels();
  if (static_cast<int>(cuts.size()) != levels - 1) {
    throw Error(ErrorCode::ContractViolation, "threshold_discretize: expected " +
                                                  std::to_string(levels - 1) + " cuts, got " +
                                                  std::to_string(cuts.size()));
  }
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (!(cuts[i] > 0.0) || (i > 0 && !(cuts[i] > cuts[i - 1]))) {
      throw Error(ErrorCode::ContractViolation, "threshold_discretize: cuts must be positive and ascending");
    }
  }

  StateSequence out;
  out.series_id = std::move(series_id);
  out.alphabet = alphabet;
  out.states.reserve(z.size());
  const int centre = levels - 1;
  for (double v : z) {
    const double mag = std::abs(v);
    int level = 0;
    for (double c : cuts) level += (c < mag) ? 1 : 0;
    if (!alphabet.signed_states) {
      out.states.push_back(level);
    } else {
      out.states.push_back(v < 0.0 ? centre - level : centre + level);
    }
  }
  return out;
}

}  // namespace statealign
