#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "statealign/discretize.hpp"
#include "statealign/model.hpp"
#include "statealign/series.hpp"

namespace statealign {

enum class StateMethod { Threshold, Hmm };
enum class Estimator { Filter, Smoother };
enum class AlphabetKind { Unsigned, Signed };  // "3-state" | "5-state-signed"

struct TimeWindow {
  EpochSeconds start = 0;
  EpochSeconds end = 0;  // inclusive

  bool operator==(const TimeWindow&) const = default;
};

/// Every knob of the analysis. Field names match the JSON keys.
struct PipelineConfig {
  std::optional<TimeWindow> window;
  StateMethod state_method = StateMethod::Threshold;
  Estimator estimator = Estimator::Smoother;
  std::vector<double> cuts{2.0, 3.0};
  int hmm_states = 3;
  std::optional<int> tau_max;  // empty means "auto": floor(N/4)
  int m_max = 8;
  int iter_max = 10;
  std::uint64_t seed = 0;
  AlphabetKind alphabet = AlphabetKind::Unsigned;
  // Groups whose mean DCI falls below this are annotated causal (C).
  double causal_threshold = 0.5;
  int max_em_iters = 50;
  double loglik_tol = 1e-6;

  bool operator==(const PipelineConfig&) const = default;

  /// Alphabet implied by `alphabet` and the number of magnitude levels.
  StateAlphabet state_alphabet() const;
  FitOptions fit_options() const { return {max_em_iters, loglik_tol}; }
};

/// Parses and validates a JSON document. Missing keys take their defaults;
/// unknown keys and invalid values raise Error(ConfigError) naming the field
/// path, e.g. "config.cuts[1]".
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (sorted keys, two-space indent); parse_config round-trips it.
std::string to_json(const PipelineConfig& config);

}  // namespace statealign
