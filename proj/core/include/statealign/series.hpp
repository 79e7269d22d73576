#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace statealign {

using EpochSeconds = std::int64_t;

struct SeriesMeta {
  // Opaque dimension labels (device=iPhone, experience=Rentals, ...). Keys are unique.
  std::vector<std::pair<std::string, std::string>> dimension_labels;
  // Ground truth for evaluation only; never consulted by the analysis itself.
  std::optional<std::string> group_label;

  bool operator==(const SeriesMeta&) const = default;
};

/// One series' observations over the analysis window.
///
/// Timestamps are strictly increasing with a constant stride and values are
/// finite; `validate()` checks both. Ingestion is responsible for filling gaps
/// before a segment is built.
struct TimeSeriesSegment {
  std::string series_id;
  std::vector<EpochSeconds> timestamps;
  std::vector<double> values;
  SeriesMeta meta;

  std::size_t size() const noexcept { return values.size(); }

  /// Throws Error(ContractViolation) when an invariant does not hold.
  void validate() const;

  /// Convenience for tests and simulation: timestamps start at `start`, step `stride`.
  static TimeSeriesSegment from_values(std::string id, std::vector<double> values,
                                       EpochSeconds start = 0, EpochSeconds stride = 60);
};

}  // namespace statealign
