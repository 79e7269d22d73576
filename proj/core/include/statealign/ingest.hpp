#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "statealign/config.hpp"
#include "statealign/series.hpp"

namespace statealign {

struct FilledGap {
  std::string series_id;
  EpochSeconds first_missing = 0;
  int points = 0;
};

struct IngestResult {
  std::vector<TimeSeriesSegment> segments;  // sorted by series_id
  std::vector<FilledGap> filled;
  std::vector<std::string> rejected;  // series ids dropped with a warning
  std::vector<std::string> warnings;
  EpochSeconds stride = 0;
};

/// Long-format CSV: timestamp, series_id, value, plus optional label columns.
/// A column named group_label sets the ground-truth group; any other extra
/// column becomes a dimension label. An empty or non-finite value counts as
/// missing. Interior gaps of up to 2 points are linearly interpolated; longer
/// gaps, a stride other than the most common one, or a grid offset drop the
/// series with a warning. Retained series are cut to the window (or, without
/// a window, to the span every retained series covers).
/// Errors: ParseError (row and column reported), IoError, InsufficientOverlap
/// when the common span is shorter than 2 points.
IngestResult ingest_csv(const std::filesystem::path& path, const std::optional<TimeWindow>& window);
IngestResult ingest_csv_text(std::string_view text, const std::optional<TimeWindow>& window);

/// Writes segments in the same long format (values with 17 significant digits).
std::string to_csv(const std::vector<TimeSeriesSegment>& segments);

}  // namespace statealign
