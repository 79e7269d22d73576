#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "statealign/ingest.hpp"
#include "statealign/pipeline.hpp"
#include "statealign/simulate.hpp"

namespace statealign {

/// FNV-1a (64-bit) over series ids, timestamps and the IEEE bit patterns of
/// the values, as "fnv1a64:<16 hex digits>".
std::string input_digest(const std::vector<TimeSeriesSegment>& segments);

/// Formats to 6 significant digits; non-finite values become "nan"/"inf".
std::string format_number(double value);

/// Structured report: config echo, input digest, per-pair records, cluster
/// table, rankings, warnings, and the evaluation block when labels exist.
std::string report_json(const PipelineResult& result, const IngestResult& ingest);

/// Human-readable summary of the same report.
std::string report_text(const PipelineResult& result, const IngestResult& ingest);

/// Writes report.json, summary.txt, dci_samples.csv, states.csv and (with
/// labels) classification_error.csv into out_dir. Errors: IoError.
std::vector<std::filesystem::path> emit_outputs(const PipelineResult& result, const IngestResult& ingest,
                                                const std::filesystem::path& out_dir);

/// Writes experiment.json, classification_error.csv, dci_samples.csv and
/// runtime.json. Everything except runtime.json is byte-stable.
std::vector<std::filesystem::path> emit_experiment(const ExperimentResult& result, const SimSpec& spec,
                                                   const PipelineConfig& config,
                                                   const std::filesystem::path& out_dir);

/// Writes one CSV per intensity plus schedule.json for a simulated spec.
std::vector<std::filesystem::path> emit_simulation(const SimSpec& spec, const std::filesystem::path& out_dir);

}  // namespace statealign
