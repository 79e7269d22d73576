// statealign command-line front end.
//
//   statealign analyze    --config cfg.json --input data.csv --out dir
//   statealign simulate   --spec spec.json --out dir
//   statealign experiment --spec spec.json --config cfg.json --out dir
//
// Exit codes: 0 success, 1 input or configuration error, 2 internal numerical error.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "statealign/config.hpp"
#include "statealign/error.hpp"
#include "statealign/ingest.hpp"
#include "statealign/pipeline.hpp"
#include "statealign/report.hpp"
#include "statealign/simulate.hpp"

namespace sa = statealign;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

void print_written(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << f.string() << '\n';
}

int run_analyze(const std::string& config_path, const std::string& input_path, const std::string& out_dir) {
  const sa::PipelineConfig config = sa::load_config(config_path);
  const sa::IngestResult ingest = sa::ingest_csv(input_path, config.window);
  for (const auto& w : ingest.warnings) std::cerr << "warning: " << w << '\n';
  const sa::PipelineResult result = sa::run_pipeline(config, ingest.segments);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  print_written(sa::emit_outputs(result, ingest, out_dir));
  return 0;
}

int run_simulate(const std::string& spec_path, const std::string& out_dir) {
  print_written(sa::emit_simulation(sa::load_sim_spec(spec_path), out_dir));
  return 0;
}

int run_experiment(const std::string& spec_path, const std::string& config_path, const std::string& out_dir) {
  const sa::SimSpec spec = sa::load_sim_spec(spec_path);
  const sa::PipelineConfig config = config_path.empty() ? sa::PipelineConfig{} : sa::load_config(config_path);
  const sa::ExperimentResult result = sa::run_experiment(spec, config);
  print_written(sa::emit_experiment(result, spec, config, out_dir));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Root-cause localisation for anomalies across many time series"};
  app.require_subcommand(1);

  std::string config_path, input_path, spec_path, out_dir;

  auto* analyze = app.add_subcommand("analyze", "Run the full pipeline on a long-format CSV");
  analyze->add_option("--config", config_path, "Pipeline configuration (JSON)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--input", input_path, "Input CSV: timestamp,series_id,value[,labels...]")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--out", out_dir, "Output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "Write synthetic datasets and their injection schedule");
  simulate->add_option("--spec", spec_path, "Simulation spec (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory")->required();

  auto* experiment = app.add_subcommand("experiment", "Compare methods on simulated data");
  experiment->add_option("--spec", spec_path, "Simulation spec (JSON)")->required()->check(CLI::ExistingFile);
  experiment->add_option("--config", config_path, "Pipeline configuration (JSON)")->check(CLI::ExistingFile);
  experiment->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*analyze) return run_analyze(config_path, input_path, out_dir);
    if (*simulate) return run_simulate(spec_path, out_dir);
    if (*experiment) return run_experiment(spec_path, config_path, out_dir);
  } catch (const sa::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sa::is_input_error(e.code()) ? kExitInput : kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInput;
}
