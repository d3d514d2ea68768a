#pragma once

#include "mobo/harness/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mobo::harness {

/// Fixed column set of results.csv.
inline constexpr const char* kCsvHeader =
    "run_id,variant,benchmark,seed,evaluation,x,feasible,objectives,scalarized,gd,igd,hv,lrhd";

struct RunSummary {
  std::string run_id;
  std::string variant;
  std::string benchmark;
  std::uint64_t seed = 0;
  int evaluations = 0;
  int feasible = 0;
  std::optional<MetricsReport> final_metrics;
  std::vector<std::string> warnings;
  std::string error;  ///< non-empty when the run failed
  double elapsed_seconds = 0.0;
};

struct RunSpec {
  std::string run_id;
  AcquisitionSpec variant;
  std::uint64_t seed = 0;
};

/// Every (variant, seed) pair of the experiment, in output order.
std::vector<RunSpec> plan_runs(const ExperimentConfig& config);

/// Write one row per evaluation. Checkpoint columns are filled only on rows
/// where a checkpoint was taken.
void write_results_csv(std::ostream& out, const RunSpec& spec, const std::string& benchmark,
                       const RunResult& result);

/// Execute one run and write its directory (results.csv, summary.json and,
/// for external evaluators, evaluator.log). Never throws: failures are
/// recorded in the summary and in error.txt. `true_front` may be supplied to
/// avoid recomputing it; otherwise it is discretized from the config.
RunSummary execute_run(const ExperimentConfig& config, const RunSpec& spec, const std::filesystem::path& dir,
                       const PointSet* true_front = nullptr);

struct ExperimentOutcome {
  std::vector<RunSummary> runs;
  bool all_succeeded() const;
};

/// All runs of the experiment on a bounded worker pool, followed by the
/// top-level summary.json and manifest.json.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Worker count: config value, else MOBO_WORKERS, else the number of cores.
int worker_count(const ExperimentConfig& config);

/// Long-format (variant, benchmark, seed, metric, value) rows of log_gd,
/// log_igd and lrhd finals, sorted. A run directory or an experiment
/// directory holding run directories may be given. Returns the number of
/// data rows; skipped inputs are reported on `warnings`.
int emit_plot_data(const std::vector<std::filesystem::path>& dirs, std::ostream& out, std::ostream& warnings);

}  // namespace mobo::harness
