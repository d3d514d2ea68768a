#pragma once

#include "mobo/acquisition.hpp"
#include "mobo/benchmarks.hpp"
#include "mobo/driver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mobo::harness {

/// A configuration problem. `where` is "line N, column M" for syntax errors
/// and a JSON pointer such as "/budget" for field errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct LinearConstraint {
  std::vector<double> coefficients;
  double bound = 0.0;  ///< coefficients . x <= bound
};

struct ExternalProblem {
  std::string command;
  double timeout_seconds = 3600.0;
  std::vector<double> lower;
  std::vector<double> upper;
  Eigen::Index objectives = 2;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::optional<BenchmarkName> benchmark;
  std::optional<ExternalProblem> external;
  Eigen::Index dimension = 0;   ///< 0: benchmark default
  Eigen::Index objectives = 0;  ///< 0: benchmark default
  BenchmarkForm form = BenchmarkForm::Scaled;
  int n_init = 5;
  int budget = 1500;
  std::uint64_t seed = 0;
  int repeats = 5;
  std::vector<std::uint64_t> seeds;  ///< explicit list; otherwise seed, seed+1, ...
  std::vector<AcquisitionSpec> variants;
  double rho = 0.65;
  double lambda = 0.01;
  double kappa = 2.0;
  KernelKind kernel = KernelKind::Matern52;
  int checkpoint_every = 10;
  std::optional<std::vector<double>> reference;
  int front_resolution = 500;
  std::vector<LinearConstraint> known_constraints;
  std::filesystem::path output = "runs";
  int workers = 0;  ///< 0: MOBO_WORKERS or the number of cores

  /// Fields that were filled from defaults rather than the file.
  std::vector<std::string> defaults_applied;

  std::vector<std::uint64_t> run_seeds() const;
  std::string problem_name() const;
};

/// Parse and validate a configuration document. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration (every knob spelled out). Feeding it back to
/// parse_config reproduces the same experiment.
nlohmann::json to_json(const ExperimentConfig& config);

/// Benchmark spec for a benchmark-backed config.
BenchmarkSpec benchmark_spec(const ExperimentConfig& config);

/// Per-axis grid size giving roughly `points` front points for M objectives.
int per_axis_resolution(Eigen::Index objectives, int points);

/// Discretized true front of a benchmark-backed config. `front_resolution` is
/// the approximate point count, so the per-axis grid is its (M-1)-th root.
PointSet benchmark_front(const ExperimentConfig& config);

/// Optimizer settings for one (variant, seed) run.
OptimizerConfig optimizer_config(const ExperimentConfig& config, const AcquisitionSpec& variant,
                                 std::uint64_t seed);

}  // namespace mobo::harness
