#pragma once

#include "mobo/acquisition.hpp"
#include "mobo/constraints.hpp"
#include "mobo/gp.hpp"
#include "mobo/metrics.hpp"
#include "mobo/scalarize.hpp"
#include "mobo/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mobo {

/// One evaluated design. Objectives are present exactly when the evaluation
/// succeeded (c = 1).
struct ObservationRecord {
  Vector x;
  std::optional<Vector> objectives;
  bool feasible = false;
  int iteration = 0;
  std::optional<double> scalarized;  ///< under the weights of the ask that produced x
};

/// What an evaluator reports back: objectives, or nothing for a failed run.
struct EvaluationResult {
  std::optional<Vector> objectives;

  static EvaluationResult success(Vector y) { return {std::move(y)}; }
  static EvaluationResult failure() { return {}; }
  bool feasible() const { return objectives.has_value(); }
};

using Evaluator = std::function<EvaluationResult(const Vector&)>;

struct OptimizerConfig {
  Bounds bounds;
  Eigen::Index objectives = 2;
  int n_init = 5;
  std::uint64_t seed = 0;
  AcquisitionSpec acquisition;
  double rho = 0.65;
  double lambda = 0.01;
  KernelKind kernel = KernelKind::Matern52;
  FitConfig fit;                            ///< seed is re-derived per iteration
  AcquisitionOptimizerConfig acq_optimizer; ///< seed is re-derived per iteration
  KnownConstraintSet known_constraints;
};

/// The outcome of one ask, with the state needed to scalarize the answer.
struct Proposal {
  enum class Mode { Initial, Composite, FeasibilitySearch, RandomFallback };

  Vector x;
  Mode mode = Mode::Initial;
  std::optional<WeightVector> weights;
  std::optional<ObjectiveNormalizer> normalizer;
  double acquisition_value = 0.0;
  std::string warning;
};

std::string_view to_string(Proposal::Mode mode);

/// Sequential three-surrogate optimizer with an ask/tell interface.
///
/// Each ask draws fresh simplex weights, scalarizes the min-max normalized
/// feasible objectives, fits the objective GP on the negated values, fits
/// the frontier classifier and the feasibility classifier on all records,
/// and maximizes the product acquisition. The first `n_init` asks return a
/// seeded uniform design that satisfies the known constraints. `ask` does
/// not modify the optimizer; its randomness is keyed by (seed, dataset size).
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config);

  Proposal propose() const;
  Vector ask() const { return propose().x; }

  /// Append an observation. Throws std::invalid_argument (leaving the state
  /// unchanged) on a dimension mismatch, an out-of-box x or non-finite objectives.
  void tell(const Vector& x, const EvaluationResult& result);
  void tell(const Proposal& proposal, const EvaluationResult& result);

  const std::vector<ObservationRecord>& dataset() const { return dataset_; }
  const OptimizerConfig& config() const { return config_; }

  /// Indices of feasible records whose objectives are nondominated.
  std::vector<std::size_t> current_front() const;
  PointSet front_objectives() const;

  const PointSet& initial_design() const { return initial_design_; }

 private:
  ScalarizationSpec scalarization_spec(const Vector& ideal) const;
  Vector random_admissible(Rng& rng) const;
  Proposal feasibility_search(Rng& rng) const;

  OptimizerConfig config_;
  PointSet initial_design_;
  std::vector<ObservationRecord> dataset_;
};

/// Build an optimizer and evaluate its initial design. Throws
/// std::runtime_error if every initial evaluation fails.
Optimizer initialize(OptimizerConfig config, const Evaluator& evaluator);

struct RunOptions {
  int budget = 1500;          ///< evaluations after the initial design
  int checkpoint_every = 10;  ///< in total evaluations
  std::optional<PointSet> true_front;
  std::optional<Vector> reference;  ///< defaults to the true-front nadir plus 10%
};

struct Checkpoint {
  int evaluations = 0;
  MetricsReport metrics;
};

struct RunResult {
  std::vector<ObservationRecord> dataset;
  std::vector<std::size_t> front;
  std::vector<Checkpoint> checkpoints;
  std::vector<std::string> warnings;
  std::vector<Proposal::Mode> modes;  ///< one per evaluation
};

/// Evaluator exceptions and non-finite or misshapen outputs become failed records.
EvaluationResult guarded_evaluate(const Evaluator& evaluator, const Vector& x, Eigen::Index objectives);

/// Full loop: initial design, then `budget` ask/evaluate/tell rounds.
RunResult run(OptimizerConfig config, const Evaluator& evaluator, const RunOptions& options);

/// Uniform random search over the same box and known constraints, for baselines.
RunResult random_search(const OptimizerConfig& config, const Evaluator& evaluator,
                        const RunOptions& options);

}  // namespace mobo
