#pragma once

#include "mobo/constraints.hpp"
#include "mobo/gp.hpp"
#include "mobo/pareto.hpp"
#include "mobo/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mobo {

enum class AcquisitionKind { PI, EI, UCB };

std::string_view to_string(AcquisitionKind kind);
std::optional<AcquisitionKind> parse_acquisition_kind(std::string_view name);

/// One of the 18 method variants: regularization flag x objective-GP
/// acquisition x Pareto-GP acquisition, named "Reg-UCB-EI" and so on.
struct AcquisitionSpec {
  AcquisitionKind objective_acq = AcquisitionKind::UCB;
  AcquisitionKind pareto_acq = AcquisitionKind::EI;
  double ucb_kappa = 2.0;
  bool regularized = true;

  std::string name() const;
  static std::optional<AcquisitionSpec> parse(std::string_view name, double kappa = 2.0);
  static std::vector<AcquisitionSpec> all_variants(double kappa = 2.0);
};

/// Closed-form acquisition under the maximization convention.
///
///   PI  = Phi(z)                         z = (mean - incumbent) / sigma
///   EI  = (mean - incumbent) Phi(z) + sigma phi(z)
///   UCB = max(0, mean + kappa sigma - ucb_baseline)
///
/// sigma = 0 uses the limits: PI = [mean > incumbent], EI = max(0, mean - incumbent).
/// Throws std::invalid_argument on a negative variance.
double base_acquisition(AcquisitionKind kind, double mean, double variance, double incumbent,
                        double kappa, double ucb_baseline = 0.0);

/// Incumbents and UCB shifts shared by every evaluation within one iteration.
struct AcquisitionContext {
  double objective_incumbent = 0.0;
  double pareto_incumbent = 1.0;
  double objective_ucb_baseline = 0.0;
  double pareto_ucb_baseline = 0.0;
};

/// a_obj * a_Pareto * Pr(feasible) * indicator.
double composite_acquisition(const AcquisitionSpec& spec, const Posterior& objective,
                             const Posterior& pareto, double feasibility_probability,
                             int known_indicator, const AcquisitionContext& context);

/// The composite acquisition bound to one iteration's fitted surrogates.
/// The objective GP models the negated scalarized objective.
class CompositeAcquisition {
 public:
  struct Factors {
    double objective = 0.0;
    double pareto = 0.0;
    double feasibility = 0.0;
    int known = 0;
    double value = 0.0;
  };

  CompositeAcquisition(AcquisitionSpec spec, const GpModel& objective, const ParetoClassifier& pareto,
                       const FeasibilityClassifier& feasibility, const KnownConstraintSet& known,
                       double objective_incumbent);

  /// Fix the UCB shifts to the minimum raw UCB over `probes`.
  void calibrate(const PointSet& probes);

  double operator()(const Vector& x) const { return factors(x).value; }
  Factors factors(const Vector& x) const;

  /// Pr(feasible) * indicator, used when the composite is zero everywhere.
  double feasibility_score(const Vector& x) const;

  const AcquisitionContext& context() const { return context_; }

 private:
  AcquisitionSpec spec_;
  const GpModel* objective_;
  const ParetoClassifier* pareto_;
  const FeasibilityClassifier* feasibility_;
  const KnownConstraintSet* known_;
  AcquisitionContext context_;
};

struct AcquisitionOptimizerConfig {
  int probes = 1024;
  int restarts = 3;
  int evals_per_restart = 300;
  double restart_sigma = 0.15;  ///< CMA-ES initial step as a fraction of the mean box width
  std::uint64_t seed = 0;
};

struct AcquisitionMaximum {
  Vector x;
  double value = 0.0;
  bool used_fallback = false;
};

/// Uniform random points in the box.
PointSet draw_probes(const Bounds& bounds, int count, Rng& rng);

/// Best point among the probes and `restarts` CMA-ES runs started from the
/// best distinct probes. The result is never worse than any probe. Ties go to
/// the lexicographically smallest point. If every evaluation is zero and a
/// fallback score is given, the probe maximizing it is returned instead
/// (ties to the earliest probe).
AcquisitionMaximum maximize_acquisition(const std::function<double(const Vector&)>& acquisition,
                                        const Bounds& bounds, const AcquisitionOptimizerConfig& config,
                                        const PointSet& probes,
                                        const std::function<double(const Vector&)>& fallback = {});

/// As above with probes drawn from `config.seed`.
AcquisitionMaximum maximize_acquisition(const std::function<double(const Vector&)>& acquisition,
                                        const Bounds& bounds, const AcquisitionOptimizerConfig& config,
                                        const std::function<double(const Vector&)>& fallback = {});

}  // namespace mobo
