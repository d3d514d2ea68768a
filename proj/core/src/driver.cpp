#include "mobo/driver.hpp"

#include "mobo/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mobo {

namespace {

constexpr int kRejectionTries = 100000;

// Stream identifiers for derive_rng; each ask uses kAskStream + dataset size.
constexpr std::uint64_t kDesignStream = 1;
constexpr std::uint64_t kRandomSearchStream = 2;
constexpr std::uint64_t kAskStream = 1u << 20;

std::optional<Vector> sample_admissible(const Bounds& bounds, const KnownConstraintSet& known, Rng& rng) {
  for (int t = 0; t < kRejectionTries; ++t) {
    Vector x = bounds.sample(rng);
    if (known_indicator(known, x) == 1) return x;
  }
  return std::nullopt;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = a * 0x9E3779B97F4A7C15ULL ^ (b + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2));
  h ^= h >> 31;
  return h;
}

class CheckpointRecorder {
 public:
  explicit CheckpointRecorder(const RunOptions& options) : options_(options) {
    if (options.true_front && !options.true_front->empty()) {
      reference_ = options.reference ? *options.reference : nadir_reference(*options.true_front, 0.1);
      hv_ideal_ = hypervolume(within_reference(*options.true_front, reference_), reference_);
      enabled_ = true;
    }
  }

  void maybe_record(int evaluations, const PointSet& front, bool force, std::vector<Checkpoint>& out) {
    if (!enabled_ || front.empty()) return;
    const bool due = options_.checkpoint_every > 0 && evaluations % options_.checkpoint_every == 0;
    if (!due && !force) return;
    if (!out.empty() && out.back().evaluations == evaluations) return;
    Checkpoint cp;
    cp.evaluations = evaluations;
    cp.metrics.front_size = static_cast<int>(front.size());
    cp.metrics.reference_point = reference_;
    cp.metrics.gd = gd(front, *options_.true_front);
    cp.metrics.igd = igd(front, *options_.true_front);
    cp.metrics.hv = hypervolume(within_reference(front, reference_), reference_);
    cp.metrics.hv_ideal = hv_ideal_;
    cp.metrics.lrhd = lrhd(cp.metrics.hv, hv_ideal_);
    out.push_back(std::move(cp));
  }

 private:
  const RunOptions& options_;
  bool enabled_ = false;
  Vector reference_;
  double hv_ideal_ = 0.0;
};

PointSet feasible_front(const std::vector<ObservationRecord>& data) {
  PointSet feasible;
  for (const auto& r : data) {
    if (r.feasible) feasible.push_back(*r.objectives);
  }
  return nondominated(feasible);
}

}  // namespace

std::string_view to_string(Proposal::Mode mode) {
  switch (mode) {
    case Proposal::Mode::Initial: return "initial";
    case Proposal::Mode::Composite: return "composite";
    case Proposal::Mode::FeasibilitySearch: return "feasibility";
    case Proposal::Mode::RandomFallback: return "random";
  }
  return "?";
}

Optimizer::Optimizer(OptimizerConfig config) : config_(std::move(config)) {
  if (config_.bounds.dimension() == 0) throw std::invalid_argument("Optimizer: empty bounds");
  if (config_.objectives < 1) throw std::invalid_argument("Optimizer: need at least one objective");
  if (config_.n_init < 1) throw std::invalid_argument("Optimizer: n_init must be at least 1");
  ScalarizationSpec{ScalarizationMethod::AugmentedTchebycheff, config_.rho, config_.lambda, {}}.validate(
      config_.objectives);
  if (!(config_.acquisition.ucb_kappa > 0.0)) throw std::invalid_argument("Optimizer: kappa must be positive");

  Rng rng = derive_rng(config_.seed, kDesignStream);
  for (int i = 0; i < config_.n_init; ++i) {
    auto x = sample_admissible(config_.bounds, config_.known_constraints, rng);
    if (!x) throw std::invalid_argument("Optimizer: known constraints exclude (almost) the whole box");
    initial_design_.push_back(*x);
  }
}

ScalarizationSpec Optimizer::scalarization_spec(const Vector& ideal) const {
  ScalarizationSpec spec;
  spec.rho = config_.rho;
  spec.lambda = config_.lambda;
  if (config_.acquisition.regularized) {
    spec.method = ScalarizationMethod::RegularizedAugmentedTchebycheff;
  } else {
    spec.method = ScalarizationMethod::AugmentedTchebycheff;
    spec.ideal_point = ideal;
  }
  return spec;
}

Vector Optimizer::random_admissible(Rng& rng) const {
  auto x = sample_admissible(config_.bounds, config_.known_constraints, rng);
  if (!x) throw std::runtime_error("Optimizer: could not sample a point satisfying the known constraints");
  return *x;
}

Proposal Optimizer::feasibility_search(Rng& rng) const {
  Proposal p;
  p.mode = Proposal::Mode::FeasibilitySearch;
  PointSet inputs;
  std::vector<int> labels;
  for (const auto& r : dataset_) {
    inputs.push_back(r.x);
    labels.push_back(r.feasible ? 1 : 0);
  }
  std::optional<FeasibilityClassifier> clf;
  if (!inputs.empty()) {
    FitConfig fc = config_.fit;
    fc.seed = rng();
    clf = fit_feasibility(inputs, labels, config_.kernel, fc);
  }
  if (!clf || clf->degenerate()) {
    // Nothing separates feasible from infeasible yet: explore uniformly.
    p.x = random_admissible(rng);
    return p;
  }
  AcquisitionOptimizerConfig ac = config_.acq_optimizer;
  ac.seed = rng();
  const PointSet probes = draw_probes(config_.bounds, ac.probes, rng);
  const auto score = [&](const Vector& x) {
    return known_indicator(config_.known_constraints, x) == 1 ? clf->probability(x) : 0.0;
  };
  const auto best = maximize_acquisition(score, config_.bounds, ac, probes);
  p.x = best.x;
  p.acquisition_value = best.value;
  if (known_indicator(config_.known_constraints, p.x) == 0) p.x = random_admissible(rng);
  return p;
}

Proposal Optimizer::propose() const {
  const std::size_t n = dataset_.size();
  if (n < initial_design_.size()) {
    Proposal p;
    p.x = initial_design_[n];
    return p;
  }
  Rng rng = derive_rng(config_.seed, kAskStream + n);

  PointSet inputs;
  PointSet objectives;
  std::vector<bool> feasible_mask;
  std::vector<int> labels;
  PointSet feasible_inputs;
  PointSet feasible_objectives;
  for (const auto& r : dataset_) {
    inputs.push_back(r.x);
    feasible_mask.push_back(r.feasible);
    labels.push_back(r.feasible ? 1 : 0);
    objectives.push_back(r.feasible ? *r.objectives : Vector::Zero(config_.objectives));
    if (r.feasible) {
      feasible_inputs.push_back(r.x);
      feasible_objectives.push_back(*r.objectives);
    }
  }
  if (feasible_inputs.size() < 2) return feasibility_search(rng);

  Proposal p;
  p.mode = Proposal::Mode::Composite;
  p.weights = sample_weights(config_.objectives, rng);
  p.normalizer = ObjectiveNormalizer::fit(feasible_objectives);

  PointSet normalized;
  Vector ideal;
  for (const auto& y : feasible_objectives) {
    normalized.push_back(p.normalizer->apply(y));
    ideal = ideal.size() == 0 ? normalized.back() : Vector(ideal.cwiseMin(normalized.back()));
  }
  const ScalarizationSpec sspec = scalarization_spec(ideal);
  Vector targets(static_cast<Eigen::Index>(normalized.size()));
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    // Negated: the acquisition layer maximizes.
    targets[static_cast<Eigen::Index>(i)] = -scalarize(sspec, *p.weights, normalized[i], feasible_inputs[i]);
  }

  try {
    FitConfig fc = config_.fit;
    fc.seed = mix(rng(), 1);
    const GpModel objective_gp = fit(stack_rows(feasible_inputs), targets, config_.kernel, fc);
    fc.seed = mix(rng(), 2);
    const ParetoClassifier pareto =
        fit_pareto_classifier(inputs, feasible_mask, objectives, config_.kernel, fc);
    fc.seed = mix(rng(), 3);
    const FeasibilityClassifier feasibility = fit_feasibility(inputs, labels, config_.kernel, fc);

    CompositeAcquisition acq(config_.acquisition, objective_gp, pareto, feasibility,
                             config_.known_constraints, targets.maxCoeff());
    AcquisitionOptimizerConfig ac = config_.acq_optimizer;
    ac.seed = rng();
    const PointSet probes = draw_probes(config_.bounds, ac.probes, rng);
    acq.calibrate(probes);
    const auto best = maximize_acquisition([&](const Vector& x) { return acq(x); }, config_.bounds, ac,
                                           probes, [&](const Vector& x) { return acq.feasibility_score(x); });
    p.x = best.x;
    p.acquisition_value = best.value;
    if (best.used_fallback) p.warning = "composite acquisition vanished on every probe; ranked by feasibility";
  } catch (const FactorizationError& e) {
    p.mode = Proposal::Mode::RandomFallback;
    p.warning = std::string("surrogate fit failed (") + e.what() + "); sampling at random";
    p.x = random_admissible(rng);
  }
  if (known_indicator(config_.known_constraints, p.x) == 0) {
    p.mode = Proposal::Mode::RandomFallback;
    p.warning = "acquisition maximizer violated a known constraint; sampling at random";
    p.x = random_admissible(rng);
  }
  return p;
}

void Optimizer::tell(const Vector& x, const EvaluationResult& result) {
  if (x.size() != config_.bounds.dimension()) throw std::invalid_argument("tell: input dimension mismatch");
  if (!x.allFinite() || !config_.bounds.contains(x)) throw std::invalid_argument("tell: input outside the box");
  if (result.objectives) {
    if (result.objectives->size() != config_.objectives) {
      throw std::invalid_argument("tell: objective dimension mismatch");
    }
    if (!result.objectives->allFinite()) throw std::invalid_argument("tell: non-finite objectives");
  }
  ObservationRecord rec;
  rec.x = x;
  rec.objectives = result.objectives;
  rec.feasible = result.objectives.has_value();
  rec.iteration = static_cast<int>(dataset_.size());
  dataset_.push_back(std::move(rec));
}

void Optimizer::tell(const Proposal& proposal, const EvaluationResult& result) {
  tell(proposal.x, result);
  auto& rec = dataset_.back();
  if (rec.feasible && proposal.weights && proposal.normalizer) {
    const Vector y = proposal.normalizer->apply(*rec.objectives);
    rec.scalarized = scalarize(scalarization_spec(Vector::Zero(config_.objectives)), *proposal.weights, y,
                               rec.x);
  }
}

std::vector<std::size_t> Optimizer::current_front() const {
  PointSet feasible;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < dataset_.size(); ++i) {
    if (dataset_[i].feasible) {
      feasible.push_back(*dataset_[i].objectives);
      index.push_back(i);
    }
  }
  if (feasible.empty()) return {};
  const auto labels = extract_front(feasible);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == 1) out.push_back(index[k]);
  }
  return out;
}

PointSet Optimizer::front_objectives() const { return feasible_front(dataset_); }

EvaluationResult guarded_evaluate(const Evaluator& evaluator, const Vector& x, Eigen::Index objectives) {
  try {
    EvaluationResult r = evaluator(x);
    if (r.objectives && (r.objectives->size() != objectives || !r.objectives->allFinite())) {
      return EvaluationResult::failure();
    }
    return r;
  } catch (const std::exception&) {
    return EvaluationResult::failure();
  }
}

Optimizer initialize(OptimizerConfig config, const Evaluator& evaluator) {
  Optimizer opt(std::move(config));
  const Eigen::Index s = opt.config().objectives;
  bool any_feasible = false;
  for (std::size_t i = 0; i < opt.initial_design().size(); ++i) {
    const Proposal p = opt.propose();
    const EvaluationResult r = guarded_evaluate(evaluator, p.x, s);
    any_feasible = any_feasible || r.feasible();
    opt.tell(p, r);
  }
  if (!any_feasible) {
    throw std::runtime_error("initialize: every initial evaluation failed; check the evaluator");
  }
  return opt;
}

RunResult run(OptimizerConfig config, const Evaluator& evaluator, const RunOptions& options) {
  if (options.budget < 0) throw std::invalid_argument("run: negative budget");
  RunResult result;
  CheckpointRecorder recorder(options);
  Optimizer opt = initialize(std::move(config), evaluator);
  const Eigen::Index s = opt.config().objectives;
  for (std::size_t i = 0; i < opt.dataset().size(); ++i) {
    result.modes.push_back(Proposal::Mode::Initial);
    recorder.maybe_record(static_cast<int>(i + 1),
                          feasible_front({opt.dataset().begin(), opt.dataset().begin() + static_cast<std::ptrdiff_t>(i) + 1}),
                          false, result.checkpoints);
  }
  for (int it = 0; it < options.budget; ++it) {
    const Proposal p = opt.propose();
    if (!p.warning.empty()) {
      result.warnings.push_back("evaluation " + std::to_string(opt.dataset().size() + 1) + ": " + p.warning);
    }
    opt.tell(p, guarded_evaluate(evaluator, p.x, s));
    result.modes.push_back(p.mode);
    recorder.maybe_record(static_cast<int>(opt.dataset().size()), opt.front_objectives(),
                          it + 1 == options.budget, result.checkpoints);
  }
  if (options.budget == 0) {
    recorder.maybe_record(static_cast<int>(opt.dataset().size()), opt.front_objectives(), true,
                          result.checkpoints);
  }
  result.dataset = opt.dataset();
  result.front = opt.current_front();
  return result;
}

RunResult random_search(const OptimizerConfig& config, const Evaluator& evaluator, const RunOptions& options) {
  RunResult result;
  CheckpointRecorder recorder(options);
  Optimizer opt(config);
  Rng rng = derive_rng(config.seed, kRandomSearchStream);
  const int total = config.n_init + options.budget;
  for (int i = 0; i < total; ++i) {
    Vector x;
    if (i < config.n_init) {
      x = opt.initial_design()[static_cast<std::size_t>(i)];
    } else {
      auto sample = sample_admissible(config.bounds, config.known_constraints, rng);
      if (!sample) throw std::runtime_error("random_search: no admissible point found");
      x = *sample;
    }
    opt.tell(x, guarded_evaluate(evaluator, x, config.objectives));
    result.modes.push_back(i < config.n_init ? Proposal::Mode::Initial : Proposal::Mode::RandomFallback);
    recorder.maybe_record(i + 1, opt.front_objectives(), i + 1 == total, result.checkpoints);
  }
  result.dataset = opt.dataset();
  result.front = opt.current_front();
  return result;
}

}  // namespace mobo
