#include "mobo/acquisition.hpp"

#include "mobo/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mobo {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

bool lexicographically_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

// Strictly better value, or equal value at a lexicographically smaller point.
bool better(double value, const Vector& x, double best_value, const Vector& best_x) {
  if (value != best_value) return value > best_value;
  return lexicographically_less(x, best_x);
}

double sanitize(double v) { return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity(); }

}  // namespace

std::string_view to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::PI: return "PI";
    case AcquisitionKind::EI: return "EI";
    case AcquisitionKind::UCB: return "UCB";
  }
  return "?";
}

std::optional<AcquisitionKind> parse_acquisition_kind(std::string_view name) {
  for (auto kind : {AcquisitionKind::PI, AcquisitionKind::EI, AcquisitionKind::UCB}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

std::string AcquisitionSpec::name() const {
  return std::string(regularized ? "Reg" : "NoReg") + "-" + std::string(to_string(objective_acq)) +
         "-" + std::string(to_string(pareto_acq));
}

std::optional<AcquisitionSpec> AcquisitionSpec::parse(std::string_view name, double kappa) {
  const auto first = name.find('-');
  if (first == std::string_view::npos) return std::nullopt;
  const auto second = name.find('-', first + 1);
  if (second == std::string_view::npos) return std::nullopt;
  const auto reg = name.substr(0, first);
  const auto obj = parse_acquisition_kind(name.substr(first + 1, second - first - 1));
  const auto par = parse_acquisition_kind(name.substr(second + 1));
  if (!obj || !par || (reg != "Reg" && reg != "NoReg")) return std::nullopt;
  return AcquisitionSpec{*obj, *par, kappa, reg == "Reg"};
}

std::vector<AcquisitionSpec> AcquisitionSpec::all_variants(double kappa) {
  std::vector<AcquisitionSpec> out;
  for (bool reg : {true, false}) {
    for (auto obj : {AcquisitionKind::PI, AcquisitionKind::EI, AcquisitionKind::UCB}) {
      for (auto par : {AcquisitionKind::PI, AcquisitionKind::EI, AcquisitionKind::UCB}) {
        out.push_back({obj, par, kappa, reg});
      }
    }
  }
  return out;
}

double base_acquisition(AcquisitionKind kind, double mean, double variance, double incumbent,
                        double kappa, double ucb_baseline) {
  if (!(variance >= 0.0)) throw std::invalid_argument("base_acquisition: negative variance");
  const double sigma = std::sqrt(variance);
  const double improvement = mean - incumbent;
  switch (kind) {
    case AcquisitionKind::PI:
      if (sigma == 0.0) return improvement > 0.0 ? 1.0 : 0.0;
      return normal_cdf(improvement / sigma);
    case AcquisitionKind::EI: {
      if (sigma == 0.0) return std::max(0.0, improvement);
      const double z = improvement / sigma;
      return std::max(0.0, improvement * normal_cdf(z) + sigma * normal_pdf(z));
    }
    case AcquisitionKind::UCB:
      return std::max(0.0, mean + kappa * sigma - ucb_baseline);
  }
  return 0.0;
}

double composite_acquisition(const AcquisitionSpec& spec, const Posterior& objective,
                             const Posterior& pareto, double feasibility_probability,
                             int known_indicator, const AcquisitionContext& context) {
  if (known_indicator == 0) return 0.0;
  const double a_obj = base_acquisition(spec.objective_acq, objective.mean, objective.variance,
                                        context.objective_incumbent, spec.ucb_kappa,
                                        context.objective_ucb_baseline);
  const double a_par = base_acquisition(spec.pareto_acq, pareto.mean, pareto.variance,
                                        context.pareto_incumbent, spec.ucb_kappa,
                                        context.pareto_ucb_baseline);
  return a_obj * a_par * feasibility_probability * static_cast<double>(known_indicator);
}

CompositeAcquisition::CompositeAcquisition(AcquisitionSpec spec, const GpModel& objective,
                                           const ParetoClassifier& pareto,
                                           const FeasibilityClassifier& feasibility,
                                           const KnownConstraintSet& known, double objective_incumbent)
    : spec_(spec), objective_(&objective), pareto_(&pareto), feasibility_(&feasibility), known_(&known) {
  context_.objective_incumbent = objective_incumbent;
  context_.pareto_incumbent = pareto.best_training_probability();
}

void CompositeAcquisition::calibrate(const PointSet& probes) {
  if (probes.empty()) return;
  double obj_min = std::numeric_limits<double>::infinity();
  double par_min = std::numeric_limits<double>::infinity();
  for (const auto& x : probes) {
    const Posterior o = objective_->predict(x);
    const Posterior p = pareto_probability(*pareto_, x);
    obj_min = std::min(obj_min, o.mean + spec_.ucb_kappa * std::sqrt(o.variance));
    par_min = std::min(par_min, p.mean + spec_.ucb_kappa * std::sqrt(p.variance));
  }
  context_.objective_ucb_baseline = obj_min;
  context_.pareto_ucb_baseline = par_min;
}

CompositeAcquisition::Factors CompositeAcquisition::factors(const Vector& x) const {
  Factors f;
  f.known = known_indicator(*known_, x);
  if (f.known == 0) return f;
  const Posterior o = objective_->predict(x);
  const Posterior p = pareto_probability(*pareto_, x);
  f.objective = base_acquisition(spec_.objective_acq, o.mean, o.variance, context_.objective_incumbent,
                                 spec_.ucb_kappa, context_.objective_ucb_baseline);
  f.pareto = base_acquisition(spec_.pareto_acq, p.mean, p.variance, context_.pareto_incumbent,
                              spec_.ucb_kappa, context_.pareto_ucb_baseline);
  f.feasibility = feasibility_->probability(x);
  f.value = composite_acquisition(spec_, o, p, f.feasibility, f.known, context_);
  return f;
}

double CompositeAcquisition::feasibility_score(const Vector& x) const {
  if (known_indicator(*known_, x) == 0) return 0.0;
  return feasibility_->probability(x);
}

PointSet draw_probes(const Bounds& bounds, int count, Rng& rng) {
  PointSet probes;
  probes.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) probes.push_back(bounds.sample(rng));
  return probes;
}

AcquisitionMaximum maximize_acquisition(const std::function<double(const Vector&)>& acquisition,
                                        const Bounds& bounds, const AcquisitionOptimizerConfig& config,
                                        const PointSet& probes,
                                        const std::function<double(const Vector&)>& fallback) {
  if (probes.empty()) throw std::invalid_argument("maximize_acquisition: no probes");
  std::vector<double> values(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) values[i] = sanitize(acquisition(probes[i]));

  std::vector<std::size_t> order(probes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return better(values[a], probes[a], values[b], probes[b]);
  });

  AcquisitionMaximum best{probes[order[0]], values[order[0]], false};

  // CMA-ES restarts from the best distinct probes.
  std::vector<Vector> seeds;
  for (std::size_t idx : order) {
    if (static_cast<int>(seeds.size()) >= config.restarts) break;
    const bool duplicate = std::any_of(seeds.begin(), seeds.end(),
                                       [&](const Vector& s) { return s == probes[idx]; });
    if (!duplicate) seeds.push_back(probes[idx]);
  }
  const auto negated = [&](const Vector& x) { return -sanitize(acquisition(x)); };
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    CmaesConfig cfg;
    cfg.seed = config.seed * 1000003ULL + r + 1;
    cfg.x0 = seeds[r];
    cfg.sigma0 = config.restart_sigma * bounds.width().mean();
    if (!(cfg.sigma0 > 0.0)) break;
    const int pop = 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(bounds.dimension()))));
    cfg.max_evals = std::max(config.evals_per_restart, pop);
    const CmaesResult res = cmaes_minimize(negated, bounds, cfg);
    const double value = -res.f_best;
    if (better(value, res.x_best, best.value, best.x)) {
      best.x = res.x_best;
      best.value = value;
    }
  }

  if (best.value <= 0.0 && fallback) {
    std::size_t chosen = 0;
    double chosen_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double s = sanitize(fallback(probes[i]));
      if (s > chosen_score) {
        chosen_score = s;
        chosen = i;
      }
    }
    return {probes[chosen], best.value, true};
  }
  return best;
}

AcquisitionMaximum maximize_acquisition(const std::function<double(const Vector&)>& acquisition,
                                        const Bounds& bounds, const AcquisitionOptimizerConfig& config,
                                        const std::function<double(const Vector&)>& fallback) {
  Rng rng = derive_rng(config.seed, 0x70726f62);
  const PointSet probes = draw_probes(bounds, config.probes, rng);
  return maximize_acquisition(acquisition, bounds, config, probes, fallback);
}

}  // namespace mobo
