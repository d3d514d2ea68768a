// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "mobo/mobo.hpp"
#include "mobo/harness/config.hpp"
#include "mobo/harness/experiment.hpp"
#include "mobo/harness/external.hpp"

#include "oracles.hpp"

#include <glog/logging.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace mobo;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * uniform01(rng));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict gp_correctness() {
  const auto start = Clock::now();
  Rng rng(2024);
  const KernelKind kinds[] = {KernelKind::Matern12, KernelKind::Matern32, KernelKind::Matern52, KernelKind::SqExp};
  double worst = 0.0;
  for (int t = 0; t < 25; ++t) {
    const KernelKind kind = kinds[t % 4];
    const int n = 2 + static_cast<int>(uniform01(rng) * 19);
    const int d = 1 + static_cast<int>(uniform01(rng) * 4);
    KernelSpec k{kind, log_uniform(rng, 0.3, 3.0), Vector(d)};
    for (int j = 0; j < d; ++j) k.lengthscales[j] = log_uniform(rng, 0.1, 2.0);
    const double noise = log_uniform(rng, 1e-4, 1e-1);
    const double mean = standard_normal(rng);
    Matrix X(n, d);
    for (int i = 0; i < n; ++i) X.row(i) = Bounds::unit(d).sample(rng).transpose();
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = std::cos(4.0 * X(i, 0)) + 0.2 * standard_normal(rng);
    const GpModel m = GpModel::condition(k, noise, mean, X, y);
    worst = std::max(worst, rel_err(m.log_marginal_likelihood(), oracle::dense_log_likelihood(k, noise, mean, X, y)));
    for (int q = 0; q < 10; ++q) {
      const Vector x = q < 3 ? Vector(X.row(q % n).transpose()) : Bounds::unit(d).sample(rng);
      const Posterior p = m.predict(x);
      const auto o = oracle::dense_posterior(k, noise, mean, X, y, x);
      worst = std::max({worst, rel_err(p.mean, o.mean), rel_err(p.variance, o.variance)});
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-8 && elapsed < 5.0,
          "25 instances, max rel err " + fmt("%.3g", worst) + ", " + fmt("%.2f", elapsed) + " s"};
}

Verdict gp_interpolation() {
  Matrix X(8, 1);
  Vector y(8);
  for (int i = 0; i < 8; ++i) {
    X(i, 0) = 2.0 * std::numbers::pi * i / 7.0;
    y[i] = std::sin(X(i, 0));
  }
  FitConfig cfg;
  cfg.fixed_noise = cfg.noise_floor;
  double worst = 0.0;
  for (KernelKind kind : {KernelKind::Matern52, KernelKind::SqExp}) {
    const GpModel m = fit(X, y, kind, cfg);
    for (int i = 0; i < 8; ++i) worst = std::max(worst, std::abs(m.predict(X.row(i).transpose()).mean - y[i]));
  }
  return {worst <= 1e-6, "max |mu(x_i) - y_i| = " + fmt("%.3g", worst)};
}

Verdict scalarization() {
  Rng rng(7);
  long mismatches = 0;
  for (int t = 0; t < 100000; ++t) {
    const int s = 1 + static_cast<int>(uniform01(rng) * 5);
    const WeightVector w = sample_weights(s, rng);
    Vector y(s);
    for (int i = 0; i < s; ++i) y[i] = 3.0 * standard_normal(rng);
    Vector x(1 + t % 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = standard_normal(rng);
    const double rho = 2.0 * uniform01(rng);
    const Vector zero = Vector::Zero(s);
    // lambda = 0: the regularized form is the augmented Tchebycheff form at z* = 0.
    const double reg = scalarize({ScalarizationMethod::RegularizedAugmentedTchebycheff, rho, 0.0, {}}, w, y, x);
    const double aug = scalarize({ScalarizationMethod::AugmentedTchebycheff, rho, 0.0, zero}, w, y, x);
    // rho = 0: the augmented form is the weighted Tchebycheff form.
    const double aug0 = scalarize({ScalarizationMethod::AugmentedTchebycheff, 0.0, 0.0, zero}, w, y, x);
    const double wt = scalarize({ScalarizationMethod::WeightedTchebycheff, 0.0, 0.0, zero}, w, y, x);
    if (reg != aug || aug0 != wt) ++mismatches;
  }
  WeightVector half{Vector::Constant(2, 0.5)};
  Vector y(2), x(2);
  y << 2, 4;
  x << 3, 4;
  const double a = scalarize({ScalarizationMethod::RegularizedAugmentedTchebycheff, 0.65, 0.0, {}}, half, y, x);
  const double b = scalarize({ScalarizationMethod::RegularizedAugmentedTchebycheff, 0.65, 0.01, {}}, half, y, x);
  const bool hand = std::abs(a - 3.95) <= 1e-12 && std::abs(b - 4.00) <= 1e-12;
  return {mismatches == 0 && hand, "1e5 triples, " + std::to_string(mismatches) + " identity mismatches, hand values " +
                                       fmt("%.15g", a) + "/" + fmt("%.15g", b)};
}

Verdict pareto_extraction() {
  const auto start = Clock::now();
  Rng rng(11);
  int mismatched_sets = 0;
  double elapsed_lib = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int s = 2 + t % 4;
    PointSet pts;
    for (int i = 0; i < 200; ++i) {
      Vector p = Bounds::unit(s).sample(rng);
      // Coarse grid values so that ties and duplicates occur.
      if (t % 3 == 0) p = (p * 8.0).array().floor().matrix() / 8.0;
      pts.push_back(p);
    }
    const auto lib_start = Clock::now();
    const auto labels = extract_front(pts);
    elapsed_lib += seconds_since(lib_start);
    if (labels != oracle::brute_force_front(pts)) ++mismatched_sets;
  }
  return {mismatched_sets == 0 && elapsed_lib < 10.0,
          "100 sets x 200 points, " + std::to_string(mismatched_sets) + " mismatched, extraction " +
              fmt("%.3f", elapsed_lib) + " s (" + fmt("%.2f", seconds_since(start)) + " s with oracle)"};
}

Verdict hypervolume_check() {
  Rng rng(13);
  double sweep = 0.0;
  for (int t = 0; t < 100; ++t) {
    PointSet pts;
    const int n = 1 + t % 50;
    for (int i = 0; i < n; ++i) pts.push_back(Bounds::unit(2).sample(rng));
    const Vector ref = Vector::Constant(2, 1.1);
    sweep = std::max(sweep, std::abs(hypervolume(pts, ref) - hypervolume_2d(pts, ref)));
  }
  double incl = 0.0;
  for (int t = 0; t < 100; ++t) {
    PointSet pts;
    const int n = 1 + t % 8;
    for (int i = 0; i < n; ++i) pts.push_back(Bounds::unit(3).sample(rng));
    const Vector ref = Vector::Constant(3, 1.2);
    incl = std::max(incl, std::abs(hypervolume(pts, ref) - oracle::hv_inclusion_exclusion(pts, ref)));
  }
  double mc = 0.0;
  for (int t = 0; t < 5; ++t) {
    PointSet pts;
    for (int i = 0; i < 20; ++i) {
      Vector p(3);
      for (int k = 0; k < 3; ++k) p[k] = std::abs(standard_normal(rng)) + 1e-3;
      pts.push_back(p / p.norm());
    }
    const Vector ref = Vector::Constant(3, 1.1);
    const double exact = hypervolume(pts, ref);
    mc = std::max(mc, std::abs(oracle::hv_monte_carlo(pts, ref, 1000000, rng) - exact) / exact);
  }
  return {sweep <= 1e-12 && incl <= 1e-9 && mc < 0.01,
          "sweep " + fmt("%.2g", sweep) + ", incl-excl " + fmt("%.2g", incl) + ", Monte-Carlo rel " + fmt("%.3g", mc)};
}

Verdict cmaes() {
  int sphere_ok = 0;
  int rosen_ok = 0;
  double sphere_worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CmaesConfig cfg;
    cfg.max_evals = 20000;
    cfg.seed = seed;
    const auto s = cmaes_minimize([](const Vector& x) { return x.squaredNorm(); },
                                  Bounds(Vector::Constant(10, -5.0), Vector::Constant(10, 5.0)), cfg);
    sphere_worst = std::max(sphere_worst, s.f_best);
    if (s.f_best < 1e-8 && s.evaluations <= 20000) ++sphere_ok;
    const auto r = cmaes_minimize(
        [](const Vector& x) { return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2); },
        Bounds(Vector::Constant(2, -2.0), Vector::Constant(2, 2.0)), cfg);
    if ((r.x_best - Vector::Ones(2)).norm() < 1e-3 && r.evaluations <= 20000) ++rosen_ok;
  }
  return {sphere_ok == 5 && rosen_ok >= 4, "sphere d=10 " + std::to_string(sphere_ok) + "/5 (worst f " +
                                               fmt("%.2g", sphere_worst) + "), Rosenbrock " +
                                               std::to_string(rosen_ok) + "/5"};
}

KnownConstraintSet random_linear_constraints(Rng& rng, Eigen::Index d) {
  KnownConstraintSet set;
  const int count = 1 + static_cast<int>(uniform01(rng) * 3);
  for (int k = 0; k < count; ++k) {
    Vector a(d);
    for (Eigen::Index j = 0; j < d; ++j) a[j] = standard_normal(rng);
    // Passes through a random interior point, so roughly half the box is admissible.
    const Vector anchor = Bounds::unit(d).sample(rng);
    set.add_linear(a, a.dot(anchor) + 0.2 * std::abs(standard_normal(rng)));
  }
  return set;
}

Verdict constraint_masking() {
  const auto spec = BenchmarkSpec::make(BenchmarkName::ZDT1);
  const Eigen::Index d = spec.dimension;
  Rng rng(17);

  // Surrogates from a small hidden-constrained data set.
  PointSet inputs;
  PointSet objectives;
  std::vector<bool> feasible;
  std::vector<int> labels;
  Vector y(12);
  for (int i = 0; i < 12; ++i) {
    inputs.push_back(spec.bounds.sample(rng));
    const bool ok = inputs.back()[0] + inputs.back()[1] <= 1.2;
    feasible.push_back(ok);
    labels.push_back(ok ? 1 : 0);
    objectives.push_back(evaluate(spec, inputs.back()));
    y[i] = -objectives.back().sum();
  }
  const GpModel objective_gp = fit(stack_rows(inputs), y, KernelKind::Matern52);
  const ParetoClassifier pareto = fit_pareto_classifier(inputs, feasible, objectives);
  const FeasibilityClassifier feas = fit_feasibility(inputs, labels);

  const auto variants = AcquisitionSpec::all_variants(2.0);
  long violating = 0;
  long nonzero_at_violation = 0;
  for (int set_index = 0; set_index < 100; ++set_index) {
    const KnownConstraintSet known = random_linear_constraints(rng, d);
    const AcquisitionSpec& variant = variants[static_cast<std::size_t>(set_index) % variants.size()];
    CompositeAcquisition acq(variant, objective_gp, pareto, feas, known, y.maxCoeff());
    acq.calibrate(draw_probes(spec.bounds, 64, rng));
    for (int q = 0; q < 100; ++q) {
      const Vector x = spec.bounds.sample(rng);
      if (known_indicator(known, x) == 0) {
        ++violating;
        if (acq.factors(x).value != 0.0) ++nonzero_at_violation;
      }
    }
  }

  // Asks under random constraints, through the initial design and the model-based phase.
  int asks = 0;
  int violating_asks = 0;
  for (int trial = 0; trial < 6; ++trial) {
    OptimizerConfig cfg;
    cfg.bounds = spec.bounds;
    cfg.objectives = 2;
    cfg.seed = 100 + static_cast<std::uint64_t>(trial);
    cfg.n_init = 3;
    cfg.acquisition = variants[static_cast<std::size_t>(trial) * 3 % variants.size()];
    cfg.known_constraints = random_linear_constraints(rng, d);
    Optimizer opt(cfg);
    for (int step = 0; step < 8; ++step) {
      const Proposal p = opt.propose();
      ++asks;
      if (known_indicator(cfg.known_constraints, p.x) == 0) ++violating_asks;
      opt.tell(p, EvaluationResult::success(evaluate(spec, p.x)));
    }
  }
  return {violating > 0 && nonzero_at_violation == 0 && violating_asks == 0,
          "1e4 queries (" + std::to_string(violating) + " violating, " + std::to_string(nonzero_at_violation) +
              " nonzero), " + std::to_string(asks) + " asks with " + std::to_string(violating_asks) + " violating"};
}

harness::ExperimentConfig desk_config(const std::string& json) { return harness::parse_config(json); }

struct EndToEnd {
  std::vector<double> bo;
  std::vector<double> random;
  std::vector<double> seconds;
};

Verdict zdt1_end_to_end() {
  const auto config = desk_config(
      R"({"benchmark":"ZDT1","dimension":3,"objectives":2,"n_init":5,"budget":145,"seeds":[1,2,3,4,5],)"
      R"("variants":["Reg-UCB-EI"],"checkpoint_every":150,"front_resolution":500})");
  const auto spec = harness::benchmark_spec(config);
  RunOptions opts;
  opts.budget = config.budget;
  opts.checkpoint_every = config.checkpoint_every;
  opts.true_front = true_front(spec, 500).points;
  const Evaluator ev = [&](const Vector& x) { return EvaluationResult::success(evaluate(spec, x)); };
  EndToEnd r;
  for (std::uint64_t seed : config.run_seeds()) {
    const OptimizerConfig oc = harness::optimizer_config(config, config.variants[0], seed);
    const auto start = Clock::now();
    const RunResult bo = run(oc, ev, opts);
    r.seconds.push_back(seconds_since(start));
    const RunResult rs = random_search(oc, ev, opts);
    if (bo.dataset.size() != 150 || rs.dataset.size() != 150) throw std::runtime_error("unexpected run length");
    r.bo.push_back(bo.checkpoints.back().metrics.igd);
    r.random.push_back(rs.checkpoints.back().metrics.igd);
    std::printf("  ZDT1 seed %llu: IGD %.4g vs random %.4g (%.1f s)\n", static_cast<unsigned long long>(seed),
                r.bo.back(), r.random.back(), r.seconds.back());
    std::fflush(stdout);
  }
  const double bo_med = median(r.bo);
  const double rs_med = median(r.random);
  const double slowest = *std::max_element(r.seconds.begin(), r.seconds.end());
  return {bo_med < rs_med, "median IGD " + fmt("%.4g", bo_med) + " vs random " + fmt("%.4g", rs_med) +
                               ", slowest run " + fmt("%.1f", slowest) + " s"};
}

Verdict dtlz2_end_to_end() {
  const auto config = desk_config(
      R"({"benchmark":"DTLZ2","form":"scaled","dimension":4,"objectives":3,"n_init":5,"budget":195,)"
      R"("seeds":[1,2,3],"variants":["Reg-UCB-EI"],"checkpoint_every":50,"front_resolution":2500})");
  const auto spec = harness::benchmark_spec(config);
  RunOptions opts;
  opts.budget = config.budget;
  opts.checkpoint_every = config.checkpoint_every;
  opts.true_front = harness::benchmark_front(config);
  const Evaluator ev = [&](const Vector& x) { return EvaluationResult::success(evaluate(spec, x)); };
  int hv_ok = 0;
  int gd_ok = 0;
  const auto gd_at = [](const RunResult& r, int evals) {
    for (const auto& c : r.checkpoints) {
      if (c.evaluations == evals) return c.metrics.gd;
    }
    throw std::runtime_error("missing checkpoint at " + std::to_string(evals));
  };
  for (std::uint64_t seed : config.run_seeds()) {
    const OptimizerConfig oc = harness::optimizer_config(config, config.variants[0], seed);
    const auto start = Clock::now();
    const RunResult bo = run(oc, ev, opts);
    const double elapsed = seconds_since(start);
    const RunResult rs = random_search(oc, ev, opts);
    const double hv_bo = bo.checkpoints.back().metrics.hv;
    const double hv_rs = rs.checkpoints.back().metrics.hv;
    const double gd50 = gd_at(bo, 50);
    const double gd200 = gd_at(bo, 200);
    if (hv_bo >= hv_rs) ++hv_ok;
    if (gd200 < gd50) ++gd_ok;
    std::printf("  DTLZ2 seed %llu: HV %.4g vs random %.4g, GD %.4g -> %.4g (%.1f s)\n",
                static_cast<unsigned long long>(seed), hv_bo, hv_rs, gd50, gd200, elapsed);
    std::fflush(stdout);
  }
  return {hv_ok == 3 && gd_ok >= 2, "HV >= random on " + std::to_string(hv_ok) + "/3 seeds, GD(50) > GD(200) on " +
                                        std::to_string(gd_ok) + "/3 seeds"};
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "mobo_acceptance_determinism";
  fs::remove_all(root);
  const std::string body =
      R"({"benchmark":"ZDT3","n_init":5,"budget":25,"seeds":[3],"variants":["NoReg-PI-UCB","Reg-EI-EI"],)"
      R"("checkpoint_every":10,"front_resolution":200,"workers":1,"known_constraints":[{"variable":2,"upper":0.8}],)";
  std::vector<std::string> csvs[2];
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path out = root / std::to_string(rep);
    const auto config = desk_config(body + R"("output":")" + out.string() + "\"}");
    const auto outcome = harness::run_experiment(config);
    if (!outcome.all_succeeded()) return {false, "a run failed"};
    for (const auto& s : outcome.runs) csvs[rep].push_back(slurp(out / s.run_id / "results.csv"));
  }
  const bool same = csvs[0] == csvs[1] && !csvs[0].empty() && !csvs[0][0].empty();
  fs::remove_all(root);
  return {same, std::to_string(csvs[0].size()) + " run CSVs compared byte for byte"};
}

Verdict protocol() {
  const fs::path stubs = MOBO_TEST_STUBS;
  const Vector x = Vector::Constant(3, 0.5);
  using S = harness::ExternalOutcome::Status;
  std::vector<std::string> bad;
  const auto ok = harness::external_evaluate("sh " + (stubs / "feasible.sh").string(), x, 10);
  Vector expected(2);
  expected << 1, 2;
  if (ok.status != S::Feasible || !ok.result.objectives || *ok.result.objectives != expected) bad.push_back("feasible");
  const auto inf = harness::external_evaluate("sh " + (stubs / "infeasible.sh").string(), x, 10);
  if (inf.status != S::Infeasible || inf.result.objectives) bad.push_back("infeasible");
  const auto crash = harness::external_evaluate("sh " + (stubs / "crash.sh").string(), x, 10);
  if (crash.status != S::NonzeroExit || crash.result.objectives) bad.push_back("crash");
  const auto start = Clock::now();
  const auto hang = harness::external_evaluate("sh " + (stubs / "hang.sh").string(), x, 1.0);
  const double waited = seconds_since(start);
  if (hang.status != S::Timeout || hang.result.objectives || waited > 10.0) bad.push_back("timeout");
  const auto garbage = harness::external_evaluate("sh " + (stubs / "malformed.sh").string(), x, 10);
  if (garbage.status != S::Malformed || garbage.result.objectives) bad.push_back("malformed");

  // The records an optimizer stores for those outcomes.
  OptimizerConfig cfg;
  cfg.bounds = Bounds::unit(3);
  cfg.objectives = 2;
  Optimizer opt(cfg);
  for (const auto* o : {&ok, &inf, &crash, &hang}) opt.tell(x, o->result);
  const auto& ds = opt.dataset();
  if (!(ds[0].feasible && ds[0].objectives == expected)) bad.push_back("feasible record");
  for (int i = 1; i < 4; ++i) {
    if (ds[i].feasible || ds[i].objectives) bad.push_back("infeasible record " + std::to_string(i));
  }
  std::string detail = "feasible, infeasible, crash, timeout (" + fmt("%.1f", waited) + " s), malformed";
  for (const auto& b : bad) detail += "; wrong: " + b;
  return {bad.empty(), detail};
}

}  // namespace

int main(int, char** argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_minloglevel = google::GLOG_ERROR;

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"gp-correctness", gp_correctness},
      {"gp-interpolation", gp_interpolation},
      {"scalarization", scalarization},
      {"pareto-extraction", pareto_extraction},
      {"hypervolume", hypervolume_check},
      {"cmaes", cmaes},
      {"constraint-masking", constraint_masking},
      {"zdt1-end-to-end", zdt1_end_to_end},
      {"dtlz2-end-to-end", dtlz2_end_to_end},
      {"determinism", determinism},
      {"protocol-conformance", protocol},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
