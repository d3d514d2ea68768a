#include "mobo/acquisition.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mobo;

namespace {

struct Surrogates {
  GpModel objective;
  ParetoClassifier pareto;
  FeasibilityClassifier feasibility;
  double incumbent;
};

Surrogates make_surrogates(Rng& rng, int n, int d) {
  PointSet inputs;
  PointSet objectives;
  std::vector<int> labels;
  Vector targets(n);
  for (int i = 0; i < n; ++i) {
    const Vector x = Bounds::unit(d).sample(rng);
    inputs.push_back(x);
    Vector y(2);
    y << x[0], 1.0 - std::sqrt(x[0]) + x.tail(d - 1).sum();
    objectives.push_back(y);
    labels.push_back(x.sum() < 0.7 * d ? 1 : 0);
    targets[i] = -(std::max(0.5 * y[0], 0.5 * y[1]) + 0.65 * 0.5 * y.sum());
  }
  std::vector<bool> feasible(labels.begin(), labels.end());
  FitConfig cfg;
  cfg.seed = rng();
  GpModel gp = fit(stack_rows(inputs), targets, KernelKind::Matern52, cfg);
  auto par = fit_pareto_classifier(inputs, feasible, objectives, KernelKind::Matern52, cfg);
  auto feas = fit_feasibility(inputs, labels, KernelKind::Matern52, cfg);
  return {std::move(gp), std::move(par), std::move(feas), targets.maxCoeff()};
}

}  // namespace

TEST(BaseAcquisition, WorkedExamples) {
  EXPECT_DOUBLE_EQ(base_acquisition(AcquisitionKind::EI, 2.0, 0.0, 1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(base_acquisition(AcquisitionKind::PI, 1.0, 1.0, 1.0, 2.0), 0.5);
  EXPECT_NEAR(base_acquisition(AcquisitionKind::EI, 1.0, 1.0, 1.0, 2.0), 1.0 / std::sqrt(2 * M_PI), 1e-15);
  EXPECT_NEAR(base_acquisition(AcquisitionKind::EI, 1.0, 1.0, 1.0, 2.0), 0.39894, 1e-5);
  EXPECT_DOUBLE_EQ(base_acquisition(AcquisitionKind::UCB, 1.0, 4.0, 0.0, 2.0, 0.5), 4.5);
  EXPECT_DOUBLE_EQ(base_acquisition(AcquisitionKind::UCB, 1.0, 0.0, 0.0, 2.0, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(base_acquisition(AcquisitionKind::PI, 0.5, 0.0, 1.0, 2.0), 0.0);
  EXPECT_THROW(base_acquisition(AcquisitionKind::EI, 0.0, -1.0, 0.0, 2.0), std::invalid_argument);
}

TEST(BaseAcquisition, NonnegativeAndMonotone) {
  Rng rng(1);
  for (auto kind : {AcquisitionKind::PI, AcquisitionKind::EI, AcquisitionKind::UCB}) {
    for (int t = 0; t < 2000; ++t) {
      const double mu = 3.0 * standard_normal(rng);
      const double var = uniform01(rng) * 4.0;
      const double inc = standard_normal(rng);
      const double a = base_acquisition(kind, mu, var, inc, 2.0);
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, base_acquisition(kind, mu + 0.1, var, inc, 2.0) + 1e-15);
      if (kind == AcquisitionKind::UCB) EXPECT_LE(a, base_acquisition(kind, mu, var + 0.1, inc, 2.0));
    }
  }
}

TEST(AcquisitionSpec, NamesAndVariants) {
  const auto all = AcquisitionSpec::all_variants();
  ASSERT_EQ(all.size(), 18u);
  for (const auto& v : all) {
    const auto parsed = AcquisitionSpec::parse(v.name());
    ASSERT_TRUE(parsed);
    EXPECT_EQ(parsed->name(), v.name());
  }
  EXPECT_EQ(AcquisitionSpec{}.name(), "Reg-UCB-EI");
  EXPECT_EQ(AcquisitionSpec{}.ucb_kappa, 2.0);
  EXPECT_FALSE(AcquisitionSpec::parse("Reg-UCB"));
  EXPECT_FALSE(AcquisitionSpec::parse("Foo-EI-EI"));
  EXPECT_FALSE(AcquisitionSpec::parse("Reg-EI-XX"));
}

TEST(Composite, FactorRules) {
  const AcquisitionSpec spec{AcquisitionKind::EI, AcquisitionKind::PI, 2.0, true};
  const AcquisitionContext ctx{0.0, 0.5, 0.0, 0.0};
  const Posterior o{1.0, 0.25};
  const Posterior p{0.7, 0.04};
  EXPECT_EQ(composite_acquisition(spec, o, p, 0.9, 0, ctx), 0.0);
  const double a = base_acquisition(AcquisitionKind::EI, 1.0, 0.25, 0.0, 2.0);
  const double b = base_acquisition(AcquisitionKind::PI, 0.7, 0.04, 0.5, 2.0);
  EXPECT_EQ(composite_acquisition(spec, o, p, 1.0, 1, ctx), a * b);
  EXPECT_NEAR(composite_acquisition(spec, o, p, 0.3, 1, ctx), a * b * 0.3, 1e-15);
}

TEST(Composite, EqualsTermByTermProduct) {
  Rng rng(2);
  const Surrogates s = make_surrogates(rng, 15, 2);
  for (const auto& spec : AcquisitionSpec::all_variants()) {
    KnownConstraintSet known;
    CompositeAcquisition acq(spec, s.objective, s.pareto, s.feasibility, known, s.incumbent);
    const PointSet probes = draw_probes(Bounds::unit(2), 256, rng);
    acq.calibrate(probes);
    for (int q = 0; q < 50; ++q) {
      const Vector x = Bounds::unit(2).sample(rng);
      const auto f = acq.factors(x);
      const Posterior o = s.objective.predict(x);
      const Posterior p = pareto_probability(s.pareto, x);
      const double a_obj = base_acquisition(spec.objective_acq, o.mean, o.variance, s.incumbent, 2.0,
                                            acq.context().objective_ucb_baseline);
      const double a_par = base_acquisition(spec.pareto_acq, p.mean, p.variance,
                                            s.pareto.best_training_probability(), 2.0,
                                            acq.context().pareto_ucb_baseline);
      const double expected = a_obj * a_par * s.feasibility.probability(x);
      EXPECT_GE(f.value, 0.0);
      EXPECT_NEAR(f.value, expected, 1e-12 * std::max(1.0, std::abs(expected)));
      if (a_obj > 0 && a_par > 0 && f.feasibility > 0) EXPECT_GT(f.value, 0.0);
    }
  }
}

TEST(Composite, UcbShiftFloorsAtProbeMinimum) {
  Rng rng(3);
  const Surrogates s = make_surrogates(rng, 12, 2);
  KnownConstraintSet known;
  CompositeAcquisition acq({AcquisitionKind::UCB, AcquisitionKind::UCB, 2.0, true}, s.objective, s.pareto,
                           s.feasibility, known, s.incumbent);
  const PointSet probes = draw_probes(Bounds::unit(2), 300, rng);
  acq.calibrate(probes);
  double min_obj = 1e300;
  for (const auto& x : probes) min_obj = std::min(min_obj, acq.factors(x).objective);
  EXPECT_EQ(min_obj, 0.0);
}

TEST(Composite, MaskedEverywhereOnViolations) {
  Rng rng(4);
  const Surrogates s = make_surrogates(rng, 12, 3);
  for (int t = 0; t < 20; ++t) {
    KnownConstraintSet known;
    for (int k = 0; k < 2; ++k) {
      Vector a(3);
      for (int i = 0; i < 3; ++i) a[i] = standard_normal(rng);
      known.add_linear(a, 0.3 * standard_normal(rng));
    }
    CompositeAcquisition acq(AcquisitionSpec{}, s.objective, s.pareto, s.feasibility, known, s.incumbent);
    for (int q = 0; q < 200; ++q) {
      const Vector x = Bounds::unit(3).sample(rng);
      if (known_indicator(known, x) == 0) {
        EXPECT_EQ(acq(x), 0.0);
        EXPECT_EQ(acq.feasibility_score(x), 0.0);
      }
    }
  }
}

TEST(Maximize, FindsKnownMaximizer) {
  const auto f = [](const Vector& x) { return -(x.array() - 0.5).square().sum(); };
  AcquisitionOptimizerConfig cfg;
  cfg.seed = 1;
  const auto best = maximize_acquisition(f, Bounds::unit(3), cfg);
  EXPECT_LT((best.x.array() - 0.5).abs().maxCoeff(), 1e-3);
}

TEST(Maximize, NeverWorseThanProbesOrDenseSample) {
  Rng rng(5);
  const Surrogates s = make_surrogates(rng, 15, 2);
  KnownConstraintSet known;
  CompositeAcquisition acq(AcquisitionSpec{}, s.objective, s.pareto, s.feasibility, known, s.incumbent);
  AcquisitionOptimizerConfig cfg;
  cfg.seed = 9;
  const PointSet probes = draw_probes(Bounds::unit(2), cfg.probes, rng);
  acq.calibrate(probes);
  const auto fn = [&](const Vector& x) { return acq(x); };
  const auto best = maximize_acquisition(fn, Bounds::unit(2), cfg, probes);
  for (const auto& p : probes) EXPECT_GE(best.value, acq(p));
  double dense = 0.0;
  for (int i = 0; i < 10000; ++i) dense = std::max(dense, acq(Bounds::unit(2).sample(rng)));
  EXPECT_GE(best.value, dense);
  EXPECT_EQ(best.value, acq(best.x));
}

TEST(Maximize, ScaleInvariantArgmax) {
  Rng rng(6);
  const Surrogates s = make_surrogates(rng, 15, 2);
  KnownConstraintSet known;
  CompositeAcquisition acq(AcquisitionSpec{}, s.objective, s.pareto, s.feasibility, known, s.incumbent);
  AcquisitionOptimizerConfig cfg;
  cfg.seed = 4;
  const PointSet probes = draw_probes(Bounds::unit(2), cfg.probes, rng);
  acq.calibrate(probes);
  const auto a = maximize_acquisition([&](const Vector& x) { return acq(x); }, Bounds::unit(2), cfg, probes);
  const auto b = maximize_acquisition([&](const Vector& x) { return 8.0 * acq(x); }, Bounds::unit(2), cfg, probes);
  EXPECT_EQ(a.x, b.x);
}

TEST(Maximize, MaskedFallbackRespectsConstraints) {
  KnownConstraintSet known;
  Vector a(2);
  a << 1.0, 0.0;
  known.add_linear(a, 0.5);
  const auto zero = [](const Vector&) { return 0.0; };
  const auto fallback = [&](const Vector& x) { return known_indicator(known, x) * (1.0 - x[1]); };
  AcquisitionOptimizerConfig cfg;
  cfg.seed = 2;
  const auto best = maximize_acquisition(zero, Bounds::unit(2), cfg, fallback);
  EXPECT_TRUE(best.used_fallback);
  EXPECT_EQ(known_indicator(known, best.x), 1);
}

TEST(Maximize, DeterministicForSeed) {
  const auto f = [](const Vector& x) { return std::sin(7 * x[0]) * std::cos(5 * x[1]); };
  AcquisitionOptimizerConfig cfg;
  cfg.seed = 3;
  EXPECT_EQ(maximize_acquisition(f, Bounds::unit(2), cfg).x, maximize_acquisition(f, Bounds::unit(2), cfg).x);
}
