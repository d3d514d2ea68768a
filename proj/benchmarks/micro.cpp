#include "mobo/mobo.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace mobo;

namespace {

void training_data(int n, int d, Matrix& X, Vector& y) {
  Rng rng(1);
  X.resize(n, d);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    X.row(i) = Bounds::unit(d).sample(rng).transpose();
    y[i] = std::sin(3.0 * X(i, 0)) + X.row(i).squaredNorm();
  }
}

PointSet random_front(int n, int s) {
  Rng rng(2);
  PointSet out;
  for (int i = 0; i < n; ++i) {
    Vector p(s);
    for (int k = 0; k < s; ++k) p[k] = std::abs(standard_normal(rng)) + 1e-3;
    out.push_back(p / p.norm());
  }
  return out;
}

void BM_GpFit(benchmark::State& state) {
  Matrix X;
  Vector y;
  training_data(static_cast<int>(state.range(0)), 3, X, y);
  for (auto _ : state) benchmark::DoNotOptimize(fit(X, y, KernelKind::Matern52));
}
BENCHMARK(BM_GpFit)->Arg(20)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_GpPredict(benchmark::State& state) {
  Matrix X;
  Vector y;
  training_data(static_cast<int>(state.range(0)), 3, X, y);
  const GpModel m = GpModel::condition({KernelKind::Matern52, 1.0, Vector::Constant(3, 0.3)}, 1e-6, y.mean(), X, y);
  const Vector x = Vector::Constant(3, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(m.predict(x));
}
BENCHMARK(BM_GpPredict)->Arg(50)->Arg(200);

void BM_Hypervolume(benchmark::State& state) {
  const int s = static_cast<int>(state.range(1));
  const PointSet front = random_front(static_cast<int>(state.range(0)), s);
  const Vector ref = Vector::Constant(s, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(hypervolume(front, ref));
}
BENCHMARK(BM_Hypervolume)->Args({100, 2})->Args({50, 3})->Args({30, 4})->Unit(benchmark::kMicrosecond);

void BM_ExtractFront(benchmark::State& state) {
  Rng rng(3);
  PointSet pts;
  for (int i = 0; i < state.range(0); ++i) pts.push_back(Bounds::unit(3).sample(rng));
  for (auto _ : state) benchmark::DoNotOptimize(extract_front(pts));
}
BENCHMARK(BM_ExtractFront)->Arg(200)->Arg(2000)->Unit(benchmark::kMicrosecond);

void BM_CmaesSphere(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Bounds box(Vector::Constant(d, -5.0), Vector::Constant(d, 5.0));
  CmaesConfig cfg;
  cfg.max_evals = 20000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cmaes_minimize([](const Vector& x) { return x.squaredNorm(); }, box, cfg));
  }
}
BENCHMARK(BM_CmaesSphere)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
