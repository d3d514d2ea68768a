#include "mobo/gp.hpp"

#include <ceres/ceres.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mobo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;
constexpr double kLog2Pi = 1.8378770664093453;

// -k'(r) / r for the unit-amplitude profile; finite at r = 0 except for
// Matern12, whose callers multiply by a factor that vanishes there.
double profile_slope_ratio(KernelKind kind, double r) {
  switch (kind) {
    case KernelKind::Matern12:
      return r > 0.0 ? std::exp(-r) / r : 0.0;
    case KernelKind::Matern32:
      return 3.0 * std::exp(-kSqrt3 * r);
    case KernelKind::Matern52:
      return (5.0 / 3.0) * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
    case KernelKind::SqExp:
      return std::exp(-0.5 * r * r);
  }
  return 0.0;
}

template <class A, class B>
double scaled_distance(const A& a, const B& b, const Vector& lengthscales) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    const double z = (a(i) - b(i)) / lengthscales[i];
    r2 += z * z;
  }
  return std::sqrt(r2);
}

struct Factor {
  Matrix lower;
  double jitter = 0.0;
};

// Cholesky of `cov`, retrying with diagonal jitter 1e-10 * mean(diag),
// doubled up to 1e-4 * mean(diag).
std::optional<Factor> cholesky_with_jitter(const Matrix& cov) {
  const Eigen::Index n = cov.rows();
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) return Factor{llt.matrixL(), 0.0};
  const double diag_mean = std::max(cov.diagonal().mean(), std::numeric_limits<double>::min());
  for (double rel = 1e-10; rel <= 1e-4 * (1.0 + 1e-12); rel *= 2.0) {
    const double jitter = rel * diag_mean;
    llt.compute(cov + jitter * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success) return Factor{llt.matrixL(), jitter};
  }
  return std::nullopt;
}

struct LikelihoodTerms {
  double value = 0.0;
  Vector gradient;  // empty unless requested
};

// Log marginal likelihood of centered targets, optionally with its gradient in
// [log amplitude, log lengthscales..., log noise]. nullopt on factorization failure.
std::optional<LikelihoodTerms> evaluate_likelihood(const Matrix& inputs, const Vector& centered,
                                                   const KernelSpec& kernel, double noise,
                                                   bool want_gradient) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index d = inputs.cols();
  Matrix cov = kernel_matrix(kernel, inputs);
  cov.diagonal().array() += noise;
  auto factor = cholesky_with_jitter(cov);
  if (!factor) return std::nullopt;
  const auto lower = factor->lower.triangularView<Eigen::Lower>();
  Vector alpha = lower.solve(centered);
  factor->lower.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha);

  LikelihoodTerms out;
  out.value = -0.5 * centered.dot(alpha) - factor->lower.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * kLog2Pi;
  if (!std::isfinite(out.value)) return std::nullopt;
  if (!want_gradient) return out;

  // (K + noise I)^-1 = L^-T L^-1, only the lower triangle is formed.
  Matrix lower_inverse = Matrix::Identity(n, n);
  factor->lower.triangularView<Eigen::Lower>().solveInPlace(lower_inverse);
  Matrix weight = Matrix::Zero(n, n);
  weight.selfadjointView<Eigen::Lower>().rankUpdate(lower_inverse.transpose(), -1.0);
  weight.selfadjointView<Eigen::Lower>().rankUpdate(alpha, 1.0);

  const double amp2 = kernel.amplitude * kernel.amplitude;
  const Vector inv_ls = kernel.lengthscales.cwiseInverse();
  out.gradient = Vector::Zero(d + 2);
  // Diagonal pairs: r = 0, only the amplitude term survives.
  out.gradient[0] = amp2 * weight.diagonal().sum();
  Vector z(d);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = b + 1; a < n; ++a) {
      const double w = 2.0 * weight(a, b);
      z = (inputs.row(a) - inputs.row(b)).transpose().cwiseProduct(inv_ls);
      const double r2 = z.squaredNorm();
      const double r = std::sqrt(r2);
      out.gradient[0] += w * amp2 * kernel_profile(kernel.kind, r);
      if (r2 == 0.0) continue;
      const double slope = 0.5 * w * amp2 * profile_slope_ratio(kernel.kind, r);
      out.gradient.segment(1, d) += slope * z.cwiseAbs2();
    }
  }
  out.gradient[d + 1] = 0.5 * noise * weight.diagonal().sum();
  return out;
}

// Box-constrained search space in log coordinates, mapped to an unconstrained
// one through a logistic transform so that a quasi-Newton solver can run freely.
struct LogBox {
  Vector lo;
  Vector hi;

  Vector to_log(const Vector& u) const {
    Vector p(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      p[i] = lo[i] + (hi[i] - lo[i]) / (1.0 + std::exp(-u[i]));
    }
    return p;
  }
  Vector to_free(const Vector& p) const {
    Vector u(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (hi[i] <= lo[i]) {
        u[i] = 0.0;
        continue;
      }
      const double t = std::clamp((p[i] - lo[i]) / (hi[i] - lo[i]), 1e-9, 1.0 - 1e-9);
      u[i] = std::log(t / (1.0 - t));
    }
    return u;
  }
  double jacobian(const Vector& u, Eigen::Index i) const {
    const double s = 1.0 / (1.0 + std::exp(-u[i]));
    return (hi[i] - lo[i]) * s * (1.0 - s);
  }
};

// Packs [log amp, log ls (1 or d), log noise (optional)].
struct Packing {
  Eigen::Index dim = 0;
  bool isotropic = false;
  std::optional<double> fixed_noise;
  KernelKind kind = KernelKind::Matern52;

  Eigen::Index size() const { return 1 + (isotropic ? 1 : dim) + (fixed_noise ? 0 : 1); }

  std::pair<KernelSpec, double> unpack(const Vector& p) const {
    KernelSpec k;
    k.kind = kind;
    k.amplitude = std::exp(p[0]);
    k.lengthscales.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) k.lengthscales[i] = std::exp(p[1 + (isotropic ? 0 : i)]);
    const double noise = fixed_noise ? *fixed_noise : std::exp(p[size() - 1]);
    return {k, noise};
  }

  Vector reduce_gradient(const Vector& full) const {
    Vector g = Vector::Zero(size());
    g[0] = full[0];
    for (Eigen::Index i = 0; i < dim; ++i) g[1 + (isotropic ? 0 : i)] += full[1 + i];
    if (!fixed_noise) g[size() - 1] = full[dim + 1];
    return g;
  }
};

class NegativeLogLikelihood final : public ceres::FirstOrderFunction {
 public:
  NegativeLogLikelihood(const Matrix& inputs, const Vector& centered, Packing packing, LogBox box)
      : inputs_(inputs), centered_(centered), packing_(std::move(packing)), box_(std::move(box)) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    const Eigen::Index m = packing_.size();
    const Vector u = Eigen::Map<const Vector>(parameters, m);
    const auto [kernel, noise] = packing_.unpack(box_.to_log(u));
    auto terms = evaluate_likelihood(inputs_, centered_, kernel, noise, gradient != nullptr);
    if (!terms) return false;
    *cost = -terms->value;
    if (gradient != nullptr) {
      const Vector g = packing_.reduce_gradient(terms->gradient);
      for (Eigen::Index i = 0; i < m; ++i) gradient[i] = -g[i] * box_.jacobian(u, i);
    }
    return true;
  }

  int NumParameters() const override { return static_cast<int>(packing_.size()); }

 private:
  const Matrix& inputs_;
  const Vector& centered_;
  Packing packing_;
  LogBox box_;
};

double log_uniform(Rng& rng, double lo, double hi) {
  return std::log(lo) + uniform01(rng) * (std::log(hi) - std::log(lo));
}

}  // namespace

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Matern12: return "Matern12";
    case KernelKind::Matern32: return "Matern32";
    case KernelKind::Matern52: return "Matern52";
    case KernelKind::SqExp: return "SqExp";
  }
  return "?";
}

std::optional<KernelKind> parse_kernel_kind(std::string_view name) {
  for (auto kind : {KernelKind::Matern12, KernelKind::Matern32, KernelKind::Matern52,
                    KernelKind::SqExp}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

void KernelSpec::validate() const {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("KernelSpec: amplitude must be positive and finite");
  }
  if (lengthscales.size() == 0) throw std::invalid_argument("KernelSpec: no lengthscales");
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    if (!(lengthscales[i] > 0.0) || !std::isfinite(lengthscales[i])) {
      throw std::invalid_argument("KernelSpec: lengthscales must be positive and finite");
    }
  }
}

double kernel_profile(KernelKind kind, double r) {
  switch (kind) {
    case KernelKind::Matern12:
      return std::exp(-r);
    case KernelKind::Matern32:
      return (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
    case KernelKind::Matern52:
      return (1.0 + kSqrt5 * r + (5.0 / 3.0) * r * r) * std::exp(-kSqrt5 * r);
    case KernelKind::SqExp:
      return std::exp(-0.5 * r * r);
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& x2) {
  const Eigen::Index d = spec.lengthscales.size();
  if (x.size() != d || x2.size() != d) {
    throw std::invalid_argument("kernel_eval: input dimension does not match lengthscales");
  }
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double z = (x[i] - x2[i]) / spec.lengthscales[i];
    r2 += z * z;
  }
  return spec.amplitude * spec.amplitude * kernel_profile(spec.kind, std::sqrt(r2));
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& inputs) {
  const Eigen::Index n = inputs.rows();
  if (inputs.cols() != spec.lengthscales.size()) {
    throw std::invalid_argument("kernel_matrix: input dimension does not match lengthscales");
  }
  Matrix cov(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    cov(a, a) = spec.amplitude * spec.amplitude;
    for (Eigen::Index b = 0; b < a; ++b) {
      const double v = spec.amplitude * spec.amplitude *
                       kernel_profile(spec.kind, scaled_distance(inputs.row(a), inputs.row(b),
                                                                 spec.lengthscales));
      cov(a, b) = v;
      cov(b, a) = v;
    }
  }
  return cov;
}

Matrix stack_rows(const PointSet& points) {
  if (points.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(points.size()), points.front().size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != m.cols()) throw std::invalid_argument("stack_rows: ragged point set");
    m.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  }
  return m;
}

GpModel GpModel::condition(KernelSpec kernel, double noise_variance, double prior_mean,
                           Matrix inputs, Vector targets) {
  kernel.validate();
  if (inputs.rows() == 0) throw std::invalid_argument("GpModel: no training data");
  if (inputs.rows() != targets.size()) {
    throw std::invalid_argument("GpModel: inputs and targets have different lengths");
  }
  if (inputs.cols() != kernel.lengthscales.size()) {
    throw std::invalid_argument("GpModel: input dimension does not match lengthscales");
  }
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("GpModel: negative noise variance");
  GpModel model;
  model.kernel_ = std::move(kernel);
  model.noise_ = noise_variance;
  model.prior_mean_ = prior_mean;
  model.inputs_ = std::move(inputs);
  model.targets_ = std::move(targets);
  model.input_offset_ = Vector::Zero(model.inputs_.cols());
  model.input_scale_ = Vector::Ones(model.inputs_.cols());
  model.factorize();
  return model;
}

void GpModel::factorize() {
  Matrix cov = kernel_matrix(kernel_, inputs_);
  cov.diagonal().array() += noise_;
  auto factor = cholesky_with_jitter(cov);
  if (!factor) throw FactorizationError("GpModel: K + noise*I is not positive definite");
  chol_ = std::move(factor->lower);
  jitter_ = factor->jitter;
  const auto lower = chol_.triangularView<Eigen::Lower>();
  alpha_ = lower.solve((targets_.array() - prior_mean_).matrix());
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha_);
}

Vector GpModel::to_working(const Vector& x) const {
  if (x.size() != inputs_.cols()) {
    throw std::invalid_argument("GpModel::predict: query dimension does not match the model");
  }
  return ((x - input_offset_).array() / input_scale_.array()).matrix();
}

Posterior GpModel::predict(const Vector& x) const {
  const Vector z = to_working(x);
  const Eigen::Index n = inputs_.rows();
  Vector kx(n);
  const double amp2 = kernel_.amplitude * kernel_.amplitude;
  for (Eigen::Index i = 0; i < n; ++i) {
    kx[i] = amp2 * kernel_profile(kernel_.kind, scaled_distance(z, inputs_.row(i), kernel_.lengthscales));
  }
  const double mean = prior_mean_ + kx.dot(alpha_);
  chol_.triangularView<Eigen::Lower>().solveInPlace(kx);
  const double variance = std::max(0.0, amp2 - kx.squaredNorm());
  return {target_offset_ + target_scale_ * mean, target_scale_ * target_scale_ * variance};
}

double GpModel::log_marginal_likelihood() const {
  const double n = static_cast<double>(inputs_.rows());
  const Vector centered = (targets_.array() - prior_mean_).matrix();
  return -0.5 * centered.dot(alpha_) - chol_.diagonal().array().log().sum() - 0.5 * n * kLog2Pi;
}

Vector GpModel::log_likelihood_gradient() const {
  const Vector centered = (targets_.array() - prior_mean_).matrix();
  auto terms = evaluate_likelihood(inputs_, centered, kernel_, noise_ + jitter_, true);
  if (!terms) throw FactorizationError("GpModel: gradient factorization failed");
  // Jitter is not a hyperparameter; report the noise derivative for noise_ only.
  if (noise_ + jitter_ > 0.0) terms->gradient[terms->gradient.size() - 1] *= noise_ / (noise_ + jitter_);
  return terms->gradient;
}

GpModel fit(const Matrix& inputs, const Vector& targets, KernelKind kind, const FitConfig& config) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index d = inputs.cols();
  if (n == 0 || d == 0) throw std::invalid_argument("fit: empty training data");
  if (targets.size() != n) throw std::invalid_argument("fit: inputs and targets have different lengths");
  if (!inputs.allFinite() || !targets.allFinite()) throw std::invalid_argument("fit: non-finite data");

  Vector offset = inputs.colwise().minCoeff().transpose();
  Vector scale = (inputs.colwise().maxCoeff().transpose() - offset);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(scale[i] > 0.0)) scale[i] = 1.0;
  }
  Matrix working = inputs;
  for (Eigen::Index i = 0; i < n; ++i) {
    working.row(i) = ((inputs.row(i).transpose() - offset).array() / scale.array()).matrix().transpose();
  }

  const double mean = targets.mean();
  const double stddev = std::sqrt((targets.array() - mean).square().mean());
  const double noise_floor = std::max(config.noise_floor, 0.0);
  const bool degenerate = !(stddev > 1e-12 * std::max(1.0, std::abs(mean)));
  const double target_scale = degenerate ? 1.0 : stddev;
  const Vector standardized = ((targets.array() - mean) / target_scale).matrix();

  auto finish = [&](KernelSpec kernel, double noise, FitDiagnostics diag) {
    GpModel model = GpModel::condition(std::move(kernel), noise, 0.0, working, standardized);
    model.input_offset_ = offset;
    model.input_scale_ = scale;
    model.target_offset_ = mean;
    model.target_scale_ = target_scale;
    diag.log_likelihood = model.log_marginal_likelihood();
    model.diagnostics_ = std::move(diag);
    return model;
  };

  if (degenerate) {
    // Constant targets carry no information about the kernel; keep the
    // amplitude at its floor so the posterior stays pinned to the constant.
    KernelSpec kernel{kind, 1e-3, Vector::Ones(d)};
    FitDiagnostics diag;
    diag.degenerate = true;
    return finish(std::move(kernel), config.fixed_noise.value_or(std::max(noise_floor, 1e-10)), diag);
  }

  Packing packing{d, config.isotropic, config.fixed_noise, kind};
  const Eigen::Index m = packing.size();
  LogBox box{Vector(m), Vector(m)};
  box.lo[0] = std::log(1e-3);
  box.hi[0] = std::log(1e3);
  for (Eigen::Index i = 1; i < m; ++i) {
    box.lo[i] = std::log(1e-3);
    box.hi[i] = std::log(1e3);
  }
  if (!config.fixed_noise) {
    const double noise_hi = 1.0;  // target variance after standardization
    const double noise_lo = std::min(std::max(noise_floor, 1e-300), noise_hi);
    box.lo[m - 1] = std::log(noise_lo);
    box.hi[m - 1] = std::log(noise_hi);
  }

  std::vector<Vector> starts;
  {
    Vector first(m);
    first[0] = 0.0;
    for (Eigen::Index i = 1; i < m; ++i) first[i] = std::log(0.3);
    if (!config.fixed_noise) first[m - 1] = std::log(std::max(1e-6, std::exp(box.lo[m - 1])));
    starts.push_back(first);
    Rng rng = derive_rng(config.seed, 0x67707374);
    const int count = std::max(config.starts, 5);
    while (static_cast<int>(starts.size()) < count) {
      Vector s(m);
      s[0] = log_uniform(rng, 0.2, 5.0);
      for (Eigen::Index i = 1; i < m; ++i) s[i] = log_uniform(rng, 0.05, 3.0);
      if (!config.fixed_noise) {
        s[m - 1] = log_uniform(rng, std::exp(box.lo[m - 1]), std::max(1e-2, std::exp(box.lo[m - 1])));
      }
      starts.push_back(s.cwiseMax(box.lo).cwiseMin(box.hi));
    }
  }

  ceres::GradientProblemSolver::Options options;
  options.max_num_iterations = config.max_iterations;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  options.function_tolerance = 1e-9;
  options.gradient_tolerance = 1e-7;
  options.parameter_tolerance = 1e-9;

  FitDiagnostics diag;
  double best_value = -std::numeric_limits<double>::infinity();
  Vector best_params;
  ceres::GradientProblem problem(new NegativeLogLikelihood(working, standardized, packing, box));
  for (const Vector& start : starts) {
    const auto [k0, n0] = packing.unpack(start);
    auto start_terms = evaluate_likelihood(working, standardized, k0, n0, false);
    const double start_value =
        start_terms ? start_terms->value : -std::numeric_limits<double>::infinity();
    diag.start_log_likelihoods.push_back(start_value);
    if (start_value > best_value) {
      best_value = start_value;
      best_params = start;
    }
    Vector u = box.to_free(start);
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(options, problem, u.data(), &summary);
    const Vector candidate = box.to_log(u);
    const auto [k1, n1] = packing.unpack(candidate);
    auto end_terms = evaluate_likelihood(working, standardized, k1, n1, false);
    if (end_terms && end_terms->value > best_value) {
      best_value = end_terms->value;
      best_params = candidate;
    }
  }
  if (best_params.size() == 0) throw FactorizationError("fit: no start point could be factorized");
  auto [kernel, noise] = packing.unpack(best_params);
  return finish(std::move(kernel), noise, std::move(diag));
}

}  // namespace mobo
