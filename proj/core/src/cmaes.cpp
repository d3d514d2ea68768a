#include "mobo/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mobo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEigenFloor = 1e-14;
constexpr int kMaxResamples = 10;

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

}  // namespace

CmaesResult cmaes_minimize(const std::function<double(const Vector&)>& objective,
                           const Bounds& bounds, const CmaesConfig& config) {
  const Eigen::Index d = bounds.dimension();
  if (d == 0) throw std::invalid_argument("cmaes: empty search space");
  const Vector width = bounds.width();
  const double mean_width = width.mean();

  const int lambda = config.population_size > 0
                         ? config.population_size
                         : 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(d))));
  if (lambda < 4) throw std::invalid_argument("cmaes: population size must be at least 4");
  if (config.max_evals < lambda) throw std::invalid_argument("cmaes: max_evals below population size");
  if (config.sigma0 < 0.0 || config.population_size < 0) {
    throw std::invalid_argument("cmaes: sigma0 and population size must be non-negative");
  }
  const double sigma0 = config.sigma0 > 0.0 ? config.sigma0 : 0.3 * mean_width;
  if (!(sigma0 > 0.0)) throw std::invalid_argument("cmaes: sigma0 must be positive");

  const int mu = lambda / 2;
  Vector weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();
  const double n = static_cast<double>(d);

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  const double c_mu =
      std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
  const double chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  Rng rng = derive_rng(config.seed, 0x636d6165);
  Vector mean = config.x0 ? bounds.clamp(*config.x0) : bounds.sample(rng);
  if (mean.size() != d) throw std::invalid_argument("cmaes: x0 dimension mismatch");
  double sigma = sigma0;
  Matrix cov = Matrix::Identity(d, d);
  Matrix basis = Matrix::Identity(d, d);
  Vector scales = Vector::Ones(d);  // sqrt of eigenvalues
  Vector p_sigma = Vector::Zero(d);
  Vector p_c = Vector::Zero(d);

  CmaesResult result;
  result.f_best = kInf;
  result.x_best = mean;
  result.min_covariance_eigenvalue = 1.0;
  const int window = 10 + static_cast<int>(std::ceil(30.0 * n / lambda));
  std::deque<double> recent;  // generation-best values

  std::vector<Vector> steps(static_cast<std::size_t>(lambda));
  std::vector<Vector> evaluated(static_cast<std::size_t>(lambda));
  std::vector<double> raw(static_cast<std::size_t>(lambda));
  std::vector<double> violation(static_cast<std::size_t>(lambda));
  std::vector<double> fitness(static_cast<std::size_t>(lambda));
  std::vector<int> order(static_cast<std::size_t>(lambda));

  while (result.evaluations + lambda <= config.max_evals) {
    for (int k = 0; k < lambda; ++k) {
      Vector y(d);
      Vector x(d);
      for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
        Vector z(d);
        for (Eigen::Index i = 0; i < d; ++i) z[i] = standard_normal(rng);
        y = basis * scales.cwiseProduct(z);
        x = mean + sigma * y;
        if (bounds.contains(x)) break;
      }
      const Vector inside = bounds.clamp(x);
      steps[k] = y;
      evaluated[k] = inside;
      violation[k] = ((x - inside).array() / width.array().max(1e-300)).matrix().squaredNorm();
      raw[k] = finite_or_inf(objective(inside));
      ++result.evaluations;
      if (raw[k] < result.f_best) {
        result.f_best = raw[k];
        result.x_best = inside;
      }
    }

    // Penalty weight tracks the fitness spread so ranking is unchanged when the
    // objective is multiplied by a positive constant.
    double lo = kInf;
    double hi = -kInf;
    for (double v : raw) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    double penalty_weight = 1.0;
    if (std::isfinite(lo)) {
      if (hi > lo) {
        penalty_weight = hi - lo;
      } else if (lo != 0.0) {
        penalty_weight = std::abs(lo);
      }
    }
    for (int k = 0; k < lambda; ++k) fitness[k] = raw[k] + penalty_weight * violation[k];

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fitness[a] < fitness[b]; });

    Vector step_mean = Vector::Zero(d);
    for (int i = 0; i < mu; ++i) step_mean += weights[i] * steps[order[i]];
    mean = mean + sigma * step_mean;

    // C^{-1/2} step_mean = B D^{-1} B^T step_mean
    const Vector whitened = basis * (basis.transpose() * step_mean).cwiseQuotient(scales);
    p_sigma = (1.0 - c_sigma) * p_sigma + std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * whitened;
    const double gen = static_cast<double>(result.generations + 1);
    const double ps_norm = p_sigma.norm();
    const bool h_sigma =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * gen)) < (1.4 + 2.0 / (n + 1.0)) * chi_n;
    p_c = (1.0 - c_c) * p_c + (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * step_mean;

    Matrix rank_mu = Matrix::Zero(d, d);
    for (int i = 0; i < mu; ++i) rank_mu += weights[i] * steps[order[i]] * steps[order[i]].transpose();
    const double correction = h_sigma ? 0.0 : c_c * (2.0 - c_c);
    cov = (1.0 - c_1 - c_mu) * cov + c_1 * (p_c * p_c.transpose() + correction * cov) + c_mu * rank_mu;
    cov = 0.5 * (cov + cov.transpose());

    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));
    sigma = std::min(sigma, 1e3 * std::max(mean_width, 1e-300));

    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    Vector values = eig.eigenvalues().cwiseMax(kEigenFloor);
    basis = eig.eigenvectors();
    scales = values.cwiseSqrt();
    cov = basis * values.asDiagonal() * basis.transpose();
    cov = 0.5 * (cov + cov.transpose());
    result.min_covariance_eigenvalue = std::min(result.min_covariance_eigenvalue, values.minCoeff());

    ++result.generations;
    result.best_history.push_back(result.f_best);

    const double gen_best = raw[order[0]];
    recent.push_back(gen_best);
    if (static_cast<int>(recent.size()) > window) recent.pop_front();
    if (static_cast<int>(recent.size()) == window && std::isfinite(result.f_best)) {
      double r_lo = kInf;
      double r_hi = -kInf;
      for (double v : recent) {
        r_lo = std::min(r_lo, v);
        r_hi = std::max(r_hi, v);
      }
      for (double v : raw) {
        r_lo = std::min(r_lo, v);
        r_hi = std::max(r_hi, v);
      }
      const double spread = r_hi - r_lo;
      if (std::isfinite(spread) && spread <= config.tol_fun * std::abs(result.f_best)) {
        result.stop_reason = "tol_fun";
        break;
      }
    }
    if (sigma * scales.maxCoeff() < config.tol_x * mean_width) {
      result.stop_reason = "tol_x";
      break;
    }
  }
  if (result.stop_reason.empty()) result.stop_reason = "max_evals";
  if (!std::isfinite(result.f_best)) result.f_best = finite_or_inf(objective(result.x_best));
  return result;
}

}  // namespace mobo
