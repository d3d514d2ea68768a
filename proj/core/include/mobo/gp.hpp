#pragma once

#include "mobo/types.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace mobo {

enum class KernelKind { Matern12, Matern32, Matern52, SqExp };

std::string_view to_string(KernelKind kind);
std::optional<KernelKind> parse_kernel_kind(std::string_view name);

/// Stationary kernel: amplitude^2 * profile(r), where r is the
/// lengthscale-weighted Euclidean distance between the two inputs.
struct KernelSpec {
  KernelKind kind = KernelKind::Matern52;
  double amplitude = 1.0;
  Vector lengthscales;

  /// Throws std::invalid_argument on a non-positive amplitude or lengthscale.
  void validate() const;
};

/// Unit-amplitude kernel profile k(r) / amplitude^2.
double kernel_profile(KernelKind kind, double r);

/// k(x, x2). Throws std::invalid_argument when the dimensions disagree.
double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& x2);

/// Covariance matrix K_ij = k(X_i, X_j) over the rows of `inputs`.
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& inputs);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// K + noise*I could not be factorized even after the jitter ladder.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitConfig {
  int starts = 5;                      ///< multi-start count, at least 5 is honored
  int max_iterations = 60;             ///< per local search
  double noise_floor = 1e-10;          ///< lower bound for the learned noise variance
  std::optional<double> fixed_noise;   ///< pins the noise variance instead of learning it
  bool isotropic = false;              ///< one shared lengthscale instead of one per dimension
  std::uint64_t seed = 0;              ///< random starts after the first are drawn from this
};

/// Multi-start bookkeeping kept on a fitted model.
struct FitDiagnostics {
  std::vector<double> start_log_likelihoods;
  double log_likelihood = 0.0;
  bool degenerate = false;  ///< targets were constant; optimization skipped
};

/// A conditioned Gaussian process. Immutable once built.
///
/// Inputs and targets are stored in the model's working coordinates: `fit`
/// maps inputs affinely onto [0,1]^d and standardizes targets, `condition`
/// uses the identity map. Hyperparameters, the Cholesky factor and
/// `alpha` all live in working coordinates; `predict` accepts raw inputs
/// and returns a raw-scale posterior.
class GpModel {
 public:
  /// Conditions a GP on raw data with explicitly given hyperparameters.
  static GpModel condition(KernelSpec kernel, double noise_variance, double prior_mean,
                           Matrix inputs, Vector targets);

  Posterior predict(const Vector& x) const;

  /// Log marginal likelihood of the working-coordinate targets.
  double log_marginal_likelihood() const;

  /// Gradient of log_marginal_likelihood with respect to
  /// [log amplitude, log lengthscale_1..d, log noise_variance].
  Vector log_likelihood_gradient() const;

  const KernelSpec& kernel() const { return kernel_; }
  double noise_variance() const { return noise_; }
  double prior_mean() const { return prior_mean_; }
  double jitter() const { return jitter_; }
  const Matrix& train_inputs() const { return inputs_; }
  const Vector& train_targets() const { return targets_; }
  const Matrix& chol_factor() const { return chol_; }
  const Vector& alpha() const { return alpha_; }
  Eigen::Index size() const { return inputs_.rows(); }
  Eigen::Index dimension() const { return inputs_.cols(); }

  /// Prior standard deviation of f in raw target units.
  double raw_amplitude() const { return kernel_.amplitude * target_scale_; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  friend GpModel fit(const Matrix&, const Vector&, KernelKind, const FitConfig&);

  GpModel() = default;
  void factorize();
  Vector to_working(const Vector& x) const;

  KernelSpec kernel_;
  double noise_ = 0.0;
  double prior_mean_ = 0.0;
  double jitter_ = 0.0;
  Matrix inputs_;
  Vector targets_;
  Matrix chol_;
  Vector alpha_;

  Vector input_offset_;
  Vector input_scale_;
  double target_offset_ = 0.0;
  double target_scale_ = 1.0;
  FitDiagnostics diagnostics_;
};

/// Maximum-likelihood fit (multi-start, bounded, log-space).
/// Throws std::invalid_argument on empty or non-finite data.
GpModel fit(const Matrix& inputs, const Vector& targets, KernelKind kind,
            const FitConfig& config = {});

inline Posterior predict(const GpModel& model, const Vector& x) { return model.predict(x); }
inline double log_marginal_likelihood(const GpModel& model) {
  return model.log_marginal_likelihood();
}

/// Stack a list of points into an n x d matrix.
Matrix stack_rows(const PointSet& points);

}  // namespace mobo
