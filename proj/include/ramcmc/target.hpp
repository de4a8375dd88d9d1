#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ramcmc/linalg.hpp"
#include "ramcmc/rng.hpp"

namespace ramcmc {

/// Unnormalized target density with optional known (mean, shape) metadata for
/// diagnostics and, for the built-in families, an exact i.i.d. sampler.
///
/// All density work is in log space; the additive constant is chosen so that
/// simple families evaluate to 0 at their mode. Immutable after construction
/// and safe for concurrent reads.
class TargetModel {
 public:
  enum class Kind { Gaussian, EllipticalStudent, GaussianMixture, Product1D, Custom };

  /// Empty placeholder model (dimension zero); assign a real one before use.
  TargetModel() = default;

  static TargetModel gaussian(Eigen::VectorXd mean, SymmetricMatrix covariance);
  static TargetModel elliptical_student(Eigen::VectorXd location, SymmetricMatrix pseudo_covariance,
                                        double degrees_of_freedom);
  static TargetModel gaussian_mixture(std::vector<double> weights,
                                      std::vector<Eigen::VectorXd> means,
                                      SymmetricMatrix shared_covariance);
  /// Product of one identical 1-d log density per coordinate. No exact
  /// sampler unless one is supplied.
  static TargetModel product_1d(Eigen::Index dim, std::function<double(double)> log_density_1d,
                                std::function<double(RngStream&)> sampler_1d = {});
  static TargetModel product_normal(Eigen::Index dim);
  static TargetModel product_cauchy(Eigen::Index dim);
  static TargetModel custom(Eigen::Index dim, std::function<double(const Eigen::VectorXd&)> log_density);

  Eigen::Index dim() const { return dim_; }
  Kind kind() const { return kind_; }

  /// log pi(x) up to an additive constant; -inf only outside the support.
  double log_density(const Eigen::VectorXd& x) const;

  bool has_exact_sampler() const;
  /// Exact i.i.d. draw from pi; throws NoExactSampler when unavailable.
  Eigen::VectorXd sample(RngStream& rng) const;

  bool has_metadata() const { return metadata_.has_value(); }
  const Eigen::VectorXd& true_mean() const;
  const SymmetricMatrix& true_shape() const;

  /// (x - mean)^T Shape^{-1} (x - mean) against the metadata pair.
  double hpd_quadratic(const Eigen::VectorXd& x) const;

 private:
  double mixture_log_density(const Eigen::VectorXd& x) const;

  Kind kind_ = Kind::Custom;
  Eigen::Index dim_ = 0;

  // Gaussian / Student parameters (location + shape Cholesky factor).
  Eigen::VectorXd location_;
  Eigen::MatrixXd shape_chol_;
  double dof_ = 0.0;

  // Mixture parameters (shared covariance Cholesky factor).
  std::vector<double> weights_;
  std::vector<Eigen::VectorXd> means_;

  std::function<double(double)> log_density_1d_;
  std::function<double(RngStream&)> sampler_1d_;
  std::function<double(const Eigen::VectorXd&)> log_density_fn_;

  struct Metadata {
    Eigen::VectorXd mean;
    SymmetricMatrix shape;
    Eigen::MatrixXd shape_chol;
  };
  std::optional<Metadata> metadata_;
};

/// min{1, pi(proposal) / pi(current)}; throws InvalidState when pi(current) = 0.
double acceptance_ratio(const TargetModel& target, const Eigen::VectorXd& proposal,
                        const Eigen::VectorXd& current);

/// Free-function forms of the TargetModel queries.
double log_density(const TargetModel& target, const Eigen::VectorXd& x);
double hpd_quadratic(const TargetModel& target, const Eigen::VectorXd& x);

/// M M^T for M with i.i.d. standard normal entries; exactly symmetric and
/// deterministic in the stream state.
SymmetricMatrix random_covariance(Eigen::Index dim, RngStream& rng);

/// Haar-ish random orthogonal matrix (QR of a Gaussian matrix, signs fixed).
Eigen::MatrixXd random_rotation(Eigen::Index dim, RngStream& rng);

}  // namespace ramcmc
