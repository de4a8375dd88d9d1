#include "ramcmc/target.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace ramcmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double whitened_squared_norm(const Eigen::MatrixXd& chol, const Eigen::VectorXd& centered) {
  return chol.triangularView<Eigen::Lower>().solve(centered).squaredNorm();
}

}  // namespace

TargetModel TargetModel::gaussian(Eigen::VectorXd mean, SymmetricMatrix covariance) {
  TargetModel t;
  t.kind_ = Kind::Gaussian;
  t.dim_ = mean.size();
  t.shape_chol_ = cholesky_factorize(covariance).matrix();
  t.location_ = std::move(mean);
  t.metadata_ = Metadata{t.location_, std::move(covariance), t.shape_chol_};
  return t;
}

TargetModel TargetModel::elliptical_student(Eigen::VectorXd location,
                                            SymmetricMatrix pseudo_covariance,
                                            double degrees_of_freedom) {
  if (!(degrees_of_freedom > 0.0))
    throw std::invalid_argument("elliptical_student: degrees of freedom must be positive");
  TargetModel t;
  t.kind_ = Kind::EllipticalStudent;
  t.dim_ = location.size();
  t.dof_ = degrees_of_freedom;
  t.shape_chol_ = cholesky_factorize(pseudo_covariance).matrix();
  t.location_ = std::move(location);
  t.metadata_ = Metadata{t.location_, std::move(pseudo_covariance), t.shape_chol_};
  return t;
}

TargetModel TargetModel::gaussian_mixture(std::vector<double> weights,
                                          std::vector<Eigen::VectorXd> means,
                                          SymmetricMatrix shared_covariance) {
  if (weights.empty() || weights.size() != means.size())
    throw std::invalid_argument("gaussian_mixture: weights and means disagree");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("gaussian_mixture: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("gaussian_mixture: weights must sum to one");

  TargetModel t;
  t.kind_ = Kind::GaussianMixture;
  t.dim_ = means.front().size();
  for (const auto& m : means)
    if (m.size() != t.dim_) throw DimensionMismatch("gaussian_mixture: mean dimension mismatch");
  t.shape_chol_ = cholesky_factorize(shared_covariance).matrix();
  t.weights_ = std::move(weights);
  t.means_ = std::move(means);

  // Metadata carries the moments of the mixture itself.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(t.dim_);
  for (std::size_t k = 0; k < t.weights_.size(); ++k) mean += t.weights_[k] * t.means_[k];
  SymmetricMatrix cov = shared_covariance;
  for (std::size_t k = 0; k < t.weights_.size(); ++k) {
    const Eigen::VectorXd d = t.means_[k] - mean;
    cov += t.weights_[k] * (d * d.transpose());
  }
  symmetrize_from_lower(cov);
  t.metadata_ = Metadata{std::move(mean), cov, cholesky_factorize(cov).matrix()};
  return t;
}

TargetModel TargetModel::product_1d(Eigen::Index dim, std::function<double(double)> log_density_1d,
                                    std::function<double(RngStream&)> sampler_1d) {
  if (dim < 1) throw std::invalid_argument("product_1d: dimension must be positive");
  if (!log_density_1d) throw std::invalid_argument("product_1d: missing log density");
  TargetModel t;
  t.kind_ = Kind::Product1D;
  t.dim_ = dim;
  t.log_density_1d_ = std::move(log_density_1d);
  t.sampler_1d_ = std::move(sampler_1d);
  return t;
}

TargetModel TargetModel::product_normal(Eigen::Index dim) {
  TargetModel t = product_1d(
      dim, [](double x) { return -0.5 * x * x; },
      [](RngStream& rng) { return rng.normal(); });
  t.metadata_ = Metadata{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Identity(dim, dim),
                         Eigen::MatrixXd::Identity(dim, dim)};
  return t;
}

TargetModel TargetModel::product_cauchy(Eigen::Index dim) {
  return product_1d(
      dim, [](double x) { return -std::log1p(x * x); },
      [](RngStream& rng) { return rng.cauchy(); });
}

TargetModel TargetModel::custom(Eigen::Index dim,
                                std::function<double(const Eigen::VectorXd&)> log_density) {
  if (dim < 1) throw std::invalid_argument("custom: dimension must be positive");
  if (!log_density) throw std::invalid_argument("custom: missing log density");
  TargetModel t;
  t.kind_ = Kind::Custom;
  t.dim_ = dim;
  t.log_density_fn_ = std::move(log_density);
  return t;
}

double TargetModel::mixture_log_density(const Eigen::VectorXd& x) const {
  double best = kNegInf;
  std::vector<double> exponents(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    exponents[k] = std::log(weights_[k]) - 0.5 * whitened_squared_norm(shape_chol_, x - means_[k]);
    best = std::max(best, exponents[k]);
  }
  double acc = 0.0;
  for (double e : exponents) acc += std::exp(e - best);
  return best + std::log(acc);
}

double TargetModel::log_density(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw DimensionMismatch("log_density: point dimension mismatch");
  switch (kind_) {
    case Kind::Gaussian:
      return -0.5 * whitened_squared_norm(shape_chol_, x - location_);
    case Kind::EllipticalStudent:
      return -0.5 * (static_cast<double>(dim_) + dof_) *
             std::log1p(whitened_squared_norm(shape_chol_, x - location_));
    case Kind::GaussianMixture:
      return mixture_log_density(x);
    case Kind::Product1D: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < dim_; ++i) acc += log_density_1d_(x[i]);
      return acc;
    }
    case Kind::Custom:
      if (!log_density_fn_) throw InvalidState("log_density: empty target model");
      return log_density_fn_(x);
  }
  return kNegInf;
}

bool TargetModel::has_exact_sampler() const {
  switch (kind_) {
    case Kind::Gaussian:
    case Kind::EllipticalStudent:
    case Kind::GaussianMixture:
      return true;
    case Kind::Product1D:
      return static_cast<bool>(sampler_1d_);
    case Kind::Custom:
      return false;
  }
  return false;
}

Eigen::VectorXd TargetModel::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::Gaussian:
      return location_ + shape_chol_.triangularView<Eigen::Lower>() * rng.normal_vector(dim_);
    case Kind::EllipticalStudent: {
      const Eigen::VectorXd g = rng.normal_vector(dim_);
      const double scale = std::sqrt(rng.chi_squared(dof_) / dof_);
      return location_ + shape_chol_.triangularView<Eigen::Lower>() * (g / scale);
    }
    case Kind::GaussianMixture: {
      const double u = rng.uniform01();
      double cum = 0.0;
      std::size_t pick = weights_.size() - 1;
      for (std::size_t k = 0; k < weights_.size(); ++k) {
        cum += weights_[k];
        if (u < cum) {
          pick = k;
          break;
        }
      }
      return means_[pick] + shape_chol_.triangularView<Eigen::Lower>() * rng.normal_vector(dim_);
    }
    case Kind::Product1D:
      if (sampler_1d_) {
        Eigen::VectorXd x(dim_);
        for (Eigen::Index i = 0; i < dim_; ++i) x[i] = sampler_1d_(rng);
        return x;
      }
      break;
    case Kind::Custom:
      break;
  }
  throw NoExactSampler("TargetModel::sample: no exact sampler for this target");
}

const Eigen::VectorXd& TargetModel::true_mean() const {
  if (!metadata_) throw MissingMetadata("TargetModel: no (mean, shape) metadata");
  return metadata_->mean;
}

const SymmetricMatrix& TargetModel::true_shape() const {
  if (!metadata_) throw MissingMetadata("TargetModel: no (mean, shape) metadata");
  return metadata_->shape;
}

double TargetModel::hpd_quadratic(const Eigen::VectorXd& x) const {
  if (!metadata_) throw MissingMetadata("hpd_quadratic: target has no (mean, shape) metadata");
  if (x.size() != dim_) throw DimensionMismatch("hpd_quadratic: point dimension mismatch");
  return whitened_squared_norm(metadata_->shape_chol, x - metadata_->mean);
}

double acceptance_ratio(const TargetModel& target, const Eigen::VectorXd& proposal,
                        const Eigen::VectorXd& current) {
  const double log_current = target.log_density(current);
  if (log_current == kNegInf)
    throw InvalidState("acceptance_ratio: current point has zero density");
  const double log_proposal = target.log_density(proposal);
  return std::min(1.0, std::exp(log_proposal - log_current));
}

double log_density(const TargetModel& target, const Eigen::VectorXd& x) {
  return target.log_density(x);
}

double hpd_quadratic(const TargetModel& target, const Eigen::VectorXd& x) {
  return target.hpd_quadratic(x);
}

SymmetricMatrix random_covariance(Eigen::Index dim, RngStream& rng) {
  if (dim < 1) throw std::invalid_argument("random_covariance: dimension must be positive");
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = rng.normal();
  SymmetricMatrix cov = m * m.transpose();
  symmetrize_from_lower(cov);
  return cov;
}

Eigen::MatrixXd random_rotation(Eigen::Index dim, RngStream& rng) {
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = rng.normal();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

}  // namespace ramcmc
