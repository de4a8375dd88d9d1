#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ramcmc/linalg.hpp"
#include "ramcmc/rng.hpp"
#include "ramcmc/target.hpp"

namespace test_util {

/// Random SPD matrix with a mild conditioning floor so factor comparisons
/// stay meaningful in double precision.
inline ramcmc::SymmetricMatrix random_spd(Eigen::Index dim, ramcmc::RngStream& rng) {
  ramcmc::SymmetricMatrix m = ramcmc::random_covariance(dim, rng);
  const double floor = 0.05 * m.trace() / static_cast<double>(dim);
  m += floor * Eigen::MatrixXd::Identity(dim, dim);
  ramcmc::symmetrize_from_lower(m);
  return m;
}

inline ramcmc::LowerTriangularFactor random_factor(Eigen::Index dim, ramcmc::RngStream& rng) {
  return ramcmc::cholesky_factorize(random_spd(dim, rng));
}

inline double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

/// Kolmogorov-Smirnov distance between a sample and a CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double distance = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double c = cdf(sample[i]);
    distance = std::max(distance, std::abs(c - static_cast<double>(i) / n));
    distance = std::max(distance, std::abs(c - static_cast<double>(i + 1) / n));
  }
  return distance;
}

}  // namespace test_util
