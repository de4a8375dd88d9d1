#pragma once

#include <Eigen/Dense>

#include "ramcmc/sampler.hpp"

namespace test_util {

struct CouplingResult {
  double max_point_error = 0.0;
  double max_shape_error = 0.0;
};

/// Runs a RAM chain on `target` and the coupled RAM chain on the affine image
/// of the target (x -> A x + b), driving both with the same uniforms and
/// increments rotated by the QR construction. Returns the worst pathwise
/// mismatch of A X_n + b against the image chain and the relative Frobenius
/// mismatch of the congruent shape products.
inline CouplingResult run_affine_coupling(const ramcmc::TargetModel& target,
                                          const Eigen::VectorXd& x1,
                                          const ramcmc::LowerTriangularFactor& s1,
                                          const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                          long steps, std::uint64_t seed,
                                          std::uint64_t stream = 0) {
  using namespace ramcmc;
  const Eigen::Index d = target.dim();
  const Eigen::MatrixXd a_inverse = a.inverse();

  SamplerConfig base_config;
  base_config.algorithm = Algorithm::Ram;
  base_config.initial_point = x1;
  base_config.initial_factor = s1;
  base_config.schedule = {2.0 / 3.0, true};
  base_config.iterations = steps;

  const TargetModel image = TargetModel::custom(d, [&target, a_inverse, b](const Eigen::VectorXd& x) {
    return target.log_density(a_inverse * (x - b));
  });
  SamplerConfig image_config = base_config;
  image_config.initial_point = a * x1 + b;

  SymmetricMatrix s1_image = a * s1.product() * a.transpose();
  symmetrize_from_lower(s1_image);
  image_config.initial_factor = cholesky_factorize(s1_image);

  ChainState base_state = make_initial_state(base_config, target);
  ChainState image_state = make_initial_state(image_config, image);

  RngStream rng(seed, stream);
  CouplingResult result;
  for (long k = 1; k <= steps; ++k) {
    const Eigen::VectorXd u = sample_increment(base_config.proposal, d, rng);
    const double w = rng.uniform01();

    // Rotate the increment through the QR of (A S_{n-1})^T.
    const Eigen::MatrixXd mapped = (a * base_state.factor.matrix()).transpose();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(mapped);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i)
      if (r(i, i) < 0.0) q.col(i) = -q.col(i);
    const Eigen::VectorXd u_image = q.transpose() * u;

    chain_step_with(base_state, base_config, target, u, w);
    chain_step_with(image_state, image_config, image, u_image, w);

    result.max_point_error =
        std::max(result.max_point_error, (a * base_state.x + b - image_state.x).norm());
    const Eigen::MatrixXd mapped_product =
        a * base_state.factor.product() * a.transpose();
    const Eigen::MatrixXd image_product = image_state.factor.product();
    result.max_shape_error =
        std::max(result.max_shape_error,
                 (mapped_product - image_product).norm() / image_product.norm());
  }
  return result;
}

}  // namespace test_util
