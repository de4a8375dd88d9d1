#include <doctest.h>

#include <cmath>

#include "ramcmc/analysis.hpp"
#include "ramcmc/sampler.hpp"
#include "ramcmc/stats.hpp"
#include "support/test_util.hpp"

using namespace ramcmc;

namespace {

TargetModel unit_gaussian(Eigen::Index d) {
  return TargetModel::gaussian(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d));
}

TargetModel student2d_paper() {
  Eigen::VectorXd mu(2);
  mu << 1.0, 2.0;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 0.2, 0.1, 0.1, 0.8;
  return TargetModel::elliptical_student(mu, sigma, 1.0);
}

}  // namespace

TEST_SUITE_BEGIN("analysis");

TEST_CASE("incomplete gamma matches the exponential closed form") {
  for (double x : {0.1, 0.7, 2.0, 9.0})
    CHECK(regularized_gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
}

TEST_CASE("chi-squared quantiles hit known values") {
  CHECK(chi_squared_quantile(0.9, 2.0) == doctest::Approx(-2.0 * std::log(0.1)).epsilon(1e-9));
  CHECK(chi_squared_quantile(0.5, 1.0) == doctest::Approx(0.454936423119572).epsilon(1e-8));
  for (double p : {0.1, 0.25, 0.5, 0.75, 0.9})
    CHECK(chi_squared_cdf(chi_squared_quantile(p, 8.0), 8.0) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("hpd thresholds: gaussian via chi-squared, bivariate student closed form") {
  const auto gauss = unit_gaussian(3);
  CHECK(hpd_threshold(gauss, 0.9) == doctest::Approx(chi_squared_quantile(0.9, 3.0)));
  CHECK(hpd_threshold(student2d_paper(), 0.9) == doctest::Approx(99.0).epsilon(1e-12));
  CHECK_THROWS_AS(hpd_threshold(TargetModel::product_cauchy(2), 0.9), MissingMetadata);
}

TEST_CASE("lyapunov value closed forms") {
  RngStream rng(201);
  const SymmetricMatrix r_star = test_util::random_spd(3, rng);
  CHECK(lyapunov_value(r_star, r_star) == doctest::Approx(0.0).epsilon(1e-12));

  const SymmetricMatrix r = Eigen::Vector2d(2.0, 1.0).asDiagonal();
  CHECK(lyapunov_value(r, Eigen::MatrixXd::Identity(2, 2)) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("lyapunov value is positive away from the fixed point") {
  RngStream rng(203);
  const SymmetricMatrix r_star = test_util::random_spd(3, rng);
  for (int i = 0; i < 100; ++i) {
    const SymmetricMatrix r = test_util::random_spd(3, rng);
    if (test_util::relative_frobenius(r, r_star) < 1e-12) continue;
    CHECK(lyapunov_value(r, r_star) > 0.0);
  }
}

TEST_CASE("lyapunov value is invariant under joint congruence") {
  RngStream rng(205);
  for (int i = 0; i < 50; ++i) {
    const SymmetricMatrix r = test_util::random_spd(3, rng);
    const SymmetricMatrix r_star = test_util::random_spd(3, rng);
    Eigen::MatrixXd a(3, 3);
    for (Eigen::Index p = 0; p < 3; ++p)
      for (Eigen::Index q = 0; q < 3; ++q) a(p, q) = rng.normal();
    SymmetricMatrix ra = a * r * a.transpose();
    SymmetricMatrix rsa = a * r_star * a.transpose();
    symmetrize_from_lower(ra);
    symmetrize_from_lower(rsa);
    CHECK(lyapunov_value(ra, rsa) ==
          doctest::Approx(lyapunov_value(r, r_star)).epsilon(1e-9));
  }
}

TEST_CASE("suboptimality factor closed forms and invariances") {
  RngStream rng(207);
  const SymmetricMatrix sigma = test_util::random_spd(3, rng);
  CHECK(suboptimality_b(SymmetricMatrix(3.7 * sigma), sigma) ==
        doctest::Approx(1.0).epsilon(1e-10));

  // Whitened spectrum {1, 4} means lambda = {1, 2} and b = 10/9.
  const SymmetricMatrix r = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  CHECK(suboptimality_b(r, Eigen::MatrixXd::Identity(2, 2)) ==
        doctest::Approx(10.0 / 9.0).epsilon(1e-10));

  for (int i = 0; i < 50; ++i) {
    const SymmetricMatrix r2 = test_util::random_spd(3, rng);
    const SymmetricMatrix s2 = test_util::random_spd(3, rng);
    Eigen::MatrixXd a(3, 3);
    for (Eigen::Index p = 0; p < 3; ++p)
      for (Eigen::Index q = 0; q < 3; ++q) a(p, q) = rng.normal();
    SymmetricMatrix ra = a * r2 * a.transpose();
    SymmetricMatrix sa = a * s2 * a.transpose();
    symmetrize_from_lower(ra);
    symmetrize_from_lower(sa);
    CHECK(suboptimality_b(ra, sa) == doctest::Approx(suboptimality_b(r2, s2)).epsilon(1e-8));
  }
}

TEST_CASE("suboptimality factor is at least one on random pairs") {
  RngStream rng(209);
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.next_u32() % 6);
    const SymmetricMatrix r = test_util::random_spd(d, rng);
    const SymmetricMatrix sigma = test_util::random_spd(d, rng);
    CHECK(suboptimality_b(r, sigma) >= 1.0 - 1e-12);
  }
}

TEST_CASE("mean field estimate is exactly symmetric with shrinking errors") {
  const auto target = unit_gaussian(2);
  const auto s = LowerTriangularFactor::identity(2);
  RngStream rng(211);
  const auto small = estimate_mean_field(s, target, ProposalSpec::student(1.0), 0.234, 20000, rng);
  CHECK((small.matrix - small.matrix.transpose()).norm() == 0.0);
  const auto large = estimate_mean_field(s, target, ProposalSpec::student(1.0), 0.234, 80000, rng);
  const double ratio = 2.0 * large.standard_errors.norm() / small.standard_errors.norm();
  CHECK(ratio > 0.8);
  CHECK(ratio < 1.2);
}

TEST_CASE("mean field trace centers at the measured acceptance rate") {
  const auto target = unit_gaussian(2);
  const auto s = LowerTriangularFactor::scaled_identity(2, 1.7);
  const auto proposal = ProposalSpec::student(1.0);
  RngStream rng(213);
  const auto pilot = estimate_mean_field(s, target, proposal, 0.0, 100000, rng);
  const double measured = pilot.trace.value / (1.7 * 1.7);  // mean acceptance at this factor
  const auto centered = estimate_mean_field(s, target, proposal, measured, 100000, rng);
  CHECK(std::abs(centered.trace.value) < 3.0 * centered.trace.standard_error);
}

TEST_CASE("mean field is positive definite for tiny factors, negative for huge ones") {
  const auto target = unit_gaussian(2);
  const auto proposal = ProposalSpec::student(1.0);
  RngStream rng(215);
  const auto tiny =
      estimate_mean_field(LowerTriangularFactor::scaled_identity(2, 0.1), target, proposal, 0.234,
                          100000, rng);
  Eigen::VectorXd eig = symmetric_eigenvalues(tiny.matrix);
  CHECK(eig[0] > 3.0 * tiny.standard_errors.norm());

  const auto huge =
      estimate_mean_field(LowerTriangularFactor::scaled_identity(2, 100.0), target, proposal,
                          0.234, 100000, rng);
  eig = symmetric_eigenvalues(huge.matrix);
  CHECK(eig[eig.size() - 1] < -3.0 * huge.standard_errors.norm());
}

TEST_CASE("mean field transforms as A h(S) A^T under affine images") {
  RngStream gen(217);
  const auto target = unit_gaussian(2);
  Eigen::MatrixXd a(2, 2);
  a << 1.2, 0.4, -0.3, 0.9;
  const Eigen::VectorXd b = gen.normal_vector(2);
  const Eigen::MatrixXd a_inverse = a.inverse();
  const auto image = TargetModel::custom(2, [&target, a_inverse, b](const Eigen::VectorXd& x) {
    return target.log_density(a_inverse * (x - b));
  });
  const ExactSampler image_sampler = [&target, a, b](RngStream& rng) {
    return (a * target.sample(rng) + b).eval();
  };

  RngStream rng_base(219, 1);
  RngStream rng_image(219, 1);  // common random numbers
  const auto s = test_util::random_factor(2, gen);
  const auto base =
      estimate_mean_field(s, target, ProposalSpec::student(1.0), 0.234, 50000, rng_base);
  const auto mapped = estimate_mean_field(Eigen::MatrixXd(a * s.matrix()), image,
                                          ProposalSpec::student(1.0), 0.234, 50000, rng_image,
                                          image_sampler);
  const Eigen::MatrixXd lhs = a * base.matrix * a.transpose();
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) {
      const double se = std::hypot(mapped.standard_errors(i, j),
                                   (a.cwiseAbs() * base.standard_errors * a.cwiseAbs().transpose())(i, j));
      CHECK(std::abs(lhs(i, j) - mapped.matrix(i, j)) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("g estimates approach 1 and 0 at the scale extremes") {
  const auto target = unit_gaussian(2);
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(2, 0);
  RngStream rng(221);
  const auto g_small = estimate_g(1e-3, target, ProposalSpec::student(1.0), e1, 100000, rng);
  CHECK(g_small.value >= 0.95);
  const auto g_large = estimate_g(1e3, target, ProposalSpec::student(1.0), e1, 100000, rng);
  CHECK(g_large.value <= 0.05);
  CHECK(g_small.value <= 1.0);
  CHECK(g_large.value >= 0.0);
}

TEST_CASE("g is nonincreasing across a scale grid for the paper student target") {
  const auto target = student2d_paper();
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(2, 0);
  RngStream rng(223);
  std::vector<MonteCarloScalar> values;
  for (double theta : {0.25, 0.5, 1.0, 2.0, 4.0})
    values.push_back(estimate_g(theta, target, ProposalSpec::student(1.0), e1, 50000, rng));
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double se = std::hypot(values[i].standard_error, values[i + 1].standard_error);
    CHECK(values[i + 1].value - values[i].value <= 3.0 * se);
  }
}

TEST_CASE("custom targets without samplers are rejected") {
  const auto custom = TargetModel::custom(2, [](const Eigen::VectorXd&) { return 0.0; });
  RngStream rng(225);
  CHECK_THROWS_AS(
      estimate_g(1.0, custom, ProposalSpec::gaussian(), Eigen::VectorXd::Unit(2, 0), 100, rng),
      NoExactSampler);
}

TEST_CASE("scale fixed point lands in the classic neighborhood for 1-d gaussian") {
  const auto target = unit_gaussian(1);
  const auto proposal = ProposalSpec::gaussian();
  RngStream rng(227);
  const double theta_star = find_scale_fixed_point(target, proposal, 0.44, 0.05, rng, 50000);
  CHECK(theta_star > 1.5);
  CHECK(theta_star < 4.0);

  // Brute-force oracle: locate the 0.44 crossing on a dense g grid.
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(1, 0);
  double crossing = 0.0;
  double previous = 1.0;
  for (double theta = 0.25; theta < 8.0; theta += 0.25) {
    const auto g = estimate_g(theta, target, proposal, e1, 50000, rng);
    if (previous >= 0.44 && g.value < 0.44) crossing = theta - 0.125;
    previous = g.value;
  }
  CHECK(std::abs(theta_star - crossing) < 0.5);
}

TEST_CASE("scale fixed point moves left as the target rate grows") {
  const auto target = unit_gaussian(2);
  const auto proposal = ProposalSpec::student(1.0);
  RngStream rng(229);
  const double loose = find_scale_fixed_point(target, proposal, 0.1, 0.05, rng, 30000);
  const double tight = find_scale_fixed_point(target, proposal, 0.5, 0.05, rng, 30000);
  CHECK(loose > tight);
}

TEST_CASE("scale fixed point exists for the product cauchy target") {
  const auto target = TargetModel::product_cauchy(2);
  RngStream rng(231);
  const double theta_star =
      find_scale_fixed_point(target, ProposalSpec::student(1.0), 0.234, 0.1, rng, 30000);
  CHECK(theta_star > 0.0);
  CHECK(std::isfinite(theta_star));
}

TEST_CASE("descent inner product vanishes exactly at the fixed shape") {
  RngStream rng(233);
  const auto target = unit_gaussian(2);
  const SymmetricMatrix r_star = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  const auto s = cholesky_factorize(r_star);
  const auto descent = descent_inner_product(s, r_star, target, ProposalSpec::student(1.0), 0.234,
                                             1000, rng);
  CHECK(descent.value == 0.0);
  CHECK(descent.standard_error == 0.0);
}

TEST_CASE("descent inner product is strongly negative for anisotropic factors") {
  const auto target = unit_gaussian(2);
  const auto proposal = ProposalSpec::student(1.0);
  RngStream rng(235);
  const double theta_star = find_scale_fixed_point(target, proposal, 0.234, 0.05, rng, 50000);
  const SymmetricMatrix r_star =
      theta_star * theta_star * Eigen::MatrixXd::Identity(2, 2);
  const auto skewed = LowerTriangularFactor(
      Eigen::Vector2d(10.0 * theta_star, theta_star / 10.0).asDiagonal());
  const auto descent =
      descent_inner_product(skewed, r_star, target, proposal, 0.234, 100000, rng);
  CHECK(descent.value < -5.0 * descent.standard_error);

  for (int i = 0; i < 5; ++i) {
    const auto random_shape = test_util::random_factor(2, rng);
    const auto d =
        descent_inner_product(random_shape, r_star, target, proposal, 0.234, 50000, rng);
    CHECK(d.value <= 3.0 * d.standard_error);
  }
}

TEST_CASE("the mean field vanishes at the shape RAM converged to") {
  // A finite run keeps an O(sqrt(eta_n)) wander around the stable shape, so
  // the consistency check uses the tail-averaged shape and a Monte Carlo
  // precision matched to that residual scale.
  const auto target = student2d_paper();
  const auto proposal = ProposalSpec::student(1.0);
  SamplerConfig config;
  config.algorithm = Algorithm::Ram;
  config.initial_point = target.true_mean();
  config.initial_factor = LowerTriangularFactor::identity(2);
  config.schedule.dimension_scaled = true;
  config.iterations = 1;
  config.proposal = proposal;

  ChainState state = make_initial_state(config, target);
  RngStream chain_rng(239, 1);
  Eigen::MatrixXd averaged = Eigen::MatrixXd::Zero(2, 2);
  long count = 0;
  for (long k = 1; k <= 1000000; ++k) {
    chain_step(state, config, target, chain_rng);
    if (k > 500000 && k % 100 == 0) {
      averaged += state.factor.product();
      ++count;
    }
  }
  averaged /= static_cast<double>(count);
  symmetrize_from_lower(averaged);

  RngStream mc_rng(239, 2);
  const auto field =
      estimate_mean_field(cholesky_factorize(averaged), target, proposal, 0.234, 10000, mc_rng);
  CHECK(std::abs(field.trace.value) <= 3.0 * field.trace.standard_error);
  CHECK(std::abs(field.trace.value) < 0.01 * averaged.trace());
}

TEST_CASE("hpd outside fraction counts quadratic exceedances") {
  const auto target = unit_gaussian(2);
  const std::vector<Eigen::VectorXd> at_mean(100, Eigen::VectorXd::Zero(2));
  CHECK(hpd_outside_fraction(at_mean, target, 1.0) == 0.0);
  CHECK_THROWS_AS(hpd_outside_fraction({}, target, 1.0), EmptyInput);
}

TEST_CASE("exact gaussian draws cover the 90 percent chi-squared region") {
  const auto target = unit_gaussian(2);
  const double threshold = chi_squared_quantile(0.9, 2.0);
  RngStream rng(237);
  std::vector<Eigen::VectorXd> draws;
  draws.reserve(1000000);
  for (int i = 0; i < 1000000; ++i) draws.push_back(target.sample(rng));
  CHECK(hpd_outside_fraction(draws, target, threshold) ==
        doctest::Approx(0.10).epsilon(0.03));
}

TEST_CASE("rmse report closed forms") {
  CHECK_THROWS_AS(rmse_report({}, {0.0}), EmptyInput);
  const auto zero = rmse_report({{1.0, 2.0}, {1.0, 2.0}}, {1.0, 2.0});
  CHECK(zero.overall == 0.0);
  CHECK(zero.per_statistic[0] == 0.0);

  const double e = 0.37;
  const auto pair = rmse_report({{1.0 + e}, {1.0 - e}}, {1.0});
  CHECK(pair.per_statistic[0] == doctest::Approx(e).epsilon(1e-12));
  CHECK(pair.overall == doctest::Approx(e).epsilon(1e-12));
}

TEST_SUITE_END();
