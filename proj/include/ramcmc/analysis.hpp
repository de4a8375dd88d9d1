#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "ramcmc/linalg.hpp"
#include "ramcmc/proposal.hpp"
#include "ramcmc/rng.hpp"
#include "ramcmc/target.hpp"

namespace ramcmc {

struct MonteCarloScalar {
  double value = 0.0;
  double standard_error = 0.0;
  long samples = 0;
};

/// Monte Carlo estimate of the mean field h(S): sample average of
/// S [(alpha(x, x + S u) - alpha_star) u u^T / ||u||^2] S^T over x ~ pi,
/// u ~ q, with per-entry standard errors. Exactly symmetric by construction.
struct MeanFieldEstimate {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd standard_errors;
  MonteCarloScalar trace;
  long samples = 0;
};

/// Draws exact target samples; defaults to TargetModel::sample.
using ExactSampler = std::function<Eigen::VectorXd(RngStream&)>;

MeanFieldEstimate estimate_mean_field(const Eigen::MatrixXd& shape, const TargetModel& target,
                                      const ProposalSpec& spec, double alpha_star, long samples,
                                      RngStream& rng, const ExactSampler& target_sampler = {});

inline MeanFieldEstimate estimate_mean_field(const LowerTriangularFactor& s,
                                             const TargetModel& target, const ProposalSpec& spec,
                                             double alpha_star, long samples, RngStream& rng,
                                             const ExactSampler& target_sampler = {}) {
  return estimate_mean_field(s.matrix(), target, spec, alpha_star, samples, rng, target_sampler);
}

/// Directional mean acceptance g(theta) = E[min{1, pi(x + r theta v)/pi(x)}]
/// over x ~ pi and r the proposal radius, for a fixed unit direction v.
MonteCarloScalar estimate_g(double theta, const TargetModel& target, const ProposalSpec& spec,
                            const Eigen::VectorXd& direction, long samples, RngStream& rng,
                            const ExactSampler& target_sampler = {});

/// Scale theta* with trace of the mean field at theta* I crossing zero,
/// located by bisection on the Monte Carlo sign. Throws NoSignChange when no
/// bracket is found inside [1e-6, 1e6].
double find_scale_fixed_point(const TargetModel& target, const ProposalSpec& spec,
                              double alpha_star, double tol, RngStream& rng,
                              long samples_per_eval = 100000);

/// w(R) = trace(Rstar^{-1} R) - log det(R / Rstar) - d; nonnegative, zero only
/// at R = Rstar.
double lyapunov_value(const SymmetricMatrix& r, const SymmetricMatrix& r_star);

/// Monte Carlo estimate of <grad w(S S^T), h(S)> with grad w(R) =
/// Rstar^{-1} - R^{-1}; nonpositive in expectation, zero at S S^T = Rstar.
MonteCarloScalar descent_inner_product(const LowerTriangularFactor& s,
                                       const SymmetricMatrix& r_star, const TargetModel& target,
                                       const ProposalSpec& spec, double alpha_star, long samples,
                                       RngStream& rng, const ExactSampler& target_sampler = {});

/// b = d (sum lambda_i^-2)(sum lambda_i^-1)^-2 with lambda_i the square roots
/// of the eigenvalues of Sigma^{-1/2} R Sigma^{-1/2}; 1 exactly when R and
/// Sigma are proportional, larger otherwise.
double suboptimality_b(const SymmetricMatrix& r, const SymmetricMatrix& sigma);

/// Fraction of samples whose hpd_quadratic exceeds the threshold.
double hpd_outside_fraction(const std::vector<Eigen::VectorXd>& samples, const TargetModel& target,
                            double threshold);

/// Quadratic-form threshold whose HPD region has the given probability mass.
/// Supports Gaussian targets (chi-squared quantile) and the bivariate
/// Student with one degree of freedom (closed form).
double hpd_threshold(const TargetModel& target, double level);

struct RmseReport {
  std::vector<double> per_statistic;
  double overall = 0.0;
};

/// Root-mean-square error of each tracked statistic against its truth,
/// aggregated across replications; rows index replications.
RmseReport rmse_report(const std::vector<std::vector<double>>& replication_values,
                       const std::vector<double>& truths);

}  // namespace ramcmc
