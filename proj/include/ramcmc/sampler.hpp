#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ramcmc/linalg.hpp"
#include "ramcmc/proposal.hpp"
#include "ramcmc/target.hpp"

namespace ramcmc {

enum class Algorithm { FixedRwm, Ram, Am, Aswam, Asm };

const char* to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

/// Step size sequence eta_n = n^-gamma, optionally dimension-scaled to
/// min{1, d * n^-gamma}. Nonincreasing and confined to (0, 1].
struct AdaptationSchedule {
  double gamma = 2.0 / 3.0;
  bool dimension_scaled = false;
};

double step_size(const AdaptationSchedule& schedule, long n, Eigen::Index dim);

struct SamplerConfig {
  Algorithm algorithm = Algorithm::Ram;
  double target_acceptance = 0.234;
  LowerTriangularFactor initial_factor;
  Eigen::VectorXd initial_point;
  AdaptationSchedule schedule;             // RAM shape / ASM and ASWAM scale
  AdaptationSchedule covariance_schedule;  // AM and ASWAM mean-covariance recursion
  std::optional<std::pair<double, double>> eigen_bounds;
  double am_regularization = 0.0;
  long burn_in = 0;
  long iterations = 0;
  ProposalSpec proposal;
};

/// Evolving chain state. The chain index n counts states, with n = 1 the
/// initial state; each Metropolis step advances it by one.
struct ChainState {
  long n = 1;
  Eigen::VectorXd x;
  double log_density = 0.0;
  LowerTriangularFactor factor;
  Eigen::VectorXd am_mean;    // AM / ASWAM only
  Eigen::MatrixXd am_cov;     // AM / ASWAM only
  double log_scale = 0.0;     // ASM / ASWAM only
  long accept_count = 0;
  double last_alpha = 0.0;
};

struct StepResult {
  Eigen::VectorXd proposal;
  Eigen::VectorXd increment;
  double alpha = 0.0;
  bool accepted = false;
};

struct IterationRecord {
  long iteration = 0;  // completed Metropolis steps, 1-based
  Eigen::VectorXd x;
  double alpha = 0.0;
  bool accepted = false;
  Eigen::VectorXd factor_diagonal;
};

using RecordSink = std::function<void(const IterationRecord&)>;

/// What run_chain accumulates beyond acceptance and coordinate means.
struct SummaryOptions {
  long checkpoint_every = 1000;
  std::vector<double> hpd_levels;      // e.g. {0.1, 0.25, 0.5, 0.75, 0.9}
  std::vector<double> hpd_thresholds;  // parallel to hpd_levels
  /// Optional per-checkpoint statistic of the current factor (e.g. the
  /// suboptimality factor against a known shape).
  std::function<double(const LowerTriangularFactor&)> factor_statistic;
};

struct ChainSummary {
  double acceptance_rate = 0.0;
  Eigen::VectorXd coordinate_means;
  std::vector<double> hpd_levels;
  std::vector<double> hpd_thresholds;
  std::vector<double> hpd_inside;                 // inside fraction per level
  std::optional<double> hpd_outside_fraction;     // 1 - inside at the 0.9 level
  std::vector<long> checkpoint_iterations;
  std::vector<double> checkpoint_log_s11;         // log of first factor diagonal
  std::vector<double> checkpoint_factor_stat;     // empty unless factor_statistic set
  LowerTriangularFactor factor_final;
  long iterations = 0;
  long burn_in = 0;
  long accepted_post_burn_in = 0;
};

/// One Metropolis accept/reject move with externally supplied increment u and
/// uniform w (accept iff w <= alpha and the proposal has positive density).
/// Updates x and the cached log density; does not touch n or the factor.
StepResult metropolis_step_with(ChainState& state, const TargetModel& target,
                                const Eigen::VectorXd& u, double w);

/// Draws u ~ q and w ~ U[0,1) from the stream (in that order) and applies
/// metropolis_step_with.
StepResult metropolis_step(ChainState& state, const TargetModel& target,
                           const ProposalSpec& spec, RngStream& rng);

/// Rank-one shape adaptation: returns the lower-triangular S' with
/// S' S'^T = S (I + eta (alpha - alpha_star) u u^T / ||u||^2) S^T.
/// A zero increment returns S unchanged; a failed downdate falls back to
/// explicit formation and refactorization.
LowerTriangularFactor ram_adapt(const LowerTriangularFactor& s, const Eigen::VectorXd& u,
                                double alpha, double eta, double alpha_star);

/// ram_adapt candidate accepted only when every eigenvalue of S' S'^T stays
/// inside [lambda_min, lambda_max]; otherwise S is kept.
LowerTriangularFactor ram_adapt_bounded(const LowerTriangularFactor& s, const Eigen::VectorXd& u,
                                        double alpha, double eta, double alpha_star,
                                        double lambda_min, double lambda_max);

struct AmAdaptResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  LowerTriangularFactor factor;  // scale * chol(cov + epsilon I)
};

/// Exponential-weight mean/covariance recursion with proposal factor
/// scale * chol(cov' + epsilon I). AM uses scale = 2.4 / sqrt(dim); ASWAM
/// passes its adaptive exp(log theta). Throws NotPositiveDefinite when
/// cov' + epsilon I fails to factor (epsilon too small).
AmAdaptResult am_adapt(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       const Eigen::VectorXd& new_x, double eta, double epsilon, double scale);

inline double am_proposal_scale(Eigen::Index dim) { return 2.4 / std::sqrt(static_cast<double>(dim)); }

/// log theta' = log theta + (eta / 2)(alpha - alpha_star).
double scale_adapt(double log_theta, double alpha, double eta, double alpha_star);

/// Initial ChainState for a config; checks pi(x1) > 0 and, when eigenvalue
/// bounds are set, that spec(s1 s1^T) lies inside them.
ChainState make_initial_state(const SamplerConfig& config, const TargetModel& target);

/// One full chain step: Metropolis move at index n = state.n + 1 followed by
/// the configured adaptation with eta_n, then the counters update.
StepResult chain_step(ChainState& state, const SamplerConfig& config, const TargetModel& target,
                      RngStream& rng);

/// chain_step with injected driving randomness (u, w) instead of a stream.
StepResult chain_step_with(ChainState& state, const SamplerConfig& config,
                           const TargetModel& target, const Eigen::VectorXd& u, double w);

/// Runs burn_in + iterations Metropolis steps with adaptation active from the
/// first step; summary statistics come from the post-burn-in segment only.
/// Bit-reproducible given (config, stream). Errors are rethrown as ChainError
/// carrying the iteration index.
ChainSummary run_chain(const SamplerConfig& config, const TargetModel& target, RngStream& rng,
                       const RecordSink& sink = {}, const SummaryOptions& options = {});

}  // namespace ramcmc
