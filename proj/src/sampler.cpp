#include "ramcmc/sampler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ramcmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate_schedule(const AdaptationSchedule& schedule, const char* who) {
  if (!(schedule.gamma > 0.5) || !(schedule.gamma <= 1.0))
    throw ConfigError(std::string(who) + ": schedule exponent must lie in (1/2, 1]");
}

}  // namespace

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::FixedRwm: return "rwm";
    case Algorithm::Ram: return "ram";
    case Algorithm::Am: return "am";
    case Algorithm::Aswam: return "aswam";
    case Algorithm::Asm: return "asm";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "rwm") return Algorithm::FixedRwm;
  if (text == "ram") return Algorithm::Ram;
  if (text == "am") return Algorithm::Am;
  if (text == "aswam") return Algorithm::Aswam;
  if (text == "asm") return Algorithm::Asm;
  throw std::invalid_argument("parse_algorithm: unknown algorithm '" + text +
                              "' (expected ram|am|aswam|asm|rwm)");
}

double step_size(const AdaptationSchedule& schedule, long n, Eigen::Index dim) {
  if (n < 1) throw std::invalid_argument("step_size: n must be at least 1");
  const double base = std::pow(static_cast<double>(n), -schedule.gamma);
  if (!schedule.dimension_scaled) return base;
  return std::min(1.0, static_cast<double>(dim) * base);
}

StepResult metropolis_step_with(ChainState& state, const TargetModel& target,
                                const Eigen::VectorXd& u, double w) {
  StepResult result;
  result.increment = u;
  result.proposal = state.x + state.factor.apply(u);
  const double log_proposal = target.log_density(result.proposal);
  result.alpha = std::min(1.0, std::exp(log_proposal - state.log_density));
  result.accepted = (log_proposal > kNegInf) && (w <= result.alpha);
  if (result.accepted) {
    state.x = result.proposal;
    state.log_density = log_proposal;
  }
  return result;
}

StepResult metropolis_step(ChainState& state, const TargetModel& target,
                           const ProposalSpec& spec, RngStream& rng) {
  const Eigen::VectorXd u = sample_increment(spec, state.x.size(), rng);
  const double w = rng.uniform01();
  return metropolis_step_with(state, target, u, w);
}

LowerTriangularFactor ram_adapt(const LowerTriangularFactor& s, const Eigen::VectorXd& u,
                                double alpha, double eta, double alpha_star) {
  const double norm = u.norm();
  if (norm == 0.0) return s;  // zero increment leaves the shape untouched
  const double a = eta * (alpha - alpha_star);
  if (a == 0.0) return s;
  const Eigen::VectorXd v = s.apply(u / norm);
  return rank_one_update_with_fallback(s, v, a);
}

LowerTriangularFactor ram_adapt_bounded(const LowerTriangularFactor& s, const Eigen::VectorXd& u,
                                        double alpha, double eta, double alpha_star,
                                        double lambda_min, double lambda_max) {
  if (!(lambda_min > 0.0) || !(lambda_min <= lambda_max))
    throw std::invalid_argument("ram_adapt_bounded: need 0 < lambda_min <= lambda_max");
  LowerTriangularFactor candidate = ram_adapt(s, u, alpha, eta, alpha_star);
  const Eigen::VectorXd eig = symmetric_eigenvalues(candidate.product());
  if (eig[0] >= lambda_min && eig[eig.size() - 1] <= lambda_max) return candidate;
  return s;
}

AmAdaptResult am_adapt(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       const Eigen::VectorXd& new_x, double eta, double epsilon, double scale) {
  AmAdaptResult out;
  out.mean = mean + eta * (new_x - mean);
  const Eigen::VectorXd centered = new_x - out.mean;
  out.cov = cov + eta * (centered * centered.transpose() - cov);
  symmetrize_from_lower(out.cov);
  SymmetricMatrix regularized = out.cov;
  if (epsilon != 0.0) regularized += epsilon * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  out.factor = LowerTriangularFactor(scale * cholesky_factorize(regularized).matrix());
  return out;
}

double scale_adapt(double log_theta, double alpha, double eta, double alpha_star) {
  return log_theta + 0.5 * eta * (alpha - alpha_star);
}

ChainState make_initial_state(const SamplerConfig& config, const TargetModel& target) {
  const Eigen::Index dim = target.dim();
  if (config.initial_point.size() != dim)
    throw DimensionMismatch("make_initial_state: initial point dimension mismatch");
  if (config.initial_factor.dim() != dim)
    throw DimensionMismatch("make_initial_state: initial factor dimension mismatch");
  if (!(config.target_acceptance > 0.0) || !(config.target_acceptance < 1.0))
    throw ConfigError("make_initial_state: target acceptance must lie in (0, 1)");

  ChainState state;
  state.x = config.initial_point;
  state.log_density = target.log_density(state.x);
  if (!(state.log_density > kNegInf))
    throw ConfigError("make_initial_state: initial point has zero target density");

  state.factor = config.initial_factor;
  if (config.eigen_bounds) {
    const auto [lo, hi] = *config.eigen_bounds;
    if (!(lo > 0.0) || !(lo <= hi))
      throw ConfigError("make_initial_state: need 0 < lambda_min <= lambda_max");
    const Eigen::VectorXd eig = symmetric_eigenvalues(config.initial_factor.product());
    if (eig[0] < lo || eig[eig.size() - 1] > hi)
      throw ConfigError("make_initial_state: eigenvalues of s1 s1^T lie outside the bounds");
  }

  switch (config.algorithm) {
    case Algorithm::Am:
      state.am_mean = state.x;
      state.am_cov = config.initial_factor.product();
      state.factor =
          LowerTriangularFactor(am_proposal_scale(dim) * config.initial_factor.matrix());
      break;
    case Algorithm::Aswam:
      state.am_mean = state.x;
      state.am_cov = config.initial_factor.product();
      state.log_scale = 0.0;
      break;
    case Algorithm::Asm:
      state.log_scale = 0.0;
      break;
    default:
      break;
  }
  return state;
}

StepResult chain_step_with(ChainState& state, const SamplerConfig& config,
                           const TargetModel& target, const Eigen::VectorXd& u, double w) {
  const long n = state.n + 1;
  const Eigen::Index dim = state.x.size();
  const StepResult result = metropolis_step_with(state, target, u, w);
  const double eta = step_size(config.schedule, n, dim);

  switch (config.algorithm) {
    case Algorithm::FixedRwm:
      break;
    case Algorithm::Ram:
      if (config.eigen_bounds) {
        state.factor =
            ram_adapt_bounded(state.factor, result.increment, result.alpha, eta,
                              config.target_acceptance, config.eigen_bounds->first,
                              config.eigen_bounds->second);
      } else {
        state.factor = ram_adapt(state.factor, result.increment, result.alpha, eta,
                                 config.target_acceptance);
      }
      break;
    case Algorithm::Asm:
      state.log_scale = scale_adapt(state.log_scale, result.alpha, eta, config.target_acceptance);
      state.factor =
          LowerTriangularFactor(std::exp(state.log_scale) * config.initial_factor.matrix());
      break;
    case Algorithm::Am: {
      const double eta_cov = step_size(config.covariance_schedule, n, dim);
      AmAdaptResult am = am_adapt(state.am_mean, state.am_cov, state.x, eta_cov,
                                  config.am_regularization, am_proposal_scale(dim));
      state.am_mean = std::move(am.mean);
      state.am_cov = std::move(am.cov);
      state.factor = std::move(am.factor);
      break;
    }
    case Algorithm::Aswam: {
      state.log_scale = scale_adapt(state.log_scale, result.alpha, eta, config.target_acceptance);
      const double eta_cov = step_size(config.covariance_schedule, n, dim);
      AmAdaptResult am = am_adapt(state.am_mean, state.am_cov, state.x, eta_cov,
                                  config.am_regularization, std::exp(state.log_scale));
      state.am_mean = std::move(am.mean);
      state.am_cov = std::move(am.cov);
      state.factor = std::move(am.factor);
      break;
    }
  }

  state.n = n;
  state.accept_count += result.accepted ? 1 : 0;
  state.last_alpha = result.alpha;
  return result;
}

StepResult chain_step(ChainState& state, const SamplerConfig& config, const TargetModel& target,
                      RngStream& rng) {
  const Eigen::VectorXd u = sample_increment(config.proposal, state.x.size(), rng);
  const double w = rng.uniform01();
  return chain_step_with(state, config, target, u, w);
}

ChainSummary run_chain(const SamplerConfig& config, const TargetModel& target, RngStream& rng,
                       const RecordSink& sink, const SummaryOptions& options) {
  if (config.iterations < 1)
    throw ConfigError("run_chain: iterations must be at least 1");
  if (config.burn_in < 0) throw ConfigError("run_chain: burn-in must be nonnegative");
  if (options.hpd_levels.size() != options.hpd_thresholds.size())
    throw ConfigError("run_chain: HPD levels and thresholds must pair up");
  if (!options.hpd_levels.empty() && !target.has_metadata())
    throw MissingMetadata("run_chain: HPD tracking needs target metadata");
  validate_schedule(config.schedule, "run_chain");
  validate_schedule(config.covariance_schedule, "run_chain");

  ChainState state = make_initial_state(config, target);
  const Eigen::Index dim = target.dim();
  const long total = config.burn_in + config.iterations;

  ChainSummary summary;
  summary.iterations = config.iterations;
  summary.burn_in = config.burn_in;
  summary.hpd_levels = options.hpd_levels;
  summary.hpd_thresholds = options.hpd_thresholds;
  summary.coordinate_means = Eigen::VectorXd::Zero(dim);
  std::vector<long> hpd_inside_counts(options.hpd_levels.size(), 0);

  long post = 0;
  for (long k = 1; k <= total; ++k) {
    StepResult result;
    try {
      result = chain_step(state, config, target, rng);
    } catch (const ChainError&) {
      throw;
    } catch (const std::exception& e) {
      throw ChainError("run_chain: iteration " + std::to_string(k) + ": " + e.what(), k);
    }

    if (k > config.burn_in) {
      ++post;
      summary.coordinate_means += (state.x - summary.coordinate_means) / static_cast<double>(post);
      summary.accepted_post_burn_in += result.accepted ? 1 : 0;
      if (!hpd_inside_counts.empty()) {
        const double q = target.hpd_quadratic(state.x);
        for (std::size_t i = 0; i < hpd_inside_counts.size(); ++i)
          if (q <= options.hpd_thresholds[i]) ++hpd_inside_counts[i];
      }
    }

    if (sink) sink({k, state.x, result.alpha, result.accepted, state.factor.diagonal()});

    if (options.checkpoint_every > 0 && k % options.checkpoint_every == 0) {
      summary.checkpoint_iterations.push_back(k);
      summary.checkpoint_log_s11.push_back(std::log(state.factor.matrix()(0, 0)));
      if (options.factor_statistic)
        summary.checkpoint_factor_stat.push_back(options.factor_statistic(state.factor));
    }
  }

  summary.acceptance_rate =
      static_cast<double>(summary.accepted_post_burn_in) / static_cast<double>(config.iterations);
  for (std::size_t i = 0; i < hpd_inside_counts.size(); ++i) {
    summary.hpd_inside.push_back(static_cast<double>(hpd_inside_counts[i]) /
                                 static_cast<double>(config.iterations));
    if (std::abs(options.hpd_levels[i] - 0.9) < 1e-9)
      summary.hpd_outside_fraction = 1.0 - summary.hpd_inside.back();
  }
  summary.factor_final = state.factor;
  return summary;
}

}  // namespace ramcmc
