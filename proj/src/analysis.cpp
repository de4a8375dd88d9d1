#include "ramcmc/analysis.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ramcmc/errors.hpp"
#include "ramcmc/stats.hpp"

namespace ramcmc {

namespace {

ExactSampler resolve_sampler(const TargetModel& target, const ExactSampler& sampler) {
  if (sampler) return sampler;
  if (!target.has_exact_sampler())
    throw NoExactSampler("analysis: target has no exact sampler and none was supplied");
  return [&target](RngStream& rng) { return target.sample(rng); };
}

double clamp_tiny_negative(double x) { return (x < 0.0 && x > -1e-9) ? 0.0 : x; }

Eigen::MatrixXd spd_inverse(const SymmetricMatrix& m) {
  const Eigen::MatrixXd l = cholesky_factorize(m).matrix();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  l.triangularView<Eigen::Lower>().solveInPlace(inv);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(inv);
  symmetrize_from_lower(inv);
  return inv;
}

}  // namespace

MeanFieldEstimate estimate_mean_field(const Eigen::MatrixXd& shape, const TargetModel& target,
                                      const ProposalSpec& spec, double alpha_star, long samples,
                                      RngStream& rng, const ExactSampler& target_sampler) {
  if (samples < 2) throw std::invalid_argument("estimate_mean_field: need at least two samples");
  const ExactSampler draw = resolve_sampler(target, target_sampler);
  const Eigen::Index d = target.dim();
  if (shape.rows() != d || shape.cols() != d)
    throw DimensionMismatch("estimate_mean_field: shape dimension mismatch");

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(d, d);
  double trace_sum = 0.0, trace_sum_sq = 0.0;

  for (long i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = draw(rng);
    const Eigen::VectorXd u = sample_increment(spec, d, rng);
    const Eigen::VectorXd z = shape * u;
    const double log_x = target.log_density(x);
    const double log_y = target.log_density(x + z);
    const double alpha = std::min(1.0, std::exp(log_y - log_x));
    const double coef = (alpha - alpha_star) / u.squaredNorm();
    const Eigen::MatrixXd term = coef * (z * z.transpose());
    sum += term;
    sum_sq += term.cwiseProduct(term);
    const double tr = coef * z.squaredNorm();
    trace_sum += tr;
    trace_sum_sq += tr * tr;
  }

  const double n = static_cast<double>(samples);
  MeanFieldEstimate out;
  out.samples = samples;
  out.matrix = sum / n;
  symmetrize_from_lower(out.matrix);
  out.standard_errors =
      ((sum_sq / n - out.matrix.cwiseProduct(out.matrix)).cwiseMax(0.0) / (n - 1.0)).cwiseSqrt();
  symmetrize_from_lower(out.standard_errors);
  out.trace.value = trace_sum / n;
  out.trace.standard_error =
      std::sqrt(std::max(0.0, trace_sum_sq / n - out.trace.value * out.trace.value) / (n - 1.0));
  out.trace.samples = samples;
  return out;
}

MonteCarloScalar estimate_g(double theta, const TargetModel& target, const ProposalSpec& spec,
                            const Eigen::VectorXd& direction, long samples, RngStream& rng,
                            const ExactSampler& target_sampler) {
  if (!(theta > 0.0)) throw std::invalid_argument("estimate_g: theta must be positive");
  if (samples < 2) throw std::invalid_argument("estimate_g: need at least two samples");
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("estimate_g: direction must be a unit vector");
  const ExactSampler draw = resolve_sampler(target, target_sampler);
  const Eigen::Index d = target.dim();

  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = draw(rng);
    const double r = sample_radius(spec, d, rng);
    const double log_x = target.log_density(x);
    const double log_y = target.log_density(x + (r * theta) * direction);
    const double alpha = std::min(1.0, std::exp(log_y - log_x));
    sum += alpha;
    sum_sq += alpha * alpha;
  }
  const double n = static_cast<double>(samples);
  MonteCarloScalar out;
  out.value = sum / n;
  out.standard_error = std::sqrt(std::max(0.0, sum_sq / n - out.value * out.value) / (n - 1.0));
  out.samples = samples;
  return out;
}

double find_scale_fixed_point(const TargetModel& target, const ProposalSpec& spec,
                              double alpha_star, double tol, RngStream& rng,
                              long samples_per_eval) {
  if (!(alpha_star > 0.0) || !(alpha_star < 1.0))
    throw std::invalid_argument("find_scale_fixed_point: alpha_star must lie in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("find_scale_fixed_point: tol must be positive");
  const Eigen::Index d = target.dim();

  const auto trace_at = [&](double theta) {
    const auto s = LowerTriangularFactor::scaled_identity(d, theta);
    return estimate_mean_field(s, target, spec, alpha_star, samples_per_eval, rng).trace.value;
  };

  // The mean acceptance is nonincreasing in theta, so the trace goes from
  // positive (factor too small) to negative (too large).
  double lo = 1.0, hi = 1.0;
  double f_lo = trace_at(lo);
  while (f_lo <= 0.0) {
    lo *= 0.1;
    if (lo < 1e-6) throw NoSignChange("find_scale_fixed_point: no positive trace down to 1e-6");
    f_lo = trace_at(lo);
  }
  double f_hi = trace_at(hi);
  while (f_hi >= 0.0) {
    hi *= 10.0;
    if (hi > 1e6) throw NoSignChange("find_scale_fixed_point: no negative trace up to 1e6");
    f_hi = trace_at(hi);
  }

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (trace_at(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double lyapunov_value(const SymmetricMatrix& r, const SymmetricMatrix& r_star) {
  if (r.rows() != r_star.rows() || r.cols() != r_star.cols())
    throw DimensionMismatch("lyapunov_value: shape mismatch");
  const Eigen::Index d = r.rows();
  const Eigen::MatrixXd l_star = cholesky_factorize(r_star).matrix();
  const Eigen::MatrixXd l = cholesky_factorize(r).matrix();

  // trace(Rstar^{-1} R) = ||Lstar^{-1} L||_F^2.
  Eigen::MatrixXd w = l;
  l_star.triangularView<Eigen::Lower>().solveInPlace(w);
  double log_det_ratio = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    log_det_ratio += 2.0 * (std::log(l(i, i)) - std::log(l_star(i, i)));
  const double value = w.squaredNorm() - log_det_ratio - static_cast<double>(d);
  return clamp_tiny_negative(value);
}

MonteCarloScalar descent_inner_product(const LowerTriangularFactor& s,
                                       const SymmetricMatrix& r_star, const TargetModel& target,
                                       const ProposalSpec& spec, double alpha_star, long samples,
                                       RngStream& rng, const ExactSampler& target_sampler) {
  if (samples < 2) throw std::invalid_argument("descent_inner_product: need at least two samples");
  const ExactSampler draw = resolve_sampler(target, target_sampler);
  const Eigen::Index d = target.dim();
  const Eigen::MatrixXd gradient = spd_inverse(r_star) - spd_inverse(s.product());

  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = draw(rng);
    const Eigen::VectorXd u = sample_increment(spec, d, rng);
    const Eigen::VectorXd z = s.apply(u);
    const double log_x = target.log_density(x);
    const double log_y = target.log_density(x + z);
    const double alpha = std::min(1.0, std::exp(log_y - log_x));
    const double term = (alpha - alpha_star) / u.squaredNorm() * z.dot(gradient * z);
    sum += term;
    sum_sq += term * term;
  }
  const double n = static_cast<double>(samples);
  MonteCarloScalar out;
  out.value = sum / n;
  out.standard_error = std::sqrt(std::max(0.0, sum_sq / n - out.value * out.value) / (n - 1.0));
  out.samples = samples;
  return out;
}

double suboptimality_b(const SymmetricMatrix& r, const SymmetricMatrix& sigma) {
  if (r.rows() != sigma.rows())
    throw DimensionMismatch("suboptimality_b: shape mismatch");
  const Eigen::Index d = r.rows();
  const Eigen::MatrixXd l = cholesky_factorize(sigma).matrix();
  // Whitened shape L^{-1} R L^{-T}: same spectrum as Sigma^{-1/2} R Sigma^{-1/2}.
  Eigen::MatrixXd w = r;
  l.triangularView<Eigen::Lower>().solveInPlace(w);
  Eigen::MatrixXd wt = w.transpose();
  l.triangularView<Eigen::Lower>().solveInPlace(wt);
  SymmetricMatrix whitened = 0.5 * (wt + wt.transpose());
  symmetrize_from_lower(whitened);

  const Eigen::VectorXd eig = symmetric_eigenvalues(whitened);
  if (eig[0] <= 0.0)
    throw NotPositiveDefinite("suboptimality_b: whitened shape is not positive definite", 0);
  double inv_sum = 0.0, inv_sqrt_sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    inv_sum += 1.0 / eig[i];
    inv_sqrt_sum += 1.0 / std::sqrt(eig[i]);
  }
  return static_cast<double>(d) * inv_sum / (inv_sqrt_sum * inv_sqrt_sum);
}

double hpd_outside_fraction(const std::vector<Eigen::VectorXd>& samples, const TargetModel& target,
                            double threshold) {
  if (samples.empty()) throw EmptyInput("hpd_outside_fraction: no samples");
  long outside = 0;
  for (const auto& x : samples)
    if (target.hpd_quadratic(x) > threshold) ++outside;
  return static_cast<double>(outside) / static_cast<double>(samples.size());
}

double hpd_threshold(const TargetModel& target, double level) {
  if (!(level > 0.0) || !(level < 1.0))
    throw std::invalid_argument("hpd_threshold: level must lie in (0, 1)");
  if (!target.has_metadata()) throw MissingMetadata("hpd_threshold: target has no metadata");
  switch (target.kind()) {
    case TargetModel::Kind::Gaussian:
      return chi_squared_quantile(level, static_cast<double>(target.dim()));
    case TargetModel::Kind::EllipticalStudent:
      // Bivariate, one degree of freedom: P(Q > t) = (1 + t)^{-1/2}.
      if (target.dim() == 2) {
        const double tail = 1.0 - level;
        return 1.0 / (tail * tail) - 1.0;
      }
      break;
    default:
      break;
  }
  throw std::invalid_argument("hpd_threshold: no closed form for this target family");
}

RmseReport rmse_report(const std::vector<std::vector<double>>& replication_values,
                       const std::vector<double>& truths) {
  if (replication_values.empty()) throw EmptyInput("rmse_report: no replications");
  const std::size_t stats = truths.size();
  for (const auto& row : replication_values)
    if (row.size() != stats) throw DimensionMismatch("rmse_report: ragged replication rows");

  RmseReport report;
  report.per_statistic.assign(stats, 0.0);
  double total = 0.0;
  for (const auto& row : replication_values)
    for (std::size_t j = 0; j < stats; ++j) {
      const double e = row[j] - truths[j];
      report.per_statistic[j] += e * e;
      total += e * e;
    }
  const double reps = static_cast<double>(replication_values.size());
  for (std::size_t j = 0; j < stats; ++j)
    report.per_statistic[j] = std::sqrt(report.per_statistic[j] / reps);
  report.overall = stats == 0 ? 0.0 : std::sqrt(total / (reps * static_cast<double>(stats)));
  return report;
}

}  // namespace ramcmc
