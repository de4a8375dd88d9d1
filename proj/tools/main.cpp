#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ramcmc/experiment.hpp"
#include "ramcmc/stats.hpp"

namespace {

using ramcmc::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ramcmc::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  return out;
}

ramcmc::TargetModel make_verify_target(const std::string& name, int dim) {
  if (name == "gaussian")
    return ramcmc::TargetModel::gaussian(Eigen::VectorXd::Zero(dim),
                                         Eigen::MatrixXd::Identity(dim, dim));
  if (name == "student2d-paper") {
    Eigen::VectorXd mu(2);
    mu << 1.0, 2.0;
    Eigen::MatrixXd sigma(2, 2);
    sigma << 0.2, 0.1, 0.1, 0.8;
    return ramcmc::TargetModel::elliptical_student(mu, sigma, 1.0);
  }
  if (name == "product-normal") return ramcmc::TargetModel::product_normal(dim);
  if (name == "product-cauchy") return ramcmc::TargetModel::product_cauchy(dim);
  throw ramcmc::ConfigError("unknown verify target '" + name +
                            "' (gaussian|student2d-paper|product-normal|product-cauchy)");
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows[i].assign(m.row(i).begin(), m.row(i).end());
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  return m;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ramcmc::ConfigError("cannot open '" + path + "'");
  return json::parse(in);
}

struct RunFlags {
  std::string config_file;
  std::string preset, algos, proposal, s1, eigen_bounds, out;
  int dim = -1;
  long iters = -1, burnin = -1, reps = -1, rep_start = -1, thin = -1, checkpoint = -1;
  double alpha_star = -1.0, epsilon = -1.0;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double cov_gamma = std::numeric_limits<double>::quiet_NaN();
  bool seed_set = false;
  std::uint64_t seed = 0;
};

int do_run(const RunFlags& flags) {
  ramcmc::ExperimentConfig config;
  if (!flags.config_file.empty()) {
    auto parsed = ramcmc::parse_config(read_file(flags.config_file));
    if (!parsed.config) {
      json report;
      report["error"] = "invalid configuration";
      for (const auto& issue : parsed.issues)
        report["issues"].push_back(
            {{"line", issue.line}, {"field", issue.field}, {"message", issue.message}});
      std::cerr << report.dump(2) << "\n";
      return 2;
    }
    config = std::move(*parsed.config);
  }
  if (!flags.preset.empty()) config.preset = flags.preset;
  if (flags.dim >= 0) config.dim = flags.dim;
  if (!flags.algos.empty()) {
    config.algorithms.clear();
    std::istringstream in(flags.algos);
    std::string name;
    while (std::getline(in, name, ',')) config.algorithms.push_back(ramcmc::parse_algorithm(name));
  }
  if (flags.iters >= 0) config.iterations = flags.iters;
  if (flags.burnin >= 0) config.burn_in = flags.burnin;
  if (flags.reps >= 0) config.replications = flags.reps;
  if (flags.rep_start >= 0) config.rep_start = flags.rep_start;
  if (flags.seed_set) config.seed = flags.seed;
  if (flags.thin >= 0) config.thin = flags.thin;
  if (flags.checkpoint >= 0) config.checkpoint_every = flags.checkpoint;
  if (flags.alpha_star >= 0.0) config.alpha_star = flags.alpha_star;
  if (!std::isnan(flags.gamma)) config.gamma = flags.gamma;
  if (!std::isnan(flags.cov_gamma)) config.cov_gamma = flags.cov_gamma;
  if (flags.epsilon >= 0.0) config.epsilon = flags.epsilon;
  if (!flags.proposal.empty()) config.proposal = ramcmc::parse_proposal(flags.proposal);
  if (!flags.s1.empty()) config.initial_factor = ramcmc::parse_initial_factor(flags.s1);
  if (!flags.eigen_bounds.empty()) {
    const auto parts = parse_double_list(flags.eigen_bounds);
    if (parts.size() != 2) throw ramcmc::ConfigError("--eigen-bounds expects 'lo,hi'");
    config.eigen_bounds = {parts[0], parts[1]};
  }
  if (!flags.out.empty()) config.out_dir = flags.out;
  return ramcmc::run_experiment(config);
}

int do_presets() {
  json out = json::array();
  for (const auto& p : ramcmc::list_presets()) {
    json entry;
    entry["name"] = p.name;
    entry["description"] = p.description;
    entry["default_dim"] = p.default_dim;
    entry["dim_fixed"] = p.dim_fixed;
    entry["parameters"] = p.parameters;
    entry["initial_factor_variants"] = p.initial_factor_variants;
    out.push_back(std::move(entry));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int do_verify_mean_field(const std::string& target_name, int dim, const std::string& thetas,
                         long samples, std::uint64_t seed, double alpha_star) {
  const auto target = make_verify_target(target_name, dim);
  ramcmc::RngStream rng(seed, 1);
  json out = json::array();
  for (double theta : parse_double_list(thetas)) {
    const auto s = ramcmc::LowerTriangularFactor::scaled_identity(target.dim(), theta);
    const auto estimate =
        ramcmc::estimate_mean_field(s, target, ramcmc::ProposalSpec::student(1.0), alpha_star,
                                    samples, rng);
    const Eigen::VectorXd eig = ramcmc::symmetric_eigenvalues(estimate.matrix);
    const double se_norm = estimate.standard_errors.norm();
    json entry;
    entry["theta"] = theta;
    entry["samples"] = estimate.samples;
    entry["matrix"] = matrix_to_json(estimate.matrix);
    entry["standard_errors"] = matrix_to_json(estimate.standard_errors);
    entry["trace"] = estimate.trace.value;
    entry["trace_se"] = estimate.trace.standard_error;
    entry["eig_min"] = eig[0];
    entry["eig_max"] = eig[eig.size() - 1];
    entry["positive_definite_3se"] = eig[0] > 3.0 * se_norm;
    entry["negative_definite_3se"] = eig[eig.size() - 1] < -3.0 * se_norm;
    out.push_back(std::move(entry));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int do_verify_g(const std::string& target_name, int dim, std::string thetas, long samples,
                std::uint64_t seed) {
  const auto target = make_verify_target(target_name, dim);
  if (thetas.empty()) thetas = "0.001,0.00464,0.0215,0.1,0.464,2.15,10,46.4,215,1000";
  ramcmc::RngStream rng(seed, 2);
  Eigen::VectorXd direction = Eigen::VectorXd::Zero(target.dim());
  direction[0] = 1.0;
  json entries = json::array();
  std::vector<ramcmc::MonteCarloScalar> estimates;
  for (double theta : parse_double_list(thetas)) {
    const auto g = ramcmc::estimate_g(theta, target, ramcmc::ProposalSpec::student(1.0), direction,
                                      samples, rng);
    estimates.push_back(g);
    entries.push_back({{"theta", theta}, {"value", g.value}, {"se", g.standard_error}});
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < estimates.size(); ++i) {
    const double se = std::hypot(estimates[i].standard_error, estimates[i + 1].standard_error);
    if (estimates[i + 1].value - estimates[i].value > 3.0 * se) monotone = false;
  }
  json out;
  out["grid"] = std::move(entries);
  out["nonincreasing_3se"] = monotone;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int do_verify_lyapunov(const std::string& target_name, int dim, int cases, long samples,
                       std::uint64_t seed, double alpha_star) {
  const auto target = make_verify_target(target_name, dim);
  const auto proposal = ramcmc::ProposalSpec::student(1.0);
  ramcmc::RngStream rng(seed, 3);
  const double theta_star =
      ramcmc::find_scale_fixed_point(target, proposal, alpha_star, 0.05, rng, samples / 5);
  const Eigen::MatrixXd r_star =
      theta_star * theta_star * Eigen::MatrixXd::Identity(target.dim(), target.dim());

  json case_list = json::array();
  int nonpositive = 0;
  for (int c = 0; c < cases; ++c) {
    Eigen::VectorXd log_eigs(target.dim());
    for (Eigen::Index i = 0; i < target.dim(); ++i) log_eigs[i] = 3.0 * (rng.uniform01() - 0.5);
    const Eigen::MatrixXd q = ramcmc::random_rotation(target.dim(), rng);
    Eigen::MatrixXd shape = q * (theta_star * theta_star * log_eigs.array().exp().matrix())
                                    .asDiagonal() * q.transpose();
    ramcmc::symmetrize_from_lower(shape);
    const auto factor = ramcmc::cholesky_factorize(shape);
    const auto descent = ramcmc::descent_inner_product(factor, r_star, target, proposal,
                                                       alpha_star, samples, rng);
    if (descent.value <= 3.0 * descent.standard_error) ++nonpositive;
    case_list.push_back({{"lyapunov", ramcmc::lyapunov_value(shape, r_star)},
                         {"descent", descent.value},
                         {"se", descent.standard_error}});
  }
  json out;
  out["theta_star"] = theta_star;
  out["cases"] = std::move(case_list);
  out["nonpositive_3se"] = nonpositive;
  out["total"] = cases;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int do_diag_b(const std::string& summary_path) {
  const json summary = load_json(summary_path);
  if (!summary.contains("truth") || !summary["truth"].contains("shape"))
    throw ramcmc::ConfigError("summary carries no reference shape for b");
  const Eigen::MatrixXd factor = matrix_from_json(summary["factor_final"]);
  const Eigen::MatrixXd sigma = matrix_from_json(summary["truth"]["shape"]);
  const ramcmc::LowerTriangularFactor l(factor);
  json out;
  out["b"] = ramcmc::suboptimality_b(l.product(), sigma);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int do_diag_hpd(const std::string& chain_path, const std::string& summary_path, double threshold) {
  const json summary = load_json(summary_path);
  if (!summary.contains("truth") || !summary["truth"].contains("mean") ||
      !summary["truth"].contains("shape"))
    throw ramcmc::ConfigError("summary carries no (mean, shape) metadata");
  const auto mean_vec = summary["truth"]["mean"].get<std::vector<double>>();
  const Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(mean_vec.data(), mean_vec.size());
  const Eigen::MatrixXd shape = matrix_from_json(summary["truth"]["shape"]);
  const int dim = static_cast<int>(mean.size());
  // Rebuild a Gaussian carrier for the (mean, shape) quadratic form.
  const auto carrier = ramcmc::TargetModel::gaussian(mean, shape);

  std::ifstream in(chain_path);
  if (!in) throw ramcmc::ConfigError("cannot open '" + chain_path + "'");
  std::string line;
  std::getline(in, line);  // header
  std::vector<Eigen::VectorXd> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    Eigen::VectorXd x(dim);
    for (int col = 0; std::getline(row, cell, ','); ++col) {
      if (col >= 3 && col < 3 + dim) x[col - 3] = std::stod(cell);
    }
    samples.push_back(std::move(x));
  }
  json out;
  out["threshold"] = threshold;
  out["samples"] = samples.size();
  out["outside_fraction"] = ramcmc::hpd_outside_fraction(samples, carrier, threshold);
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust adaptive Metropolis sampler and verification suite"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run an experiment preset");
  run->add_option("--config", run_flags.config_file, "key = value configuration file");
  run->add_option("--preset", run_flags.preset, "preset name (see 'presets')");
  run->add_option("--algo", run_flags.algos, "comma list of ram|am|aswam|asm|rwm");
  run->add_option("--dim", run_flags.dim, "target dimension (presets with free dimension)");
  run->add_option("--iters", run_flags.iters, "post-burn-in iterations");
  run->add_option("--burnin", run_flags.burnin, "burn-in iterations");
  run->add_option("--reps", run_flags.reps, "number of replications");
  run->add_option("--rep-start", run_flags.rep_start, "first replication index");
  run->add_option("--seed", run_flags.seed, "master seed")->each([&](const std::string&) {
    run_flags.seed_set = true;
  });
  run->add_option("--proposal", run_flags.proposal, "gaussian or student[:p]");
  run->add_option("--gamma", run_flags.gamma, "adaptation exponent in (1/2, 1]");
  run->add_option("--cov-gamma", run_flags.cov_gamma, "AM/ASWAM covariance exponent");
  run->add_option("--alpha-star", run_flags.alpha_star, "target acceptance rate");
  run->add_option("--s1", run_flags.s1, "initial factor: ident|scaled:<c>|file:<path>");
  run->add_option("--eigen-bounds", run_flags.eigen_bounds, "bounded adaptation 'lo,hi'");
  run->add_option("--epsilon", run_flags.epsilon, "AM covariance regularization");
  run->add_option("--thin", run_flags.thin, "chain CSV thinning");
  run->add_option("--checkpoint-every", run_flags.checkpoint, "checkpoint interval");
  run->add_option("--out", run_flags.out, "output directory");

  auto* presets = app.add_subcommand("presets", "list experiment presets");

  auto* verify = app.add_subcommand("verify", "Monte Carlo checks of the adaptation theory");
  verify->require_subcommand(1);
  std::string v_target = "gaussian";
  int v_dim = 2;
  long v_samples = 100000;
  std::uint64_t v_seed = 0;
  double v_alpha = 0.234;
  std::string v_mf_thetas = "0.1,100";
  std::string v_g_thetas;
  int v_cases = 50;
  for (auto* sub : {verify->add_subcommand("mean-field", "sign structure of the mean field"),
                    verify->add_subcommand("g", "directional mean acceptance curve"),
                    verify->add_subcommand("lyapunov", "descent inner products")}) {
    sub->add_option("--target", v_target, "gaussian|student2d-paper|product-normal|product-cauchy");
    sub->add_option("--dim", v_dim, "dimension for free-dimension targets");
    sub->add_option("--samples", v_samples, "Monte Carlo samples per estimate");
    sub->add_option("--seed", v_seed, "seed");
    sub->add_option("--alpha-star", v_alpha, "target acceptance rate");
  }
  verify->get_subcommand("mean-field")->add_option("--theta", v_mf_thetas, "comma list of scales");
  verify->get_subcommand("g")->add_option("--thetas", v_g_thetas, "comma list of scales");
  verify->get_subcommand("lyapunov")->add_option("--cases", v_cases, "number of random factors");

  auto* diag = app.add_subcommand("diag", "diagnostics over persisted runs");
  diag->require_subcommand(1);
  std::string d_summary, d_chain;
  double d_threshold = 99.0;
  auto* diag_b = diag->add_subcommand("b", "suboptimality factor of a persisted final factor");
  diag_b->add_option("--summary", d_summary, "replication summary JSON")->required();
  auto* diag_hpd = diag->add_subcommand("hpd", "outside fraction of a persisted chain CSV");
  diag_hpd->add_option("--chain", d_chain, "chain CSV")->required();
  diag_hpd->add_option("--summary", d_summary, "replication summary JSON")->required();
  diag_hpd->add_option("--threshold", d_threshold, "quadratic-form threshold");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(run_flags);
    if (presets->parsed()) return do_presets();
    if (verify->parsed()) {
      if (verify->get_subcommand("mean-field")->parsed())
        return do_verify_mean_field(v_target, v_dim, v_mf_thetas, v_samples, v_seed, v_alpha);
      if (verify->get_subcommand("g")->parsed())
        return do_verify_g(v_target, v_dim, v_g_thetas, v_samples, v_seed);
      if (verify->get_subcommand("lyapunov")->parsed())
        return do_verify_lyapunov(v_target, v_dim, v_cases, v_samples, v_seed, v_alpha);
    }
    if (diag->parsed()) {
      if (diag_b->parsed()) return do_diag_b(d_summary);
      if (diag_hpd->parsed()) return do_diag_hpd(d_chain, d_summary, d_threshold);
    }
  } catch (const std::exception& e) {
    ramcmc::json report;
    report["error"] = e.what();
    std::cerr << report.dump(2) << "\n";
    return 1;
  }
  return 0;
}
