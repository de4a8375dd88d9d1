#include "ramcmc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ramcmc/stats.hpp"

namespace ramcmc {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters after number");
  return v;
}

long parse_long(const std::string& s) {
  std::size_t used = 0;
  const long v = std::stol(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters after integer");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s[0] == '-') throw std::invalid_argument("expected an unsigned integer");
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("expected an unsigned integer");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("expected true or false");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const PresetInfo* find_preset(const std::string& name) {
  static const std::vector<PresetInfo> presets = list_presets();
  for (const auto& p : presets)
    if (p.name == name) return &p;
  return nullptr;
}

std::string preset_names() {
  std::string out;
  for (const auto& p : list_presets()) {
    if (!out.empty()) out += ", ";
    out += p.name;
  }
  return out;
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) row.push_back(parse_double(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("ragged rows in matrix file '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("empty matrix file '" + path + "'");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

json band(std::vector<double> values) {
  json out;
  out["median"] = sample_quantile(values, 0.5);
  out["p10"] = sample_quantile(values, 0.1);
  out["p90"] = sample_quantile(std::move(values), 0.9);
  return out;
}

json checkpoint_band(const std::vector<json>& summaries, const char* key) {
  const auto& first = summaries.front()["checkpoints"][key];
  const std::size_t points = first.size();
  std::vector<double> med(points), p10(points), p90(points);
  for (std::size_t c = 0; c < points; ++c) {
    std::vector<double> values;
    values.reserve(summaries.size());
    for (const auto& s : summaries) values.push_back(s["checkpoints"][key][c].get<double>());
    med[c] = sample_quantile(values, 0.5);
    p10[c] = sample_quantile(values, 0.1);
    p90[c] = sample_quantile(values, 0.9);
  }
  return json{{"median", med}, {"p10", p10}, {"p90", p90}};
}

}  // namespace

InitialFactorSpec parse_initial_factor(const std::string& text) {
  InitialFactorSpec spec;
  if (text == "ident") return spec;
  const std::string scaled = "scaled:";
  const std::string file = "file:";
  if (text.rfind(scaled, 0) == 0) {
    spec.kind = InitialFactorSpec::Kind::Scaled;
    spec.scale = parse_double(text.substr(scaled.size()));
    if (!(spec.scale > 0.0))
      throw std::invalid_argument("initial factor scale must be positive");
    return spec;
  }
  if (text.rfind(file, 0) == 0) {
    spec.kind = InitialFactorSpec::Kind::File;
    spec.path = text.substr(file.size());
    if (spec.path.empty()) throw std::invalid_argument("initial factor file path is empty");
    return spec;
  }
  throw std::invalid_argument("expected ident, scaled:<c> or file:<path>");
}

std::string to_string(const InitialFactorSpec& spec) {
  switch (spec.kind) {
    case InitialFactorSpec::Kind::Identity: return "ident";
    case InitialFactorSpec::Kind::Scaled: return "scaled:" + format_double(spec.scale);
    case InitialFactorSpec::Kind::File: return "file:" + spec.path;
  }
  return "?";
}

ParseResult parse_config(const std::string& text) {
  ExperimentConfig config;
  std::vector<ConfigIssue> issues;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({line_no, "", "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "preset") {
        config.preset = value;
      } else if (key == "dim") {
        config.dim = static_cast<int>(parse_long(value));
      } else if (key == "algorithms" || key == "algorithm") {
        config.algorithms.clear();
        for (const auto& name : split(value, ','))
          config.algorithms.push_back(parse_algorithm(name));
      } else if (key == "replications") {
        config.replications = parse_long(value);
      } else if (key == "rep_start") {
        config.rep_start = parse_long(value);
      } else if (key == "seed") {
        config.seed = parse_u64(value);
      } else if (key == "iterations") {
        config.iterations = parse_long(value);
      } else if (key == "burnin") {
        config.burn_in = parse_long(value);
      } else if (key == "thin") {
        config.thin = parse_long(value);
      } else if (key == "alpha_star") {
        config.alpha_star = parse_double(value);
      } else if (key == "gamma") {
        config.gamma = parse_double(value);
      } else if (key == "cov_gamma") {
        config.cov_gamma = parse_double(value);
      } else if (key == "dim_scaled") {
        config.dimension_scaled = parse_bool(value);
      } else if (key == "proposal") {
        config.proposal = parse_proposal(value);
      } else if (key == "s1") {
        config.initial_factor = parse_initial_factor(value);
      } else if (key == "eigen_bounds") {
        const auto parts = split(value, ',');
        if (parts.size() != 2) throw std::invalid_argument("expected 'lo, hi'");
        config.eigen_bounds = {parse_double(parts[0]), parse_double(parts[1])};
      } else if (key == "epsilon") {
        config.epsilon = parse_double(value);
      } else if (key == "checkpoint_every") {
        config.checkpoint_every = parse_long(value);
      } else if (key == "out") {
        config.out_dir = value;
      } else {
        issues.push_back({line_no, key, "unknown key"});
      }
    } catch (const std::exception& e) {
      issues.push_back({line_no, key, e.what()});
    }
  }

  for (auto& issue : validate_config(config)) issues.push_back(std::move(issue));
  ParseResult result;
  result.issues = std::move(issues);
  if (result.issues.empty()) result.config = std::move(config);
  return result;
}

std::vector<ConfigIssue> validate_config(const ExperimentConfig& config) {
  std::vector<ConfigIssue> issues;
  const auto fail = [&issues](const std::string& field, const std::string& message) {
    issues.push_back({0, field, message});
  };

  const PresetInfo* preset = find_preset(config.preset);
  if (preset == nullptr) {
    fail("preset", "unknown preset '" + config.preset + "'; available: " + preset_names());
  } else if (preset->dim_fixed && config.dim != 0 && config.dim != preset->default_dim) {
    fail("dim", "preset '" + config.preset + "' has fixed dimension " +
                    std::to_string(preset->default_dim));
  }
  if (config.dim < 0) fail("dim", "dimension must be positive");
  if (config.algorithms.empty()) fail("algorithms", "at least one algorithm required");
  for (std::size_t i = 0; i < config.algorithms.size(); ++i)
    for (std::size_t j = i + 1; j < config.algorithms.size(); ++j)
      if (config.algorithms[i] == config.algorithms[j])
        fail("algorithms", "duplicate algorithm; outputs would collide");
  if (config.replications < 1) fail("replications", "must be at least 1");
  if (config.rep_start < 0) fail("rep_start", "must be nonnegative");
  if (config.iterations < 1) fail("iterations", "must be at least 1");
  if (config.burn_in < 0) fail("burnin", "must be nonnegative");
  if (config.thin < 1) fail("thin", "must be at least 1");
  if (!(config.alpha_star > 0.0) || !(config.alpha_star < 1.0))
    fail("alpha_star", "must lie in (0, 1)");
  for (const auto& [name, value] :
       {std::pair<const char*, std::optional<double>>{"gamma", config.gamma},
        {"cov_gamma", config.cov_gamma}})
    if (value && (!(*value > 0.5) || !(*value <= 1.0)))
      fail(name, "schedule exponent must lie in (1/2, 1]");
  if (config.eigen_bounds) {
    const auto [lo, hi] = *config.eigen_bounds;
    if (!(lo > 0.0) || !(lo <= hi)) fail("eigen_bounds", "need 0 < lo <= hi");
  }
  if (config.epsilon < 0.0) fail("epsilon", "must be nonnegative");
  if (config.checkpoint_every < 0) fail("checkpoint_every", "must be nonnegative");
  if (config.initial_factor.kind == InitialFactorSpec::Kind::Scaled &&
      !(config.initial_factor.scale > 0.0))
    fail("s1", "scale must be positive");
  return issues;
}

std::vector<PresetInfo> list_presets() {
  return {
      {"student2d-paper",
       "coerced-acceptance benchmark on a heavy-tailed target without second moments",
       2, true,
       "bivariate Student, nu = 1, location [1, 2], shape [[0.2, 0.1], [0.1, 0.8]]; "
       "tracks the fraction outside the 90% HPD region (quadratic > 99)",
       {1.0, 1e-4, 1e4}},
      {"student-rand-d",
       "shape-recovery benchmark; reports the suboptimality factor b at checkpoints",
       10, false,
       "Student, nu = 1, location 0, shape M M^T with i.i.d. standard normal M "
       "drawn per replication",
       {1.0, 1e-4, 1e4}},
      {"gaussian-rand-d",
       "light-tailed baseline; reports proportions inside the 10/25/50/75/90% HPD regions",
       8, false,
       "Gaussian, mean 0, covariance M M^T drawn per replication; the chain starts "
       "at an exact draw from the target",
       {1.0, 1e-4, 1e4}},
      {"mixture-d",
       "bimodal stress test; reports per-coordinate means against the exact zero mean",
       2, false,
       "two-component Gaussian mixture, means +/-[4, 0, ..., 0], shared covariance "
       "diag(1, 100, ..., 100); the chain starts at the first component mean",
       {1.0}},
  };
}

std::uint64_t chain_stream_id(Algorithm algorithm, long replication) {
  return ((static_cast<std::uint64_t>(algorithm) + 1) << 32) |
         static_cast<std::uint64_t>(replication);
}

std::uint64_t setup_stream_id(long replication) {
  return (std::uint64_t{1} << 62) | static_cast<std::uint64_t>(replication);
}

ReplicationSetup make_replication_setup(const ExperimentConfig& config, long replication) {
  const PresetInfo* preset = find_preset(config.preset);
  if (preset == nullptr)
    throw ConfigError("unknown preset '" + config.preset + "'; available: " + preset_names());
  const Eigen::Index dim = config.dim > 0 ? config.dim : preset->default_dim;
  RngStream setup_rng(config.seed, setup_stream_id(replication));

  ReplicationSetup setup;
  if (config.preset == "student2d-paper") {
    Eigen::VectorXd mu(2);
    mu << 1.0, 2.0;
    Eigen::MatrixXd sigma(2, 2);
    sigma << 0.2, 0.1, 0.1, 0.8;
    setup.target = TargetModel::elliptical_student(mu, sigma, 1.0);
    setup.initial_point = mu;
    setup.b_reference = sigma;
    setup.options.hpd_levels = {0.9};
    setup.options.hpd_thresholds = {99.0};
  } else if (config.preset == "student-rand-d") {
    const SymmetricMatrix sigma = random_covariance(dim, setup_rng);
    setup.target = TargetModel::elliptical_student(Eigen::VectorXd::Zero(dim), sigma, 1.0);
    setup.initial_point = Eigen::VectorXd::Zero(dim);
    setup.b_reference = sigma;
  } else if (config.preset == "gaussian-rand-d") {
    const SymmetricMatrix sigma = random_covariance(dim, setup_rng);
    setup.target = TargetModel::gaussian(Eigen::VectorXd::Zero(dim), sigma);
    setup.initial_point = setup.target.sample(setup_rng);
    setup.b_reference = sigma;
    setup.options.hpd_levels = {0.1, 0.25, 0.5, 0.75, 0.9};
    for (double level : setup.options.hpd_levels)
      setup.options.hpd_thresholds.push_back(hpd_threshold(setup.target, level));
    setup.truth_means = Eigen::VectorXd::Zero(dim);
  } else if (config.preset == "mixture-d") {
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(dim);
    m1[0] = 4.0;
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(dim, 100.0);
    diag[0] = 1.0;
    const SymmetricMatrix sigma = diag.asDiagonal();
    setup.target = TargetModel::gaussian_mixture({0.5, 0.5}, {m1, -m1}, sigma);
    setup.initial_point = m1;
    setup.truth_means = Eigen::VectorXd::Zero(dim);
  } else {
    throw ConfigError("preset '" + config.preset + "' has no setup rule");
  }

  setup.options.checkpoint_every = config.checkpoint_every;
  if (setup.b_reference) {
    const SymmetricMatrix sigma = *setup.b_reference;
    setup.options.factor_statistic = [sigma](const LowerTriangularFactor& factor) {
      return suboptimality_b(factor.product(), sigma);
    };
  }
  return setup;
}

SamplerConfig make_sampler_config(const ExperimentConfig& config, Algorithm algorithm,
                                  const ReplicationSetup& setup) {
  const Eigen::Index dim = setup.target.dim();
  SamplerConfig sc;
  sc.algorithm = algorithm;
  sc.target_acceptance = config.alpha_star;
  sc.initial_point = setup.initial_point;
  switch (config.initial_factor.kind) {
    case InitialFactorSpec::Kind::Identity:
      sc.initial_factor = LowerTriangularFactor::identity(dim);
      break;
    case InitialFactorSpec::Kind::Scaled:
      sc.initial_factor = LowerTriangularFactor::scaled_identity(dim, config.initial_factor.scale);
      break;
    case InitialFactorSpec::Kind::File:
      sc.initial_factor = LowerTriangularFactor(load_matrix_csv(config.initial_factor.path));
      break;
  }
  const double gamma = config.gamma.value_or(2.0 / 3.0);
  sc.schedule.gamma = gamma;
  sc.schedule.dimension_scaled = config.dimension_scaled.value_or(algorithm == Algorithm::Ram);
  sc.covariance_schedule.gamma = config.cov_gamma.value_or(gamma);
  sc.covariance_schedule.dimension_scaled = false;
  sc.eigen_bounds = config.eigen_bounds;
  sc.am_regularization = config.epsilon;
  sc.burn_in = config.burn_in;
  sc.iterations = config.iterations;
  sc.proposal = config.proposal;
  return sc;
}

json summary_to_json(const ChainSummary& summary, const ExperimentConfig& config,
                     Algorithm algorithm, long replication, const ReplicationSetup& setup) {
  json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["preset"] = config.preset;
  j["algorithm"] = to_string(algorithm);
  j["dim"] = setup.target.dim();
  j["replication"] = replication;
  j["seed"] = config.seed;
  j["stream"] = chain_stream_id(algorithm, replication);
  j["iterations"] = summary.iterations;
  j["burn_in"] = summary.burn_in;
  j["acceptance_rate"] = summary.acceptance_rate;
  j["coordinate_means"] =
      std::vector<double>(summary.coordinate_means.begin(), summary.coordinate_means.end());
  if (!summary.hpd_levels.empty()) {
    j["hpd"] = {{"levels", summary.hpd_levels},
                {"thresholds", summary.hpd_thresholds},
                {"inside_fractions", summary.hpd_inside}};
  }
  if (summary.hpd_outside_fraction) j["hpd_outside_fraction"] = *summary.hpd_outside_fraction;
  json checkpoints;
  checkpoints["iteration"] = summary.checkpoint_iterations;
  checkpoints["log_s11"] = summary.checkpoint_log_s11;
  if (!summary.checkpoint_factor_stat.empty())
    checkpoints["factor_stat"] = summary.checkpoint_factor_stat;
  j["checkpoints"] = std::move(checkpoints);
  const auto& f = summary.factor_final.matrix();
  std::vector<std::vector<double>> factor(f.rows());
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    factor[i].assign(f.row(i).begin(), f.row(i).end());
  j["factor_final"] = std::move(factor);
  json truth;
  if (setup.truth_means.size() > 0)
    truth["coordinate_means"] =
        std::vector<double>(setup.truth_means.begin(), setup.truth_means.end());
  if (setup.b_reference) {
    std::vector<std::vector<double>> shape(setup.b_reference->rows());
    for (Eigen::Index i = 0; i < setup.b_reference->rows(); ++i)
      shape[i].assign(setup.b_reference->row(i).begin(), setup.b_reference->row(i).end());
    truth["shape"] = std::move(shape);
  }
  if (setup.target.has_metadata()) {
    truth["mean"] = std::vector<double>(setup.target.true_mean().begin(),
                                        setup.target.true_mean().end());
  }
  if (!truth.empty()) j["truth"] = std::move(truth);
  return j;
}

json run_replication(const ExperimentConfig& config, Algorithm algorithm, long replication,
                     const std::string& csv_path) {
  const ReplicationSetup setup = make_replication_setup(config, replication);
  const SamplerConfig sampler_config = make_sampler_config(config, algorithm, setup);
  RngStream rng(config.seed, chain_stream_id(algorithm, replication));

  std::ofstream csv;
  RecordSink sink;
  if (!csv_path.empty()) {
    csv.open(csv_path, std::ios::binary);
    if (!csv) throw ConfigError("cannot write '" + csv_path + "'");
    const Eigen::Index dim = setup.target.dim();
    csv << "n,accepted,alpha";
    for (Eigen::Index i = 1; i <= dim; ++i) csv << ",x_" << i;
    for (Eigen::Index i = 1; i <= dim; ++i) csv << ",sdiag_" << i;
    csv << "\n";
    const long thin = config.thin;
    sink = [&csv, thin](const IterationRecord& record) {
      if ((record.iteration - 1) % thin != 0) return;
      csv << record.iteration << ',' << (record.accepted ? 1 : 0) << ','
          << format_double(record.alpha);
      for (double v : record.x) csv << ',' << format_double(v);
      for (double v : record.factor_diagonal) csv << ',' << format_double(v);
      csv << '\n';
    };
  }

  const ChainSummary summary =
      run_chain(sampler_config, setup.target, rng, sink, setup.options);
  return summary_to_json(summary, config, algorithm, replication, setup);
}

json aggregate_summaries(const std::vector<json>& summaries) {
  if (summaries.empty()) throw EmptyInput("aggregate_summaries: no summaries");
  const json& first = summaries.front();

  json agg;
  agg["schema_version"] = kSummarySchemaVersion;
  agg["preset"] = first["preset"];
  agg["algorithm"] = first["algorithm"];
  agg["dim"] = first["dim"];
  agg["seed"] = first["seed"];
  agg["replications"] = summaries.size();

  std::vector<double> acceptance;
  for (const auto& s : summaries) acceptance.push_back(s["acceptance_rate"].get<double>());
  agg["acceptance_rate"] = band(std::move(acceptance));

  if (std::all_of(summaries.begin(), summaries.end(),
                  [](const json& s) { return s.contains("hpd_outside_fraction"); })) {
    std::vector<double> outside;
    for (const auto& s : summaries) outside.push_back(s["hpd_outside_fraction"].get<double>());
    agg["hpd_outside_fraction"] = band(std::move(outside));
  }

  json checkpoints;
  checkpoints["iteration"] = first["checkpoints"]["iteration"];
  if (!first["checkpoints"]["log_s11"].empty())
    checkpoints["log_s11"] = checkpoint_band(summaries, "log_s11");
  if (first["checkpoints"].contains("factor_stat"))
    checkpoints["factor_stat"] = checkpoint_band(summaries, "factor_stat");
  agg["checkpoints"] = std::move(checkpoints);

  if (first.contains("hpd")) {
    const std::vector<double> levels = first["hpd"]["levels"].get<std::vector<double>>();
    std::vector<std::vector<double>> rows;
    for (const auto& s : summaries)
      rows.push_back(s["hpd"]["inside_fractions"].get<std::vector<double>>());
    const RmseReport report = rmse_report(rows, levels);
    agg["rmse_hpd"] = {{"levels", levels},
                       {"per_level", report.per_statistic},
                       {"overall", report.overall},
                       {"overall_x100", 100.0 * report.overall}};
  }

  if (first.contains("truth") && first["truth"].contains("coordinate_means")) {
    const std::vector<double> truths = first["truth"]["coordinate_means"].get<std::vector<double>>();
    std::vector<std::vector<double>> rows;
    for (const auto& s : summaries)
      rows.push_back(s["coordinate_means"].get<std::vector<double>>());
    const RmseReport report = rmse_report(rows, truths);
    json means;
    means["per_coordinate"] = report.per_statistic;
    means["first_coordinate"] = report.per_statistic.front();
    if (report.per_statistic.size() > 1) {
      double acc = 0.0;
      for (std::size_t j = 1; j < report.per_statistic.size(); ++j)
        acc += report.per_statistic[j] * report.per_statistic[j];
      means["other_coordinates"] =
          std::sqrt(acc / static_cast<double>(report.per_statistic.size() - 1));
    }
    means["overall"] = report.overall;
    agg["rmse_means"] = std::move(means);
  }
  return agg;
}

void parallel_for_index(long count, const std::function<void(long)>& body) {
  if (count <= 0) return;
  unsigned hardware = std::thread::hardware_concurrency();
  if (hardware == 0) hardware = 1;
  const long workers = std::min<long>(count, static_cast<long>(hardware));
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (long w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

int run_experiment(const ExperimentConfig& config) {
  const auto issues = validate_config(config);
  if (!issues.empty()) {
    json report;
    report["error"] = "invalid configuration";
    for (const auto& issue : issues)
      report["issues"].push_back(
          {{"line", issue.line}, {"field", issue.field}, {"message", issue.message}});
    std::cerr << report.dump(2) << "\n";
    return 2;
  }

  try {
    fs::create_directories(config.out_dir);
    for (Algorithm algorithm : config.algorithms) {
      const std::string name = to_string(algorithm);
      std::vector<json> summaries(config.replications);
      parallel_for_index(config.replications, [&](long i) {
        const long rep = config.rep_start + i;
        char tag[32];
        std::snprintf(tag, sizeof tag, "%s-rep%03ld", name.c_str(), rep);
        const fs::path csv = fs::path(config.out_dir) / (std::string(tag) + ".csv");
        json summary = run_replication(config, algorithm, rep, csv.string());
        write_text(fs::path(config.out_dir) / (std::string(tag) + "-summary.json"),
                   summary.dump(2) + "\n");
        summaries[i] = std::move(summary);
      });
      const json aggregate = aggregate_summaries(summaries);
      write_text(fs::path(config.out_dir) / (name + "-aggregate.json"), aggregate.dump(2) + "\n");
      std::cerr << "[" << name << "] " << config.replications << " replication(s) -> "
                << config.out_dir << "\n";
    }
  } catch (const std::exception& e) {
    json report;
    report["error"] = e.what();
    std::cerr << report.dump(2) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ramcmc
