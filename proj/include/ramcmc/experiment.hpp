#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ramcmc/analysis.hpp"
#include "ramcmc/sampler.hpp"

namespace ramcmc {

using json = nlohmann::ordered_json;

constexpr int kSummarySchemaVersion = 1;

/// Initial shape factor selector: identity, scaled identity, or a dense
/// lower-triangular matrix loaded from a CSV file.
struct InitialFactorSpec {
  enum class Kind { Identity, Scaled, File };
  Kind kind = Kind::Identity;
  double scale = 1.0;
  std::string path;
};

InitialFactorSpec parse_initial_factor(const std::string& text);
std::string to_string(const InitialFactorSpec& spec);

struct ExperimentConfig {
  std::string preset = "student2d-paper";
  int dim = 0;  // 0 = preset default
  std::vector<Algorithm> algorithms = {Algorithm::Ram};
  long replications = 1;
  long rep_start = 0;
  std::uint64_t seed = 0;
  long iterations = 400000;
  long burn_in = 100000;
  long thin = 10;
  double alpha_star = 0.234;
  std::optional<double> gamma;
  std::optional<double> cov_gamma;
  std::optional<bool> dimension_scaled;
  ProposalSpec proposal;
  InitialFactorSpec initial_factor;
  std::optional<std::pair<double, double>> eigen_bounds;
  double epsilon = 0.0;
  long checkpoint_every = 1000;
  std::string out_dir = "out";
};

struct ConfigIssue {
  int line = 0;  // 0 for validation issues not tied to a line
  std::string field;
  std::string message;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigIssue> issues;
};

/// Parses the key-value experiment format ('key = value' lines, '#' comments)
/// and validates; reports every issue found, not just the first.
ParseResult parse_config(const std::string& text);

std::vector<ConfigIssue> validate_config(const ExperimentConfig& config);

struct PresetInfo {
  std::string name;
  std::string description;
  int default_dim = 0;
  bool dim_fixed = false;
  std::string parameters;
  std::vector<double> initial_factor_variants;  // suggested s1 = c * I scales
};

std::vector<PresetInfo> list_presets();

/// Per-replication experiment ingredients, derived deterministically from
/// (config, replication index) through a dedicated setup stream so that every
/// algorithm sees the same target and starting point.
struct ReplicationSetup {
  TargetModel target;
  Eigen::VectorXd initial_point;
  SummaryOptions options;
  std::optional<SymmetricMatrix> b_reference;
  Eigen::VectorXd truth_means;  // empty when the target mean is unknown
};

ReplicationSetup make_replication_setup(const ExperimentConfig& config, long replication);

SamplerConfig make_sampler_config(const ExperimentConfig& config, Algorithm algorithm,
                                  const ReplicationSetup& setup);

std::uint64_t chain_stream_id(Algorithm algorithm, long replication);
std::uint64_t setup_stream_id(long replication);

/// Runs one replication; when csv_path is nonempty the thinned chain records
/// are streamed there. Returns the summary as JSON.
json run_replication(const ExperimentConfig& config, Algorithm algorithm, long replication,
                     const std::string& csv_path);

/// Medians and 10%/90% percentile bands over per-replication summaries, plus
/// RMSE tables where truths are known. Pure function of the summary JSONs.
json aggregate_summaries(const std::vector<json>& summaries);

/// Runs every (algorithm, replication) pair on a bounded worker pool and
/// persists chain CSVs, per-replication summaries and per-algorithm
/// aggregates under config.out_dir. Returns a process exit status.
int run_experiment(const ExperimentConfig& config);

/// Index-parallel helper; deterministic output placement is the caller's job.
void parallel_for_index(long count, const std::function<void(long)>& body);

json summary_to_json(const ChainSummary& summary, const ExperimentConfig& config,
                     Algorithm algorithm, long replication, const ReplicationSetup& setup);

}  // namespace ramcmc
