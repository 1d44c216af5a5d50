#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmm/estimate.hpp"
#include "lmm/model.hpp"
#include "lmm/sampling.hpp"
#include "lmm/simulate.hpp"

namespace lmm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One noise level of the study; the latent dynamics stay fixed across
// scenarios and only Lambda changes.
struct Scenario {
  std::string name;
  Eigen::MatrixXd Lambda;
};

/**
 * Full description of a Monte Carlo experiment: the data-generating OU
 * process, the parameter boxes handed to the optimizers, the sampling
 * scheme, the noise scenarios, and run controls. Loadable from a JSON
 * config file (see load_experiment_config and the README schema).
 */
struct ExperimentConfig {
  OUSpec model;
  ParameterBox alpha_box;
  ParameterBox beta_box;

  long n = 100000;
  double h = 0.0;       // ignored when h_rule is set
  std::string h_rule;   // "" or "n^-0.7" style power rule
  double tau = 2.0;
  std::optional<long> p_override;

  NoiseDistribution noise = NoiseDistribution::gaussian;
  std::vector<Scenario> scenarios;

  long replications = 200;
  std::uint64_t seed = 1;
  bool method_lmm = true;
  bool method_lga = false;
  bool run_noise_test = true;
  bool compute_stderr = false;
  int threads = 0;  // 0 = hardware concurrency
  std::string output_prefix;

  // test hook: the replication with this index fails outright
  std::optional<long> inject_failure_at;

  double resolved_h() const;  // applies h_rule when set
  void validate() const;
};

// Everything one replication produced; estimates are kept so aggregation
// can be audited after the fact.
struct ReplicationRecord {
  long rep = -1;
  bool lmm_ok = false;
  bool lga_ok = false;
  bool test_ok = false;
  Eigen::VectorXd lmm_lambda;  // vech(Lambda_hat)
  Eigen::VectorXd lmm_alpha, lmm_beta;
  Eigen::VectorXd lga_alpha, lga_beta;
  Eigen::VectorXd path_avg_c;  // vech of c(X, alpha_true) averaged over the path
  double z = 0.0;
  double p_value = 1.0;
  std::string failure_reason;
};

struct ParamSummary {
  std::string scenario;
  std::string method;     // "lmm" or "lga"
  std::string parameter;  // Lambda11, ..., alpha1, ..., beta1, ...
  double true_value = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  long failures = 0;
};

struct RejectionSummary {
  std::string scenario;
  double level = 0.0;
  long rejections = 0;
  long valid = 0;  // replications with a usable statistic
  double rate = 0.0;
};

struct ScenarioResults {
  std::string name;
  std::vector<ReplicationRecord> records;  // indexed by replication
  long lmm_failures = 0;
  long lga_failures = 0;
  long test_failures = 0;
};

struct ExperimentReport {
  SamplingScheme scheme;
  std::uint64_t seed = 0;
  long replications = 0;
  std::vector<std::string> methods;
  std::string noise_distribution;
  double wall_seconds = 0.0;

  std::vector<ParamSummary> rows;
  std::vector<RejectionSummary> rejections;
  std::vector<ScenarioResults> scenarios;
};

/**
 * Run the experiment: for every scenario x replication, simulate a latent
 * path, contaminate it, and apply the requested estimators and the noise
 * test. Replications are seeded individually (seed mixed with the
 * replication index, not the scenario, so scenarios share randomness) and
 * run on a thread pool; results are deterministic for any thread count.
 * Failed replications are excluded from the aggregates and counted.
 */
ExperimentReport run_experiment(const ExperimentConfig& cfg);

enum class ReportFormat { csv, json };

/**
 * Write the aggregate tables. csv: dest is a prefix producing
 * <dest>_estimates.csv (columns scenario,method,parameter,true_value,
 * mean,sd,failures) and <dest>_rejections.csv. json: dest is the file
 * path. Values are written in full precision.
 */
void write_report(const ExperimentReport& report, ReportFormat format,
                  const std::string& dest);

// Parse an estimates CSV back (round-trip checking and downstream tools).
std::vector<ParamSummary> read_param_summaries(const std::string& path);

// Load an experiment from the JSON schema documented in the README.
ExperimentConfig load_experiment_config(const std::string& path);

// Load just the OU spec from a JSON file holding {B, mu, A, x0} at the top
// level or under a "model" key.
OUSpec load_model_spec(const std::string& path);

}  // namespace lmm
