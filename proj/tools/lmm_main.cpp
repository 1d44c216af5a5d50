#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lmm/csvio.hpp"
#include "lmm/estimate.hpp"
#include "lmm/harness.hpp"
#include "lmm/noisetest.hpp"
#include "lmm/rng.hpp"
#include "lmm/simulate.hpp"

namespace {

using namespace lmm;

OUSpec demo_spec() {
  OUSpec s;
  s.B.resize(2, 2);
  s.B << -1.0, -0.1, -0.1, -1.0;
  s.mu_shift.resize(2);
  s.mu_shift << 1.0, 1.0;
  s.A.resize(2, 2);
  s.A << 1.0, 0.1, 0.1, 1.0;
  s.x0.resize(2);
  s.x0 << 1.0, 1.0;
  return s;
}

double resolve_h(long n, double h, const std::string& rule) {
  if (h > 0.0) return h;
  ExperimentConfig tmp;
  tmp.n = n;
  tmp.h_rule = rule.empty() ? "n^-0.7" : rule;
  return tmp.resolved_h();
}

Eigen::MatrixXd lambda_from_values(const std::vector<double>& vals, int d) {
  if (vals.empty()) return Eigen::MatrixXd::Zero(d, d);
  if (vals.size() == 1) return vals[0] * Eigen::MatrixXd::Identity(d, d);
  const std::size_t m = vech_size(d);
  if (vals.size() != m)
    throw ValidationError("--lambda needs 1 value or " + std::to_string(m) +
                          " (lower triangle, column-major), got " +
                          std::to_string(vals.size()));
  Eigen::VectorXd v(static_cast<long>(m));
  for (std::size_t i = 0; i < m; ++i) v(static_cast<long>(i)) = vals[i];
  return unvech(v, d);
}

ParameterBox box_from_pairs(const std::vector<double>& vals, int dim,
                            const std::string& flag) {
  if (static_cast<int>(vals.size()) != 2 * dim)
    throw ValidationError(flag + " needs " + std::to_string(2 * dim) +
                          " values (lo1,hi1,lo2,hi2,...), got " +
                          std::to_string(vals.size()));
  ParameterBox box;
  box.lower.resize(dim);
  box.upper.resize(dim);
  for (int i = 0; i < dim; ++i) {
    box.lower(i) = vals[2 * i];
    box.upper(i) = vals[2 * i + 1];
  }
  box.validate();
  return box;
}

NoiseDistribution parse_dist(const std::string& s) {
  if (s == "gaussian") return NoiseDistribution::gaussian;
  if (s == "scaled_uniform") return NoiseDistribution::scaled_uniform;
  if (s == "scaled_rademacher") return NoiseDistribution::scaled_rademacher;
  throw ValidationError("unknown noise distribution '" + s + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (long i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

void print_matrix(const std::string& label, const Eigen::MatrixXd& m) {
  std::cout << label << ":\n";
  for (long i = 0; i < m.rows(); ++i) {
    std::cout << " ";
    for (long j = 0; j < m.cols(); ++j) std::cout << " " << fmt(m(i, j));
    std::cout << "\n";
  }
}

void print_vector(const std::string& label, const Eigen::VectorXd& v) {
  std::cout << label << ":";
  for (long i = 0; i < v.size(); ++i) std::cout << " " << fmt(v(i));
  std::cout << "\n";
}

int cmd_simulate(long n, double h_flag, const std::string& h_rule,
                 std::uint64_t seed, const std::vector<double>& lambda_vals,
                 const std::string& dist, const std::string& model_config,
                 int substeps, bool euler, const std::string& out) {
  const OUSpec spec = model_config.empty() ? demo_spec() : load_model_spec(model_config);
  const DiffusionModel model = make_ou_model(spec);
  const double h = resolve_h(n, h_flag, h_rule);

  PathConfig pc;
  pc.n = n;
  pc.h = h;
  pc.substeps = substeps;
  pc.exact_ou = !euler;
  pc.seed = mix_seed(seed, kStreamWiener);

  const Eigen::MatrixXd latent = simulate_latent(model, spec.beta(), spec.alpha(), pc);
  const Eigen::MatrixXd lam = lambda_from_values(lambda_vals, model.state_dim);
  const Eigen::MatrixXd y =
      add_noise(latent, NoiseSpec::make(lam, parse_dist(dist)), mix_seed(seed, kStreamNoise));
  write_observations_csv(out, y, h);
  std::cout << "wrote " << out << ": d=" << y.rows() << ", n=" << n
            << " steps, h=" << fmt(h) << ", Lambda11=" << fmt(lam(0, 0)) << "\n";
  return 0;
}

int cmd_estimate(const std::string& input, double h_flag, double tau, long p_override,
                 const std::string& model_config, const std::vector<double>& box_alpha,
                 const std::vector<double>& box_beta, const std::string& method,
                 bool with_stderr, double fourth_moment, bool as_json,
                 const std::string& out) {
  const LoadedSeries data = read_observations(input);
  const int d = static_cast<int>(data.y.rows());
  double h = h_flag;
  if (!(h > 0.0)) {
    if (!data.h) throw ValidationError("no t column in " + input + "; pass --h");
    h = *data.h;
  }
  const long n = data.y.cols() - 1;

  OUSpec spec;
  if (!model_config.empty()) {
    spec = load_model_spec(model_config);
    if (spec.dim() != d)
      throw ValidationError("model dimension " + std::to_string(spec.dim()) +
                            " does not match data dimension " + std::to_string(d));
  } else {
    spec.B = -Eigen::MatrixXd::Identity(d, d);
    spec.mu_shift = Eigen::VectorXd::Zero(d);
    spec.A = Eigen::MatrixXd::Identity(d, d);
    spec.x0 = Eigen::VectorXd::Zero(d);
  }
  const DiffusionModel model = make_ou_model(spec);

  ParameterBoxes boxes;
  boxes.alpha = box_from_pairs(box_alpha, model.alpha_dim, "--box-alpha");
  boxes.beta = box_from_pairs(box_beta, model.beta_dim, "--box-beta");

  const SamplingScheme scheme = p_override > 0
                                    ? derive_scheme_with_p(n, h, tau, p_override)
                                    : derive_scheme(n, h, tau);
  EstimateOptions opts;
  opts.compute_stderr = with_stderr;
  opts.noise_fourth_moment = Eigen::VectorXd::Constant(d, fourth_moment);

  EstimationResult res;
  if (method == "lmm") {
    res = adaptive_estimate(data.y, scheme, model, boxes, opts);
  } else if (method == "lga") {
    if (with_stderr) throw ValidationError("--stderr is only available for --method lmm");
    res = lga_estimate(data.y, h, model, boxes, opts);
  } else {
    throw ValidationError("unknown method '" + method + "' (expected lmm or lga)");
  }

  if (as_json || !out.empty()) {
    nlohmann::json j;
    j["scheme"] = {{"n", scheme.n}, {"h", scheme.h},         {"tau", scheme.tau},
                   {"p", scheme.p}, {"k", scheme.k},         {"delta", scheme.delta}};
    j["method"] = method;
    if (method == "lmm") j["lambda"] = matrix_json(res.Lambda_hat);
    j["alpha"] = vector_json(res.alpha_hat);
    j["beta"] = vector_json(res.beta_hat);
    j["alpha_on_boundary"] = res.alpha_on_boundary;
    j["beta_on_boundary"] = res.beta_on_boundary;
    j["stage_alpha"] = {{"objective", res.stage_alpha.objective},
                        {"iterations", res.stage_alpha.iterations},
                        {"converged", res.stage_alpha.converged}};
    j["stage_beta"] = {{"objective", res.stage_beta.objective},
                       {"iterations", res.stage_beta.iterations},
                       {"converged", res.stage_beta.converged}};
    if (res.std_errors) {
      j["se_lambda"] = vector_json(res.std_errors->lambda);
      j["se_alpha"] = vector_json(res.std_errors->alpha);
      j["se_beta"] = vector_json(res.std_errors->beta);
    }
    const std::string text = j.dump(2);
    if (!out.empty()) {
      std::ofstream of(out);
      if (!of) throw DataError("cannot write " + out);
      of << text << "\n";
    }
    if (as_json || out.empty()) std::cout << text << "\n";
    if (!out.empty() && !as_json) std::cout << "wrote " << out << "\n";
    return 0;
  }

  std::cout << "scheme: n=" << scheme.n << " h=" << fmt(scheme.h) << " tau=" << scheme.tau
            << " p=" << scheme.p << " k=" << scheme.k << " delta=" << fmt(scheme.delta)
            << "\n";
  if (method == "lmm") print_matrix("Lambda_hat", res.Lambda_hat);
  print_vector("alpha_hat", res.alpha_hat);
  print_vector("beta_hat", res.beta_hat);
  std::cout << "stage alpha: objective=" << fmt(res.stage_alpha.objective)
            << (res.stage_alpha.converged ? " converged" : " NOT converged")
            << (res.alpha_on_boundary ? " (on boundary)" : "") << "\n";
  std::cout << "stage beta: objective=" << fmt(res.stage_beta.objective)
            << (res.stage_beta.converged ? " converged" : " NOT converged")
            << (res.beta_on_boundary ? " (on boundary)" : "") << "\n";
  if (res.std_errors) {
    print_vector("se(vech Lambda)", res.std_errors->lambda);
    print_vector("se(alpha)", res.std_errors->alpha);
    print_vector("se(beta)", res.std_errors->beta);
  }
  return 0;
}

int cmd_test(const std::string& input, double h_flag, double tau, long p_override,
             double level, bool as_json) {
  const LoadedSeries data = read_observations(input);
  double h = h_flag;
  if (!(h > 0.0)) {
    if (!data.h) throw ValidationError("no t column in " + input + "; pass --h");
    h = *data.h;
  }
  const long n = data.y.cols() - 1;
  const SamplingScheme scheme = p_override > 0
                                    ? derive_scheme_with_p(n, h, tau, p_override)
                                    : derive_scheme(n, h, tau);
  const NoiseTestResult r = noise_test(data.y, scheme);
  const bool reject = r.reject_at(level);
  if (as_json) {
    nlohmann::json j;
    j["z"] = r.z;
    j["p_value"] = r.p_value;
    j["level"] = level;
    j["reject"] = reject;
    j["scheme"] = {{"n", scheme.n}, {"p", scheme.p}, {"k", scheme.k}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "z = " << fmt(r.z) << "\n";
  if (r.p_value < 1e-300)
    std::cout << "p < 1e-300\n";
  else
    std::cout << "p = " << fmt(r.p_value) << "\n";
  std::cout << (reject ? "reject" : "do not reject")
            << " the no-noise hypothesis at level " << fmt(level) << "\n";
  return 0;
}

int cmd_mc(const std::string& config_path, int threads, std::uint64_t seed_flag,
           bool seed_given, const std::string& output_flag, bool full_scale) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (threads > 0) cfg.threads = threads;
  if (seed_given) cfg.seed = seed_flag;
  if (!output_flag.empty()) cfg.output_prefix = output_flag;
  if (full_scale) {
    cfg.n = 1000000;
    cfg.h = 0.0;
    cfg.h_rule = "n^-0.7";
    cfg.replications = 1000;
  }

  const ExperimentReport report = run_experiment(cfg);

  std::cout << "scheme: n=" << report.scheme.n << " h=" << fmt(report.scheme.h)
            << " tau=" << report.scheme.tau << " p=" << report.scheme.p
            << " k=" << report.scheme.k << " delta=" << fmt(report.scheme.delta) << "\n";
  std::cout << "replications=" << report.replications << " seed=" << report.seed
            << " wall=" << fmt(report.wall_seconds) << "s\n\n";
  std::printf("%-14s %-5s %-10s %13s %13s %13s %9s\n", "scenario", "method",
              "parameter", "true", "mean", "sd", "failures");
  for (const ParamSummary& r : report.rows)
    std::printf("%-14s %-5s %-10s %13.6g %13.6g %13.6g %9ld\n", r.scenario.c_str(),
                r.method.c_str(), r.parameter.c_str(), r.true_value, r.mean, r.sd,
                r.failures);
  if (!report.rejections.empty()) {
    std::printf("\n%-14s %-7s %12s %8s %8s\n", "scenario", "level", "rejections",
                "valid", "rate");
    for (const RejectionSummary& r : report.rejections)
      std::printf("%-14s %-7g %12ld %8ld %8.4f\n", r.scenario.c_str(), r.level,
                  r.rejections, r.valid, r.rate);
  }

  if (!cfg.output_prefix.empty()) {
    write_report(report, ReportFormat::csv, cfg.output_prefix);
    write_report(report, ReportFormat::json, cfg.output_prefix + ".json");
    std::cout << "\nwrote " << cfg.output_prefix << "_estimates.csv, "
              << cfg.output_prefix << "_rejections.csv, " << cfg.output_prefix
              << ".json\n";
  }

  long failed = 0, attempted = 0;
  for (const ScenarioResults& s : report.scenarios) {
    if (cfg.method_lmm) {
      failed += s.lmm_failures;
      attempted += report.replications;
    }
    if (cfg.method_lga) {
      failed += s.lga_failures;
      attempted += report.replications;
    }
    if (cfg.run_noise_test) {
      failed += s.test_failures;
      attempted += report.replications;
    }
  }
  if (attempted > 0 && static_cast<double>(failed) > 0.05 * static_cast<double>(attempted)) {
    std::cerr << "failure rate " << failed << "/" << attempted << " exceeds 5%\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation of noisily observed ergodic diffusions"};
  app.require_subcommand(1);
  // --h is the observation step everywhere, so help has no short flag
  app.set_help_flag("--help", "print help and exit");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate an OU path with observation noise");
  sim->set_help_flag("--help", "print help and exit");
  long sim_n = 100000;
  double sim_h = 0.0;
  std::string sim_h_rule;
  std::uint64_t sim_seed = 1;
  std::vector<double> sim_lambda;
  std::string sim_dist = "gaussian";
  std::string sim_model;
  int sim_substeps = 8;
  bool sim_euler = false;
  std::string sim_out = "observations.csv";
  sim->add_option("--n", sim_n, "observation steps")->capture_default_str();
  sim->add_option("--h", sim_h, "observation step size (default: n^-0.7)");
  sim->add_option("--h-rule", sim_h_rule, "power rule like n^-0.7");
  sim->add_option("--seed", sim_seed, "base seed")->capture_default_str();
  sim->add_option("--lambda", sim_lambda,
                  "noise variance: one value (scalar matrix) or the lower triangle "
                  "column-major")
      ->delimiter(',');
  sim->add_option("--noise-dist", sim_dist,
                  "gaussian | scaled_uniform | scaled_rademacher")
      ->capture_default_str();
  sim->add_option("--model-config", sim_model, "JSON file with B, mu, A, x0");
  sim->add_option("--substeps", sim_substeps, "Euler substeps per observation")
      ->capture_default_str();
  sim->add_flag("--euler", sim_euler, "force Euler stepping instead of the exact OU law");
  sim->add_option("--out", sim_out, "output CSV")->capture_default_str();

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate noise variance, diffusion and drift");
  est->set_help_flag("--help", "print help and exit");
  std::string est_input;
  double est_h = 0.0, est_tau = 2.0, est_m4 = 3.0;
  long est_p = 0;
  std::string est_model, est_method = "lmm", est_out;
  std::vector<double> est_box_a, est_box_b;
  bool est_stderr = false, est_json = false;
  est->add_option("--input", est_input, "observations CSV")->required();
  est->add_option("--h", est_h, "step size (required without a t column)");
  est->add_option("--tau", est_tau, "block tuning exponent in (1,2]")->capture_default_str();
  est->add_option("--p-override", est_p, "force the block length");
  std::string est_family = "ou";
  est->add_option("--model", est_family, "model family")
      ->capture_default_str()
      ->check(CLI::IsMember({"ou"}));
  est->add_option("--model-config", est_model, "JSON file with B, mu, A, x0");
  est->add_option("--box-alpha", est_box_a, "diffusion box lo1,hi1,lo2,hi2,...")
      ->delimiter(',')
      ->required();
  est->add_option("--box-beta", est_box_b, "drift box lo1,hi1,lo2,hi2,...")
      ->delimiter(',')
      ->required();
  est->add_option("--method", est_method, "lmm (block means) | lga (raw increments)")
      ->capture_default_str();
  est->add_flag("--stderr", est_stderr, "report plug-in standard errors");
  est->add_option("--fourth-moment", est_m4, "noise E[eps^4] for the plug-in")
      ->capture_default_str();
  est->add_flag("--json", est_json, "print JSON");
  est->add_option("--out", est_out, "write the JSON report here");

  // test
  auto* tst = app.add_subcommand("test", "Test for the presence of observation noise");
  tst->set_help_flag("--help", "print help and exit");
  std::string tst_input;
  double tst_h = 0.0, tst_tau = 2.0, tst_level = 0.05;
  long tst_p = 0;
  bool tst_json = false;
  tst->add_option("--input", tst_input, "observations CSV")->required();
  tst->add_option("--h", tst_h, "step size (required without a t column)");
  tst->add_option("--tau", tst_tau, "block tuning exponent in (1,2]")->capture_default_str();
  tst->add_option("--p-override", tst_p, "force the block length");
  tst->add_option("--level", tst_level, "test level")->capture_default_str();
  tst->add_flag("--json", tst_json, "print JSON");

  // mc
  auto* mc = app.add_subcommand("mc", "Run a Monte Carlo experiment from a config file");
  mc->set_help_flag("--help", "print help and exit");
  std::string mc_config, mc_output;
  int mc_threads = 0;
  std::uint64_t mc_seed = 0;
  bool mc_full = false;
  mc->add_option("config", mc_config, "experiment JSON")->required();
  mc->add_option("--threads", mc_threads, "worker threads (0 = all cores)");
  auto* mc_seed_opt = mc->add_option("--seed", mc_seed, "override the config seed");
  mc->add_option("--output", mc_output, "override the output prefix");
  mc->add_flag("--full-scale", mc_full,
               "n=10^6, h=n^-0.7, 1000 replications (long run)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage problems are hard errors (exit 1); --help stays exit 0
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_n, sim_h, sim_h_rule, sim_seed, sim_lambda, sim_dist,
                          sim_model, sim_substeps, sim_euler, sim_out);
    if (est->parsed())
      return cmd_estimate(est_input, est_h, est_tau, est_p, est_model, est_box_a,
                          est_box_b, est_method, est_stderr, est_m4, est_json, est_out);
    if (tst->parsed())
      return cmd_test(tst_input, tst_h, tst_tau, tst_p, tst_level, tst_json);
    if (mc->parsed())
      return cmd_mc(mc_config, mc_threads, mc_seed, mc_seed_opt->count() > 0, mc_output,
                    mc_full);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
