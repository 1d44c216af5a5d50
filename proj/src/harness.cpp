#include "lmm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lmm/csvio.hpp"
#include "lmm/noisetest.hpp"
#include "lmm/rng.hpp"

namespace lmm {

namespace {

constexpr double kTestLevels[] = {0.05, 0.01, 0.001};

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> lambda_names(int d) {
  std::vector<std::string> out;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i)
      out.push_back("Lambda" + std::to_string(i + 1) + std::to_string(j + 1));
  return out;
}

std::vector<std::string> indexed_names(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

void note_failure(ReplicationRecord& rec, const std::string& what) {
  if (!rec.failure_reason.empty()) rec.failure_reason += "; ";
  rec.failure_reason += what;
}

bool stage_usable(const EstimationResult& r) {
  return std::isfinite(r.stage_alpha.objective) && std::isfinite(r.stage_beta.objective) &&
         r.alpha_hat.allFinite() && r.beta_hat.allFinite();
}

Eigen::VectorXd path_average_c(const DiffusionModel& model, const Eigen::MatrixXd& latent,
                               const Eigen::VectorXd& alpha, long n) {
  if (model.diffusion_state_independent)
    return vech(c_matrix(model, model.x0, alpha));
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(model.state_dim, model.state_dim);
  for (long i = 0; i < n; ++i) acc += c_matrix(model, latent.col(i), alpha);
  return vech(Eigen::MatrixXd(acc / static_cast<double>(n)));
}

void run_replication(const ExperimentConfig& cfg, const DiffusionModel& model,
                     const SamplingScheme& scheme, const Eigen::VectorXd& alpha_true,
                     const Eigen::VectorXd& beta_true, const Scenario& sc, long rep,
                     ReplicationRecord& rec) {
  rec.rep = rep;
  const std::uint64_t rep_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(rep));
  if (cfg.inject_failure_at && *cfg.inject_failure_at == rep) {
    rec.failure_reason = "injected failure";
    return;
  }

  const double h = cfg.resolved_h();
  Eigen::MatrixXd raw;
  try {
    PathConfig pc;
    pc.n = cfg.n;
    pc.h = h;
    pc.seed = mix_seed(rep_seed, kStreamWiener);
    const Eigen::MatrixXd latent = simulate_latent(model, beta_true, alpha_true, pc);
    rec.path_avg_c = path_average_c(model, latent, alpha_true, cfg.n);
    raw = add_noise(latent, NoiseSpec::make(sc.Lambda, cfg.noise),
                    mix_seed(rep_seed, kStreamNoise));
  } catch (const std::exception& e) {
    note_failure(rec, std::string("simulation: ") + e.what());
    return;
  }

  const ParameterBoxes boxes{cfg.alpha_box, cfg.beta_box};
  if (cfg.method_lmm) {
    try {
      EstimateOptions opts;
      opts.optimizer.seed = mix_seed(rep_seed, kStreamOptimizer);
      opts.compute_stderr = cfg.compute_stderr;
      if (cfg.compute_stderr)
        opts.noise_fourth_moment = Eigen::VectorXd::Constant(
            model.state_dim, noise_fourth_moment(cfg.noise));
      const EstimationResult r = adaptive_estimate(raw, scheme, model, boxes, opts);
      if (stage_usable(r) && r.Lambda_hat.allFinite()) {
        rec.lmm_lambda = vech(r.Lambda_hat);
        rec.lmm_alpha = r.alpha_hat;
        rec.lmm_beta = r.beta_hat;
        rec.lmm_ok = true;
      } else {
        note_failure(rec, "lmm: non-finite estimate");
      }
    } catch (const std::exception& e) {
      note_failure(rec, std::string("lmm: ") + e.what());
    }
  }
  if (cfg.method_lga) {
    try {
      EstimateOptions opts;
      opts.optimizer.seed = mix_seed(rep_seed, kStreamOptimizerLga);
      const EstimationResult r = lga_estimate(raw, h, model, boxes, opts);
      if (stage_usable(r)) {
        rec.lga_alpha = r.alpha_hat;
        rec.lga_beta = r.beta_hat;
        rec.lga_ok = true;
      } else {
        note_failure(rec, "lga: non-finite estimate");
      }
    } catch (const std::exception& e) {
      note_failure(rec, std::string("lga: ") + e.what());
    }
  }
  if (cfg.run_noise_test) {
    try {
      const NoiseTestResult t = noise_test(raw, scheme);
      if (std::isfinite(t.z)) {
        rec.z = t.z;
        rec.p_value = t.p_value;
        rec.test_ok = true;
      } else {
        note_failure(rec, "test: non-finite statistic");
      }
    } catch (const std::exception& e) {
      note_failure(rec, std::string("test: ") + e.what());
    }
  }
}

// mean and sample SD over the replications the method succeeded on
void summarize_component(const std::vector<ScenarioResults>& all, std::size_t s,
                         bool lmm, long comp, int offset_group,
                         double& mean, double& sd) {
  std::vector<double> vals;
  for (const ReplicationRecord& r : all[s].records) {
    const bool ok = lmm ? r.lmm_ok : r.lga_ok;
    if (!ok) continue;
    double v = 0.0;
    if (lmm) {
      if (offset_group == 0)
        v = r.lmm_lambda(comp);
      else if (offset_group == 1)
        v = r.lmm_alpha(comp);
      else
        v = r.lmm_beta(comp);
    } else {
      v = (offset_group == 1) ? r.lga_alpha(comp) : r.lga_beta(comp);
    }
    vals.push_back(v);
  }
  if (vals.empty()) {
    mean = sd = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (double v : vals) sum += v;
  mean = sum / static_cast<double>(vals.size());
  if (vals.size() < 2) {
    sd = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
}

void ensure_parent(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path() && !p.parent_path().empty())
    std::filesystem::create_directories(p.parent_path());
}

Eigen::MatrixXd parse_matrix(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError(ctx + ": expected an array of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError(ctx + ": ragged row " + std::to_string(r));
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ConfigError(ctx + ": non-numeric entry");
      m(static_cast<long>(r), static_cast<long>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd parse_vector(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(ctx + ": non-numeric entry");
    v(static_cast<long>(i)) = j[i].get<double>();
  }
  return v;
}

const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                              const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(ctx + ": missing key '" + key + "'");
  return *it;
}

NoiseDistribution parse_distribution(const std::string& s) {
  if (s == "gaussian") return NoiseDistribution::gaussian;
  if (s == "scaled_uniform") return NoiseDistribution::scaled_uniform;
  if (s == "scaled_rademacher") return NoiseDistribution::scaled_rademacher;
  throw ConfigError("unknown noise distribution '" + s + "'");
}

std::string distribution_name(NoiseDistribution d) {
  switch (d) {
    case NoiseDistribution::gaussian: return "gaussian";
    case NoiseDistribution::scaled_uniform: return "scaled_uniform";
    case NoiseDistribution::scaled_rademacher: return "scaled_rademacher";
  }
  return "unknown";
}

}  // namespace

double ExperimentConfig::resolved_h() const {
  if (h_rule.empty()) return h;
  if (h_rule.size() < 3 || h_rule[0] != 'n' || h_rule[1] != '^')
    throw ConfigError("h rule must look like n^-0.7, got '" + h_rule + "'");
  const std::string expo = h_rule.substr(2);
  char* end = nullptr;
  const double g = std::strtod(expo.c_str(), &end);
  if (end != expo.c_str() + expo.size() || !std::isfinite(g))
    throw ConfigError("bad exponent in h rule '" + h_rule + "'");
  return std::pow(static_cast<double>(n), g);
}

void ExperimentConfig::validate() const {
  model.validate();
  alpha_box.validate();
  beta_box.validate();
  const int d = model.dim();
  if (alpha_box.dim() != static_cast<int>(vech_size(d)))
    throw ConfigError("alpha box has dimension " + std::to_string(alpha_box.dim()) +
                      ", model needs " + std::to_string(vech_size(d)));
  if (beta_box.dim() != d * d + d)
    throw ConfigError("beta box has dimension " + std::to_string(beta_box.dim()) +
                      ", model needs " + std::to_string(d * d + d));
  if (n < 2) throw ConfigError("n must be >= 2");
  const double hh = resolved_h();
  if (!(hh > 0.0) || !std::isfinite(hh)) throw ConfigError("h must be positive");
  if (!(tau > 1.0) || !(tau <= 2.0)) throw ConfigError("tau must lie in (1, 2]");
  if (scenarios.empty()) throw ConfigError("at least one scenario is required");
  for (const Scenario& sc : scenarios) {
    if (sc.Lambda.rows() != d || sc.Lambda.cols() != d)
      throw ConfigError("scenario '" + sc.name + "': Lambda must be " +
                        std::to_string(d) + "x" + std::to_string(d));
    if (!sc.Lambda.isApprox(sc.Lambda.transpose(), 1e-10) &&
        (sc.Lambda - sc.Lambda.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw ConfigError("scenario '" + sc.name + "': Lambda must be symmetric");
    try {
      symmetric_psd_sqrt(sc.Lambda);
    } catch (const std::exception&) {
      throw ConfigError("scenario '" + sc.name + "': Lambda is not PSD");
    }
  }
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (!method_lmm && !method_lga && !run_noise_test)
    throw ConfigError("nothing to run: enable a method or the noise test");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const double h = cfg.resolved_h();
  const SamplingScheme scheme =
      cfg.p_override ? derive_scheme_with_p(cfg.n, h, cfg.tau, *cfg.p_override)
                     : derive_scheme(cfg.n, h, cfg.tau);
  const DiffusionModel model = make_ou_model(cfg.model);
  const Eigen::VectorXd alpha_true = cfg.model.alpha();
  const Eigen::VectorXd beta_true = cfg.model.beta();

  const long S = static_cast<long>(cfg.scenarios.size());
  const long R = cfg.replications;

  ExperimentReport report;
  report.scheme = scheme;
  report.seed = cfg.seed;
  report.replications = R;
  if (cfg.method_lmm) report.methods.push_back("lmm");
  if (cfg.method_lga) report.methods.push_back("lga");
  report.noise_distribution = distribution_name(cfg.noise);
  report.scenarios.resize(S);
  for (long s = 0; s < S; ++s) {
    report.scenarios[s].name = cfg.scenarios[s].name;
    report.scenarios[s].records.resize(R);
  }

  const long total = S * R;
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (;;) {
      const long idx = next.fetch_add(1);
      if (idx >= total) return;
      const long s = idx / R, r = idx % R;
      ReplicationRecord& rec = report.scenarios[s].records[r];
      try {
        run_replication(cfg, model, scheme, alpha_true, beta_true,
                        cfg.scenarios[s], r, rec);
      } catch (const std::exception& e) {
        note_failure(rec, std::string("internal: ") + e.what());
      }
    }
  };

  int threads = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = static_cast<int>(std::min<long>(threads, total));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // aggregation: fixed order (scenario, then lmm before lga, then parameter)
  const int d = model.state_dim;
  const auto lam_names = lambda_names(d);
  const auto a_names = indexed_names("alpha", model.alpha_dim);
  const auto b_names = indexed_names("beta", model.beta_dim);

  for (long s = 0; s < S; ++s) {
    ScenarioResults& res = report.scenarios[s];
    long lmm_ok = 0, lga_ok = 0, test_ok = 0;
    for (const ReplicationRecord& r : res.records) {
      lmm_ok += r.lmm_ok ? 1 : 0;
      lga_ok += r.lga_ok ? 1 : 0;
      test_ok += r.test_ok ? 1 : 0;
    }
    res.lmm_failures = cfg.method_lmm ? R - lmm_ok : 0;
    res.lga_failures = cfg.method_lga ? R - lga_ok : 0;
    res.test_failures = cfg.run_noise_test ? R - test_ok : 0;

    const Eigen::VectorXd lam_true = vech(cfg.scenarios[s].Lambda);
    if (cfg.method_lmm) {
      auto push = [&](const std::string& name, double truth, int group, long comp) {
        ParamSummary row;
        row.scenario = res.name;
        row.method = "lmm";
        row.parameter = name;
        row.true_value = truth;
        row.failures = res.lmm_failures;
        summarize_component(report.scenarios, s, true, comp, group, row.mean, row.sd);
        report.rows.push_back(row);
      };
      for (std::size_t i = 0; i < lam_names.size(); ++i)
        push(lam_names[i], lam_true(static_cast<long>(i)), 0, static_cast<long>(i));
      for (std::size_t i = 0; i < a_names.size(); ++i)
        push(a_names[i], alpha_true(static_cast<long>(i)), 1, static_cast<long>(i));
      for (std::size_t i = 0; i < b_names.size(); ++i)
        push(b_names[i], beta_true(static_cast<long>(i)), 2, static_cast<long>(i));
    }
    if (cfg.method_lga) {
      auto push = [&](const std::string& name, double truth, int group, long comp) {
        ParamSummary row;
        row.scenario = res.name;
        row.method = "lga";
        row.parameter = name;
        row.true_value = truth;
        row.failures = res.lga_failures;
        summarize_component(report.scenarios, s, false, comp, group, row.mean, row.sd);
        report.rows.push_back(row);
      };
      for (std::size_t i = 0; i < a_names.size(); ++i)
        push(a_names[i], alpha_true(static_cast<long>(i)), 1, static_cast<long>(i));
      for (std::size_t i = 0; i < b_names.size(); ++i)
        push(b_names[i], beta_true(static_cast<long>(i)), 2, static_cast<long>(i));
    }
    if (cfg.run_noise_test) {
      for (double level : kTestLevels) {
        RejectionSummary rej;
        rej.scenario = res.name;
        rej.level = level;
        rej.valid = test_ok;
        for (const ReplicationRecord& r : res.records)
          if (r.test_ok && r.p_value <= level) ++rej.rejections;
        rej.rate = rej.valid > 0
                       ? static_cast<double>(rej.rejections) / static_cast<double>(rej.valid)
                       : 0.0;
        report.rejections.push_back(rej);
      }
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

void write_report(const ExperimentReport& report, ReportFormat format,
                  const std::string& dest) {
  if (format == ReportFormat::csv) {
    const std::string est_path = dest + "_estimates.csv";
    const std::string rej_path = dest + "_rejections.csv";
    ensure_parent(est_path);
    std::ofstream est(est_path);
    if (!est) throw DataError("cannot write " + est_path);
    est << "scenario,method,parameter,true_value,mean,sd,failures\n";
    for (const ParamSummary& r : report.rows)
      est << r.scenario << "," << r.method << "," << r.parameter << ","
          << format_full(r.true_value) << "," << format_full(r.mean) << ","
          << format_full(r.sd) << "," << r.failures << "\n";
    if (!est) throw DataError("write failed for " + est_path);

    std::ofstream rej(rej_path);
    if (!rej) throw DataError("cannot write " + rej_path);
    rej << "scenario,level,rejections,valid,rate\n";
    for (const RejectionSummary& r : report.rejections)
      rej << r.scenario << "," << format_full(r.level) << "," << r.rejections << ","
          << r.valid << "," << format_full(r.rate) << "\n";
    if (!rej) throw DataError("write failed for " + rej_path);
    return;
  }

  nlohmann::json j;
  j["scheme"] = {{"n", report.scheme.n},   {"h", report.scheme.h},
                 {"tau", report.scheme.tau}, {"p", report.scheme.p},
                 {"k", report.scheme.k},   {"delta", report.scheme.delta}};
  j["seed"] = report.seed;
  j["replications"] = report.replications;
  j["methods"] = report.methods;
  j["noise_distribution"] = report.noise_distribution;
  j["wall_seconds"] = report.wall_seconds;
  j["estimates"] = nlohmann::json::array();
  for (const ParamSummary& r : report.rows)
    j["estimates"].push_back({{"scenario", r.scenario},
                              {"method", r.method},
                              {"parameter", r.parameter},
                              {"true_value", r.true_value},
                              {"mean", r.mean},
                              {"sd", r.sd},
                              {"failures", r.failures}});
  j["rejections"] = nlohmann::json::array();
  for (const RejectionSummary& r : report.rejections)
    j["rejections"].push_back({{"scenario", r.scenario},
                               {"level", r.level},
                               {"rejections", r.rejections},
                               {"valid", r.valid},
                               {"rate", r.rate}});
  ensure_parent(dest);
  std::ofstream out(dest);
  if (!out) throw DataError("cannot write " + dest);
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed for " + dest);
}

std::vector<ParamSummary> read_param_summaries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (line != "scenario,method,parameter,true_value,mean,sd,failures")
    throw DataError(path + ": unexpected header '" + line + "'");
  std::vector<ParamSummary> out;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 7 cells");
    ParamSummary r;
    r.scenario = cells[0];
    r.method = cells[1];
    r.parameter = cells[2];
    r.true_value = std::strtod(cells[3].c_str(), nullptr);
    r.mean = std::strtod(cells[4].c_str(), nullptr);
    r.sd = std::strtod(cells[5].c_str(), nullptr);
    r.failures = std::strtol(cells[6].c_str(), nullptr, 10);
    out.push_back(std::move(r));
  }
  return out;
}

OUSpec load_model_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const nlohmann::json& jm = j.contains("model") ? j["model"] : j;
  OUSpec spec;
  spec.B = parse_matrix(require(jm, "B", path), "B");
  spec.mu_shift = parse_vector(require(jm, "mu", path), "mu");
  spec.A = parse_matrix(require(jm, "A", path), "A");
  spec.x0 = parse_vector(require(jm, "x0", path), "x0");
  spec.validate();
  return spec;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  ExperimentConfig cfg;
  const auto& jm = require(j, "model", path);
  cfg.model.B = parse_matrix(require(jm, "B", "model"), "model.B");
  cfg.model.mu_shift = parse_vector(require(jm, "mu", "model"), "model.mu");
  cfg.model.A = parse_matrix(require(jm, "A", "model"), "model.A");
  cfg.model.x0 = parse_vector(require(jm, "x0", "model"), "model.x0");

  const auto& jb = require(j, "boxes", path);
  cfg.alpha_box.lower = parse_vector(require(jb, "alpha_lower", "boxes"), "boxes.alpha_lower");
  cfg.alpha_box.upper = parse_vector(require(jb, "alpha_upper", "boxes"), "boxes.alpha_upper");
  cfg.beta_box.lower = parse_vector(require(jb, "beta_lower", "boxes"), "boxes.beta_lower");
  cfg.beta_box.upper = parse_vector(require(jb, "beta_upper", "boxes"), "boxes.beta_upper");

  const auto& js = require(j, "scheme", path);
  const auto& jn = require(js, "n", "scheme");
  if (!jn.is_number_integer()) throw ConfigError("scheme.n must be an integer");
  cfg.n = jn.get<long>();
  const auto& jh = require(js, "h", "scheme");
  if (jh.is_number()) {
    cfg.h = jh.get<double>();
  } else if (jh.is_string()) {
    cfg.h_rule = jh.get<std::string>();
  } else {
    throw ConfigError("scheme.h must be a number or a rule string like \"n^-0.7\"");
  }
  cfg.tau = require(js, "tau", "scheme").get<double>();
  if (js.contains("p_override")) cfg.p_override = js["p_override"].get<long>();

  if (j.contains("noise")) {
    const auto& jnz = j["noise"];
    if (jnz.contains("distribution"))
      cfg.noise = parse_distribution(jnz["distribution"].get<std::string>());
  }

  const auto& jsc = require(j, "scenarios", path);
  if (!jsc.is_array() || jsc.empty())
    throw ConfigError("scenarios must be a non-empty array");
  for (const auto& e : jsc) {
    Scenario sc;
    sc.name = require(e, "name", "scenarios[]").get<std::string>();
    sc.Lambda = parse_matrix(require(e, "lambda", "scenarios[]"), "scenario lambda");
    cfg.scenarios.push_back(std::move(sc));
  }

  if (j.contains("replications")) cfg.replications = j["replications"].get<long>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("methods")) {
    cfg.method_lmm = cfg.method_lga = false;
    for (const auto& m : j["methods"]) {
      const std::string name = m.get<std::string>();
      if (name == "lmm")
        cfg.method_lmm = true;
      else if (name == "lga")
        cfg.method_lga = true;
      else
        throw ConfigError("unknown method '" + name + "' (expected lmm or lga)");
    }
  }
  if (j.contains("run_noise_test")) cfg.run_noise_test = j["run_noise_test"].get<bool>();
  if (j.contains("compute_stderr")) cfg.compute_stderr = j["compute_stderr"].get<bool>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (j.contains("output")) cfg.output_prefix = j["output"].get<std::string>();

  cfg.validate();
  return cfg;
}

}  // namespace lmm
