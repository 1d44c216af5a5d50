#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lmm/csvio.hpp"
#include "lmm/harness.hpp"

using namespace lmm;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << content;
  return p;
}

OUSpec study_spec() {
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

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.model = study_spec();
  cfg.alpha_box.lower = Eigen::Vector3d(0.02, -0.5, 0.02);
  cfg.alpha_box.upper = Eigen::Vector3d(300.0, 0.5, 300.0);
  cfg.beta_box.lower = Eigen::VectorXd::Constant(6, -5000.0);
  cfg.beta_box.upper = Eigen::VectorXd::Constant(6, 5000.0);
  cfg.n = 400;
  cfg.h = 0.05;
  cfg.tau = 2.0;
  Scenario zero;
  zero.name = "zero";
  zero.Lambda = Eigen::MatrixXd::Zero(2, 2);
  Scenario noisy;
  noisy.name = "noisy";
  noisy.Lambda = 0.1 * Eigen::MatrixXd::Identity(2, 2);
  cfg.scenarios = {zero, noisy};
  cfg.replications = 6;
  cfg.seed = 11;
  cfg.method_lmm = true;
  cfg.method_lga = true;
  cfg.run_noise_test = true;
  cfg.threads = 2;
  return cfg;
}

// independent mean/sd over the ok records of one scenario
void oracle_stats(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= double(xs.size());
  if (xs.size() < 2) {
    sd = 0.0;
    return;
  }
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  sd = std::sqrt(acc / double(xs.size() - 1));
}

const ParamSummary& find_row(const ExperimentReport& rep, const std::string& sc,
                             const std::string& method, const std::string& param) {
  for (const auto& r : rep.rows)
    if (r.scenario == sc && r.method == method && r.parameter == param) return r;
  REQUIRE(false);
  return rep.rows.front();
}

}  // namespace

TEST_CASE("csv observations round trip and reject malformed input") {
  SUBCASE("time column sets the spacing") {
    const fs::path p = write_temp("lmm_obs_a.csv", "t,y1\n0,0\n0.5,1\n1.0,2\n");
    const LoadedSeries s = read_observations(p.string());
    REQUIRE(s.y.rows() == 1);
    REQUIRE(s.y.cols() == 3);
    CHECK(s.y(0, 0) == 0.0);
    CHECK(s.y(0, 1) == 1.0);
    CHECK(s.y(0, 2) == 2.0);
    REQUIRE(s.h.has_value());
    CHECK(*s.h == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("headerless data is all components, no spacing") {
    const fs::path p = write_temp("lmm_obs_b.csv", "1,2\n3,4\n5,6\n");
    const LoadedSeries s = read_observations(p.string());
    REQUIRE(s.y.rows() == 2);
    REQUIRE(s.y.cols() == 3);
    CHECK(s.y(0, 1) == 3.0);
    CHECK(s.y(1, 2) == 6.0);
    CHECK(!s.h.has_value());
  }

  SUBCASE("irregular time grid is rejected") {
    const fs::path p = write_temp("lmm_obs_c.csv", "t,y1\n0,0\n0.5,1\n1.2,2\n");
    CHECK_THROWS_AS(read_observations(p.string()), DataError);
  }

  SUBCASE("ragged rows and non-numeric cells are rejected") {
    const fs::path p1 = write_temp("lmm_obs_d.csv", "1,2\n3\n");
    CHECK_THROWS_AS(read_observations(p1.string()), DataError);
    const fs::path p2 = write_temp("lmm_obs_e.csv", "1,2\n3,oops\n");
    CHECK_THROWS_AS(read_observations(p2.string()), DataError);
    const fs::path p3 = write_temp("lmm_obs_f.csv", "x,y1\n0,0\n0.5,1\n");
    CHECK_THROWS_AS(read_observations(p3.string()), DataError);
  }

  SUBCASE("write then read reproduces the data") {
    Eigen::MatrixXd y(2, 5);
    y << 0.1, -2.3456789012345678, 3.14159, 17.0, 1e-12,
         1.0, 2.0, -0.333333333333333315, 4.0, 5.0;
    const fs::path p = fs::temp_directory_path() / "lmm_obs_rt.csv";
    write_observations_csv(p.string(), y, 0.05);
    const LoadedSeries s = read_observations(p.string());
    REQUIRE(s.h.has_value());
    CHECK(*s.h == doctest::Approx(0.05).epsilon(1e-12));
    REQUIRE(s.y.rows() == 2);
    REQUIRE(s.y.cols() == 5);
    CHECK(s.y == y);  // %.17g preserves doubles exactly
  }
}

TEST_CASE("experiment config parsing") {
  const std::string good = R"({
    "model": {"B": [[-1.0, -0.1], [-0.1, -1.0]], "mu": [1.0, 1.0],
              "A": [[1.0, 0.1], [0.1, 1.0]], "x0": [1.0, 1.0]},
    "boxes": {"alpha_lower": [0.02, -0.5, 0.02], "alpha_upper": [300.0, 0.5, 300.0],
              "beta_lower": [-5000, -5000, -5000, -5000, -5000, -5000],
              "beta_upper": [5000, 5000, 5000, 5000, 5000, 5000]},
    "scheme": {"n": 1000, "h": "n^-0.7", "tau": 2.0},
    "scenarios": [{"name": "zero", "lambda": [[0.0, 0.0], [0.0, 0.0]]}],
    "replications": 4, "seed": 7, "methods": ["lmm", "lga"],
    "run_noise_test": true, "threads": 2, "output": "run/out"
  })";

  SUBCASE("well-formed file loads") {
    const fs::path p = write_temp("lmm_cfg_good.json", good);
    const ExperimentConfig cfg = load_experiment_config(p.string());
    CHECK(cfg.n == 1000);
    CHECK(cfg.h_rule == "n^-0.7");
    CHECK(cfg.resolved_h() == doctest::Approx(std::pow(1000.0, -0.7)).epsilon(1e-15));
    CHECK(cfg.replications == 4);
    CHECK(cfg.seed == 7);
    CHECK(cfg.method_lmm);
    CHECK(cfg.method_lga);
    CHECK(cfg.scenarios.size() == 1);
    CHECK(cfg.output_prefix == "run/out");
    CHECK(cfg.model.alpha() == Eigen::Vector3d(1.0, 0.1, 1.0));
  }

  SUBCASE("missing model is rejected") {
    std::string bad = good;
    bad.replace(bad.find("\"model\""), 7, "\"nodel\"");
    const fs::path p = write_temp("lmm_cfg_miss.json", bad);
    CHECK_THROWS_AS(load_experiment_config(p.string()), ConfigError);
  }

  SUBCASE("unknown method is rejected") {
    std::string bad = good;
    bad.replace(bad.find("\"lga\""), 5, "\"ols\"");
    const fs::path p = write_temp("lmm_cfg_meth.json", bad);
    CHECK_THROWS_AS(load_experiment_config(p.string()), ConfigError);
  }

  SUBCASE("indefinite scenario lambda is rejected") {
    std::string bad = good;
    bad.replace(bad.find("[[0.0, 0.0], [0.0, 0.0]]"), 24, "[[1.0, 2.0], [2.0, 1.0]]");
    const fs::path p = write_temp("lmm_cfg_psd.json", bad);
    CHECK_THROWS_AS(load_experiment_config(p.string()), ConfigError);
  }

  SUBCASE("model spec file loads standalone or nested") {
    const fs::path p = write_temp(
        "lmm_model_a.json",
        R"({"B": [[-2.0]], "mu": [0.5], "A": [[1.5]], "x0": [0.0]})");
    const OUSpec s = load_model_spec(p.string());
    CHECK(s.B(0, 0) == -2.0);
    const fs::path q = write_temp(
        "lmm_model_b.json",
        R"({"model": {"B": [[-2.0]], "mu": [0.5], "A": [[1.5]], "x0": [0.0]}})");
    CHECK(load_model_spec(q.string()).A(0, 0) == 1.5);
  }
}

TEST_CASE("monte carlo driver aggregates per-replication results") {
  const ExperimentConfig cfg = small_config();
  const ExperimentReport rep = run_experiment(cfg);

  REQUIRE(rep.scenarios.size() == 2);
  CHECK(rep.replications == 6);
  CHECK(rep.scheme.p == 5);
  CHECK(rep.scheme.k == 80);

  SUBCASE("row layout: per scenario, lmm before lga") {
    REQUIRE(rep.rows.size() == 2 * (12 + 9));
    CHECK(rep.rows[0].scenario == "zero");
    CHECK(rep.rows[0].method == "lmm");
    CHECK(rep.rows[0].parameter == "Lambda11");
    CHECK(rep.rows[1].parameter == "Lambda21");
    CHECK(rep.rows[2].parameter == "Lambda22");
    CHECK(rep.rows[3].parameter == "alpha1");
    CHECK(rep.rows[6].parameter == "beta1");
    CHECK(rep.rows[12].method == "lga");
    CHECK(rep.rows[12].parameter == "alpha1");
    CHECK(rep.rows[21].scenario == "noisy");
    // true values come from the generating model and scenario
    CHECK(find_row(rep, "noisy", "lmm", "Lambda11").true_value == 0.1);
    CHECK(find_row(rep, "zero", "lmm", "alpha2").true_value == 0.1);
    CHECK(find_row(rep, "zero", "lga", "beta1").true_value == -1.0);
    // and the scenario noise actually reaches the data
    CHECK(find_row(rep, "noisy", "lmm", "Lambda11").mean >
          3.0 * find_row(rep, "zero", "lmm", "Lambda11").mean);
  }

  SUBCASE("aggregates match an independent pass over the records") {
    for (const auto& sres : rep.scenarios) {
      std::vector<double> a1, b3;
      for (const auto& r : sres.records) {
        REQUIRE(r.rep >= 0);
        if (r.lmm_ok) {
          a1.push_back(r.lmm_alpha(0));
          b3.push_back(r.lmm_beta(2));
        }
      }
      REQUIRE(a1.size() == 6);  // nothing should fail at this size
      double mean, sd;
      oracle_stats(a1, mean, sd);
      const ParamSummary& row = find_row(rep, sres.name, "lmm", "alpha1");
      CHECK(row.mean == doctest::Approx(mean).epsilon(1e-12));
      CHECK(row.sd == doctest::Approx(sd).epsilon(1e-12));
      CHECK(row.failures == 0);
      oracle_stats(b3, mean, sd);
      const ParamSummary& brow = find_row(rep, sres.name, "lmm", "beta3");
      CHECK(brow.mean == doctest::Approx(mean).epsilon(1e-12));
    }
  }

  SUBCASE("rejection table counts test outcomes") {
    REQUIRE(rep.rejections.size() == 2 * 3);
    for (const auto& rj : rep.rejections) {
      CHECK(rj.valid == 6);
      CHECK(rj.rejections >= 0);
      CHECK(rj.rejections <= rj.valid);
      CHECK(rj.rate == double(rj.rejections) / double(rj.valid));
    }
    // the noisy scenario at this h has massive noise relative to h*c: expect
    // rejections there to be at least as frequent as under the null
    long zero_rej = 0, noisy_rej = 0;
    for (const auto& rj : rep.rejections) {
      if (rj.level != 0.05) continue;
      (rj.scenario == "zero" ? zero_rej : noisy_rej) = rj.rejections;
    }
    CHECK(noisy_rej >= zero_rej);
  }

  SUBCASE("thread count does not change results") {
    ExperimentConfig c1 = cfg;
    c1.threads = 1;
    ExperimentConfig c4 = cfg;
    c4.threads = 4;
    const ExperimentReport r1 = run_experiment(c1);
    const ExperimentReport r4 = run_experiment(c4);
    REQUIRE(r1.rows.size() == rep.rows.size());
    REQUIRE(r4.rows.size() == rep.rows.size());
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      CHECK(r1.rows[i].mean == rep.rows[i].mean);
      CHECK(r1.rows[i].sd == rep.rows[i].sd);
      CHECK(r4.rows[i].mean == rep.rows[i].mean);
      CHECK(r4.rows[i].sd == rep.rows[i].sd);
    }
    for (std::size_t s = 0; s < rep.scenarios.size(); ++s)
      for (long r = 0; r < 6; ++r) {
        CHECK(r1.scenarios[s].records[r].z == rep.scenarios[s].records[r].z);
        CHECK(r4.scenarios[s].records[r].lmm_alpha ==
              rep.scenarios[s].records[r].lmm_alpha);
      }
  }
}

TEST_CASE("failure handling and degenerate sizes") {
  SUBCASE("an injected failure drops exactly one replication") {
    ExperimentConfig cfg = small_config();
    cfg.scenarios.resize(1);
    cfg.inject_failure_at = 2;
    const ExperimentReport rep = run_experiment(cfg);
    const auto& sres = rep.scenarios[0];
    CHECK(sres.lmm_failures == 1);
    CHECK(sres.lga_failures == 1);
    CHECK(sres.test_failures == 1);
    CHECK(!sres.records[2].lmm_ok);
    CHECK(sres.records[2].failure_reason == "injected failure");

    std::vector<double> a1;
    for (const auto& r : sres.records)
      if (r.lmm_ok) a1.push_back(r.lmm_alpha(0));
    REQUIRE(a1.size() == 5);
    double mean, sd;
    oracle_stats(a1, mean, sd);
    const ParamSummary& row = find_row(rep, "zero", "lmm", "alpha1");
    CHECK(row.failures == 1);
    CHECK(row.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(row.sd == doctest::Approx(sd).epsilon(1e-12));
    for (const auto& rj : rep.rejections) CHECK(rj.valid == 5);
  }

  SUBCASE("a single replication reports zero spread") {
    ExperimentConfig cfg = small_config();
    cfg.scenarios.resize(1);
    cfg.replications = 1;
    cfg.method_lga = false;
    const ExperimentReport rep = run_experiment(cfg);
    for (const auto& row : rep.rows) CHECK(row.sd == 0.0);
  }

  SUBCASE("config validation rejects bad setups") {
    ExperimentConfig cfg = small_config();
    cfg.tau = 2.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.scenarios.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.method_lmm = cfg.method_lga = cfg.run_noise_test = false;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.scenarios[0].Lambda(0, 1) = 0.5;  // asymmetric
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
}

TEST_CASE("report serialization round trips") {
  ExperimentConfig cfg = small_config();
  cfg.scenarios.resize(1);
  cfg.replications = 3;
  const ExperimentReport rep = run_experiment(cfg);

  SUBCASE("csv pair") {
    const std::string prefix = (fs::temp_directory_path() / "lmm_rep").string();
    write_report(rep, ReportFormat::csv, prefix);
    const std::vector<ParamSummary> rows =
        read_param_summaries(prefix + "_estimates.csv");
    REQUIRE(rows.size() == rep.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].scenario == rep.rows[i].scenario);
      CHECK(rows[i].method == rep.rows[i].method);
      CHECK(rows[i].parameter == rep.rows[i].parameter);
      CHECK(rows[i].true_value == rep.rows[i].true_value);
      const double tol = 1e-12 * (1.0 + std::abs(rep.rows[i].mean));
      CHECK(std::abs(rows[i].mean - rep.rows[i].mean) <= tol);
      CHECK(std::abs(rows[i].sd - rep.rows[i].sd) <=
            1e-12 * (1.0 + std::abs(rep.rows[i].sd)));
      CHECK(rows[i].failures == rep.rows[i].failures);
    }

    std::ifstream rej(prefix + "_rejections.csv");
    std::string header;
    REQUIRE(std::getline(rej, header));
    CHECK(header == "scenario,level,rejections,valid,rate");
  }

  SUBCASE("empty report still writes a header") {
    ExperimentReport empty;
    const std::string prefix = (fs::temp_directory_path() / "lmm_rep_empty").string();
    write_report(empty, ReportFormat::csv, prefix);
    CHECK(read_param_summaries(prefix + "_estimates.csv").empty());
  }

  SUBCASE("json document parses and carries the tables") {
    const std::string path = (fs::temp_directory_path() / "lmm_rep.json").string();
    write_report(rep, ReportFormat::json, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    const nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j.contains("scheme"));
    CHECK(j.contains("estimates"));
    CHECK(j.contains("rejections"));
    CHECK(j["estimates"].size() == rep.rows.size());
    CHECK(j["seed"].get<std::uint64_t>() == cfg.seed);
  }

  SUBCASE("tampered header is rejected") {
    const fs::path p = write_temp("lmm_bad_est.csv", "scenario,method\nzero,lmm\n");
    CHECK_THROWS_AS(read_param_summaries(p.string()), DataError);
  }
}
