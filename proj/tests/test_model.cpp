#include <cmath>
#include <random>

#include "doctest.h"
#include "lmm/model.hpp"
#include "lmm/sampling.hpp"

using namespace lmm;

namespace {

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

SamplingScheme scheme_with_tau(double tau, double delta) {
  SamplingScheme s;
  s.n = 100;
  s.p = 10;
  s.k = 10;
  s.tau = tau;
  s.delta = delta;
  s.h = delta / 10.0;
  return s;
}

}  // namespace

TEST_CASE("ParameterBox validation and projection") {
  ParameterBox box;
  box.lower = Eigen::Vector2d(0.0, -1.0);
  box.upper = Eigen::Vector2d(2.0, 1.0);
  box.validate();
  CHECK(box.dim() == 2);
  CHECK(box.contains(Eigen::Vector2d(1.0, 0.0)));
  CHECK(!box.contains(Eigen::Vector2d(3.0, 0.0)));
  CHECK(box.project(Eigen::Vector2d(3.0, -2.0)) == Eigen::Vector2d(2.0, -1.0));
  CHECK(box.center() == Eigen::Vector2d(1.0, 0.0));

  ParameterBox bad;
  bad.lower = Eigen::Vector2d(1.0, 0.0);
  bad.upper = Eigen::Vector2d(0.0, 1.0);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  ParameterBox mismatched;
  mismatched.lower = Eigen::Vector2d(0.0, 0.0);
  mismatched.upper = Eigen::Vector3d(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(mismatched.validate(), ValidationError);
}

TEST_CASE("OUSpec parameter charts") {
  const OUSpec s = study_spec();
  s.validate();
  CHECK(s.alpha() == Eigen::Vector3d(1.0, 0.1, 1.0));
  Eigen::VectorXd beta(6);
  beta << -1.0, -0.1, -0.1, -1.0, 1.0, 1.0;
  CHECK(s.beta() == beta);
  CHECK(s.mean_reverting());

  OUSpec drifting = s;
  drifting.B = Eigen::MatrixXd::Zero(2, 2);
  CHECK(!drifting.mean_reverting());

  const OUSpec back = OUSpec::from_parameters(s.alpha(), s.beta(), s.x0);
  CHECK(back.A == s.A);
  CHECK(back.B == s.B);
  CHECK(back.mu_shift == s.mu_shift);

  OUSpec asym = s;
  asym.A(0, 1) = 0.2;  // breaks symmetry
  CHECK_THROWS_AS(asym.validate(), ValidationError);
}

TEST_CASE("OU model drift and diffusion closures") {
  const OUSpec s = study_spec();
  const DiffusionModel model = make_ou_model(s);
  CHECK(model.state_dim == 2);
  CHECK(model.alpha_dim == 3);
  CHECK(model.beta_dim == 6);
  CHECK(model.diffusion_state_independent);
  CHECK(model.drift_affine_in_beta);
  REQUIRE(model.ou.has_value());

  // b(x) = Bx + mu
  const Eigen::VectorXd at_zero = model.drift(Eigen::Vector2d(0.0, 0.0), s.beta());
  CHECK(at_zero.isApprox(s.mu_shift, 1e-15));
  const Eigen::VectorXd at_x0 = model.drift(s.x0, s.beta());
  CHECK(at_x0.isApprox(Eigen::Vector2d(-0.1, -0.1), 1e-14));

  CHECK(model.diffusion(s.x0, s.alpha()) == s.A);

  CHECK_THROWS_AS(model.validate_alpha(Eigen::Vector2d(1.0, 1.0)), ValidationError);
  CHECK_THROWS_AS(model.validate_beta(Eigen::Vector2d(1.0, 1.0)), ValidationError);
}

TEST_CASE("c matrices and the noise-inflated variants") {
  const OUSpec s = study_spec();
  const DiffusionModel model = make_ou_model(s);
  const Eigen::VectorXd alpha = s.alpha();
  const Eigen::VectorXd x = s.x0;

  Eigen::MatrixXd expected_c(2, 2);
  expected_c << 1.01, 0.2, 0.2, 1.01;
  CHECK(c_matrix(model, x, alpha).isApprox(expected_c, 1e-15));

  const Eigen::MatrixXd lam = Eigen::MatrixXd::Identity(2, 2);
  CHECK(c_dagger(model, x, alpha, lam)
            .isApprox(expected_c + 3.0 * lam, 1e-15));

  // tau = 2: the delta weight is exactly 1, so c_tau IS c_dagger, bitwise
  const SamplingScheme s2 = scheme_with_tau(2.0, 0.0177);
  CHECK(noise_shift_factor(s2) == 1.0);
  CHECK(c_tau(model, x, alpha, lam, s2) == c_dagger(model, x, alpha, lam));

  // tau = 1.5, delta = 0.01: exponent 1, weight = delta
  const SamplingScheme s15 = scheme_with_tau(1.5, 0.01);
  OUSpec unit = s;
  unit.A = Eigen::MatrixXd::Identity(2, 2);
  const DiffusionModel unit_model = make_ou_model(unit);
  const Eigen::MatrixXd ct = c_tau(unit_model, x, unit.alpha(), lam, s15);
  CHECK(ct(0, 0) == doctest::Approx(1.03).epsilon(1e-12));
  CHECK(ct(1, 0) == doctest::Approx(0.0).epsilon(1e-12));

  // Lambda = 0 collapses both to c
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  CHECK(c_tau(model, x, alpha, zero, s15) == c_matrix(model, x, alpha));

  SamplingScheme bad = scheme_with_tau(1.0, 0.01);
  CHECK_THROWS_AS(noise_shift_factor(bad), ValidationError);
  bad.tau = 0.5;
  CHECK_THROWS_AS(noise_shift_factor(bad), ValidationError);
}

TEST_CASE("c is PSD across random symmetric diffusion parameters") {
  const OUSpec s = study_spec();
  const DiffusionModel model = make_ou_model(s);
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Vector3d alpha(u(eng), u(eng), u(eng));
    const Eigen::MatrixXd c = c_matrix(model, s.x0, alpha);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("analytic derivative hooks agree with finite differences") {
  const OUSpec s = study_spec();
  const DiffusionModel model = make_ou_model(s);
  std::mt19937_64 eng(23);
  std::uniform_real_distribution<double> u(0.3, 2.0);

  for (int rep = 0; rep < 10; ++rep) {
    Eigen::Vector3d alpha(u(eng), u(eng) - 1.0, u(eng));
    const auto dc = c_deriv_alpha(model, s.x0, alpha);
    REQUIRE(static_cast<int>(dc.size()) == 3);
    for (int m = 0; m < 3; ++m) {
      const double step = 1e-6 * (1.0 + std::abs(alpha(m)));
      Eigen::VectorXd ap = alpha, am = alpha;
      ap(m) += step;
      am(m) -= step;
      const Eigen::MatrixXd fd =
          (c_matrix(model, s.x0, ap) - c_matrix(model, s.x0, am)) / (2.0 * step);
      CHECK((dc[m] - fd).cwiseAbs().maxCoeff() <=
            1e-5 * (1.0 + fd.cwiseAbs().maxCoeff()));
    }
  }

  const Eigen::VectorXd beta = s.beta();
  const Eigen::MatrixXd jb = drift_jacobian(model, s.x0, beta);
  REQUIRE(jb.rows() == 2);
  REQUIRE(jb.cols() == 6);
  for (int m = 0; m < 6; ++m) {
    const double step = 1e-6 * (1.0 + std::abs(beta(m)));
    Eigen::VectorXd bp = beta, bm = beta;
    bp(m) += step;
    bm(m) -= step;
    const Eigen::VectorXd fd =
        (model.drift(s.x0, bp) - model.drift(s.x0, bm)) / (2.0 * step);
    CHECK((jb.col(m) - fd).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("finite-difference fallback used when hooks are absent") {
  const OUSpec s = study_spec();
  DiffusionModel model = make_ou_model(s);
  const auto analytic = c_deriv_alpha(model, s.x0, s.alpha());
  model.diffusion_deriv_alpha = nullptr;
  const auto fallback = c_deriv_alpha(model, s.x0, s.alpha());
  for (int m = 0; m < 3; ++m)
    CHECK((analytic[m] - fallback[m]).cwiseAbs().maxCoeff() <= 1e-6);
}
