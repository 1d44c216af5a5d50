#include "lmm/simulate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "lmm/rng.hpp"

namespace lmm {

double noise_fourth_moment(NoiseDistribution dist) {
  switch (dist) {
    case NoiseDistribution::gaussian:
      return 3.0;
    case NoiseDistribution::scaled_uniform:
      return 1.8;  // E[U^4] = 9/5 for U ~ Uniform(-sqrt(3), sqrt(3))
    case NoiseDistribution::scaled_rademacher:
      return 1.0;
  }
  throw ValidationError("unknown noise distribution");
}

NoiseSpec NoiseSpec::make(const Eigen::MatrixXd& Lambda, NoiseDistribution dist) {
  if (Lambda.rows() != Lambda.cols())
    throw ValidationError("NoiseSpec: Lambda must be square");
  NoiseSpec spec;
  spec.Lambda = Lambda;
  spec.distribution = dist;
  spec.fourth_moment_per_component =
      Eigen::VectorXd::Constant(Lambda.rows(), noise_fourth_moment(dist));
  return spec;
}

namespace {

void validate_config(const PathConfig& cfg) {
  if (cfg.n < 2) throw ValidationError("PathConfig: need n >= 2");
  if (!(cfg.h > 0.0)) throw ValidationError("PathConfig: need h > 0");
  if (cfg.substeps < 1) throw ValidationError("PathConfig: need substeps >= 1");
}

/**
 * Exact OU step: X_{t+h} = Phi X_t + m + L xi with
 *   Phi = exp(B h),  m = (int_0^h exp(Bs) ds) mu,
 *   L L^T = Sigma_h = int_0^h exp(Bs) A A^T exp(B^T s) ds.
 * Sigma_h comes out of one block matrix exponential (the classic
 * augmented-matrix trick), so no eigenstructure assumptions on B.
 */
Eigen::MatrixXd ou_exact_path(const OUSpec& spec, const PathConfig& cfg,
                              const Eigen::VectorXd& x0) {
  const int d = spec.dim();
  const double h = cfg.h;

  Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  m1.topLeftCorner(d, d) = -spec.B;
  m1.topRightCorner(d, d) = spec.A * spec.A.transpose();
  m1.bottomRightCorner(d, d) = spec.B.transpose();
  const Eigen::MatrixXd f = (m1 * h).exp();
  const Eigen::MatrixXd phi = f.bottomRightCorner(d, d).transpose();
  Eigen::MatrixXd sigma_h = phi * f.topRightCorner(d, d);
  sigma_h = 0.5 * (sigma_h + sigma_h.transpose()).eval();

  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  m2.topLeftCorner(d, d) = spec.B;
  m2.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd g = (m2 * h).exp();
  const Eigen::VectorXd drift_term = g.topRightCorner(d, d) * spec.mu_shift;

  Eigen::LLT<Eigen::MatrixXd> llt(sigma_h);
  Eigen::MatrixXd root;
  if (llt.info() == Eigen::Success) {
    root = llt.matrixL();
  } else {
    root = symmetric_psd_sqrt(sigma_h, 1e-9);
  }

  auto eng = make_engine(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd out(d, cfg.n + 1);
  Eigen::VectorXd x = x0;
  Eigen::VectorXd xi(d);
  out.col(0) = x;
  for (long i = 1; i <= cfg.n; ++i) {
    for (int l = 0; l < d; ++l) xi(l) = gauss(eng);
    x = phi * x + drift_term + root * xi;
    if (!x.allFinite())
      throw SimulationError("simulate_latent: non-finite state at step " +
                            std::to_string(i));
    out.col(i) = x;
  }
  return out;
}

Eigen::MatrixXd euler_path(const DiffusionModel& model, const Eigen::VectorXd& beta,
                           const Eigen::VectorXd& alpha, const PathConfig& cfg) {
  const int d = model.state_dim;
  const int r = model.wiener_dim;
  const double dt = cfg.h / cfg.substeps;
  const double sq = std::sqrt(dt);

  auto eng = make_engine(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd out(d, cfg.n + 1);
  Eigen::VectorXd x = model.x0;
  Eigen::VectorXd xi(r);
  out.col(0) = x;
  for (long i = 1; i <= cfg.n; ++i) {
    for (int s = 0; s < cfg.substeps; ++s) {
      for (int l = 0; l < r; ++l) xi(l) = gauss(eng);
      x += model.drift(x, beta) * dt + model.diffusion(x, alpha) * (sq * xi);
      if (!x.allFinite())
        throw SimulationError("simulate_latent: non-finite state at step " +
                              std::to_string(i) + ", substep " + std::to_string(s));
    }
    out.col(i) = x;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd simulate_latent(const DiffusionModel& model, const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& alpha, const PathConfig& cfg) {
  validate_config(cfg);
  model.validate_alpha(alpha);
  model.validate_beta(beta);
  if (cfg.exact_ou && model.ou) {
    const OUSpec spec = OUSpec::from_parameters(alpha, beta, model.x0);
    return ou_exact_path(spec, cfg, model.x0);
  }
  return euler_path(model, beta, alpha, cfg);
}

Eigen::MatrixXd add_noise(const Eigen::MatrixXd& path, const NoiseSpec& noise,
                          std::uint64_t seed) {
  const int d = static_cast<int>(path.rows());
  if (noise.Lambda.rows() != d || noise.Lambda.cols() != d)
    throw ValidationError("add_noise: Lambda dimension mismatch");
  if (!noise.Lambda.isApprox(noise.Lambda.transpose(), 1e-10))
    throw ValidationError("add_noise: Lambda must be symmetric");

  const Eigen::MatrixXd root = symmetric_psd_sqrt(noise.Lambda);

  auto eng = make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double u_half = std::sqrt(3.0);
  std::uniform_real_distribution<double> uniform(-u_half, u_half);
  std::uniform_int_distribution<int> coin(0, 1);

  Eigen::MatrixXd out(d, path.cols());
  Eigen::VectorXd eps(d);
  for (long i = 0; i < path.cols(); ++i) {
    for (int l = 0; l < d; ++l) {
      switch (noise.distribution) {
        case NoiseDistribution::gaussian:
          eps(l) = gauss(eng);
          break;
        case NoiseDistribution::scaled_uniform:
          eps(l) = uniform(eng);
          break;
        case NoiseDistribution::scaled_rademacher:
          eps(l) = coin(eng) ? 1.0 : -1.0;
          break;
      }
    }
    out.col(i) = path.col(i) + root * eps;
  }
  return out;
}

}  // namespace lmm
