#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

#include "lmm/model.hpp"

namespace lmm {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NoiseDistribution { gaussian, scaled_uniform, scaled_rademacher };

// E[eps^4] of the unit-variance marginal for each distribution.
double noise_fourth_moment(NoiseDistribution dist);

/**
 * Additive observation noise Lambda^(1/2) * eps with i.i.d. eps whose
 * components have mean 0, variance 1 and a symmetric marginal law.
 */
struct NoiseSpec {
  Eigen::MatrixXd Lambda;
  NoiseDistribution distribution = NoiseDistribution::gaussian;
  Eigen::VectorXd fourth_moment_per_component;

  static NoiseSpec make(const Eigen::MatrixXd& Lambda,
                        NoiseDistribution dist = NoiseDistribution::gaussian);
};

struct PathConfig {
  long n = 0;           // number of observation steps (path has n+1 points)
  double h = 0.0;       // observation step
  int substeps = 8;     // Euler refinement per observation step
  std::uint64_t seed = 0;
  bool exact_ou = true;  // use the exact OU transition when the model is OU
};

/**
 * Simulate X_0, X_h, ..., X_nh as a d x (n+1) matrix (columns are time
 * points). OU models with exact_ou use the exact Gaussian transition;
 * everything else runs Euler steps of size h/substeps, keeping every
 * substeps-th point. Deterministic given the seed.
 * Throws SimulationError if the state leaves the finite range.
 */
Eigen::MatrixXd simulate_latent(const DiffusionModel& model,
                                const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& alpha,
                                const PathConfig& cfg);

/**
 * Contaminate a path columnwise: Y_i = X_i + Lambda^(1/2) eps_i, with the
 * symmetric PSD root of Lambda. Deterministic given the seed; the eps draws
 * do not depend on Lambda, so runs differing only in Lambda share noise
 * shapes (common random numbers).
 */
Eigen::MatrixXd add_noise(const Eigen::MatrixXd& path, const NoiseSpec& noise,
                          std::uint64_t seed);

}  // namespace lmm
