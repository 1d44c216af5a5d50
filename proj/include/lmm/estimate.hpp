#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmm/model.hpp"
#include "lmm/optimizer.hpp"
#include "lmm/sampling.hpp"

namespace lmm {

// Raised when a contrast hits a non-invertible coefficient matrix; carries
// the block (or increment) index the failure occurred at.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& msg, long index)
      : std::runtime_error(msg), block_index(index) {}
  long block_index;
};

struct StageInfo {
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
  long evaluations = 0;
  int best_start = -1;
};

struct Rates {
  double lambda = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct StdErrors {
  Eigen::VectorXd lambda;
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
};

struct ParameterBoxes {
  ParameterBox alpha;
  ParameterBox beta;
};

struct EstimationResult {
  // Lambda_hat/theta_eps_hat are empty for the raw-increment (lga) method
  Eigen::MatrixXd Lambda_hat;
  Eigen::VectorXd theta_eps_hat;  // vech(Lambda_hat)
  Eigen::VectorXd alpha_hat;
  Eigen::VectorXd beta_hat;
  Rates rates;
  std::optional<StdErrors> std_errors;
  StageInfo stage_alpha;
  StageInfo stage_beta;
  bool alpha_on_boundary = false;
  bool beta_on_boundary = false;
};

struct EstimateOptions {
  BfgsOptions optimizer;
  bool compute_stderr = false;
  // per-component E[eps^4] used by the covariance plug-in; default 3 (gaussian)
  std::optional<Eigen::VectorXd> noise_fourth_moment;
};

/**
 * Asymptotic covariance of the three estimator groups, evaluated at the
 * estimates with empirical block-mean averages in place of the invariant
 * measure. W1 is the vech(Lambda) block (rows and columns indexed by
 * vech pairs, see vech_index); cov_* are the sandwich blocks J^-1 I J^-1;
 * se_* are standard errors already scaled by the group rates
 * sqrt(n), sqrt(k), sqrt(k*delta).
 */
struct AsymptoticCovariance {
  Eigen::MatrixXd W1;
  Eigen::MatrixXd I22, J22;
  Eigen::MatrixXd I33, J33;
  Eigen::MatrixXd cov_lambda, cov_alpha, cov_beta;
  Eigen::MatrixXd full_cov;  // block diagonal over the three groups
  Eigen::VectorXd se_lambda, se_alpha, se_beta;
  std::vector<std::string> warnings;
};

// (1/2n) sum of outer products of consecutive increments; the quadratic
// half of realized variance, which converges to Lambda under noise.
Eigen::MatrixXd estimate_lambda(const Eigen::MatrixXd& raw);

/**
 * Block-scale quasi-likelihood for the diffusion parameter:
 *   -(1/2) sum_{j=1}^{k-2} [ (3/(2 delta)) V_j^T M_j^-1 V_j + log det M_j ]
 * with V_j the lead block-mean increment and M_j = c_tau evaluated at the
 * lagged block mean. Throws SingularMatrixError when M_j is not positive
 * definite.
 */
double quasi_lik1(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& Lambda,
                  const LocalMeanSeries& lm, const DiffusionModel& model);
double quasi_lik1_with_gradient(const Eigen::VectorXd& alpha,
                                const Eigen::MatrixXd& Lambda,
                                const LocalMeanSeries& lm, const DiffusionModel& model,
                                Eigen::VectorXd& grad);

/**
 * Block-scale quasi-likelihood for the drift parameter:
 *   -(1/(2 delta)) sum_{j=1}^{k-2} R_j^T M_j^-1 R_j,
 *   R_j = V_j - delta * b(lagged mean, beta).
 */
double quasi_lik2(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Lambda,
                  const Eigen::VectorXd& alpha, const LocalMeanSeries& lm,
                  const DiffusionModel& model);
double quasi_lik2_with_gradient(const Eigen::VectorXd& beta,
                                const Eigen::MatrixXd& Lambda,
                                const Eigen::VectorXd& alpha, const LocalMeanSeries& lm,
                                const DiffusionModel& model, Eigen::VectorXd& grad);

// Raw-increment Gaussian contrasts (the noise-free baseline method).
double lga_alpha_objective(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& raw,
                           double h, const DiffusionModel& model);
double lga_beta_objective(const Eigen::VectorXd& beta, const Eigen::VectorXd& alpha,
                          const Eigen::MatrixXd& raw, double h,
                          const DiffusionModel& model);

/**
 * Three-stage adaptive estimator: Lambda_hat from raw increments, then
 * alpha_hat maximizing quasi_lik1 given Lambda_hat, then beta_hat
 * maximizing quasi_lik2 given both. Stages are strictly sequential.
 * Optimizer non-convergence is reported in the stage infos; the result
 * is returned either way.
 */
EstimationResult adaptive_estimate(const Eigen::MatrixXd& raw,
                                   const SamplingScheme& scheme,
                                   const DiffusionModel& model,
                                   const ParameterBoxes& boxes,
                                   const EstimateOptions& opts);

/**
 * Baseline two-stage estimator on raw increments, treating the data as a
 * noise-free diffusion. No Lambda stage; inconsistent under observation
 * noise (by design; that failure mode is what it is here to demonstrate).
 */
EstimationResult lga_estimate(const Eigen::MatrixXd& raw, double h,
                              const DiffusionModel& model, const ParameterBoxes& boxes,
                              const EstimateOptions& opts);

/**
 * Plug-in sandwich covariance per parameter group, with the tau = 2 branch
 * using the noise-inflated coefficient and the tau in (1,2) branch the bare
 * one. noise_fourth_moment supplies per-component E[eps^4] (3 annihilates
 * the kurtosis correction in W1).
 */
AsymptoticCovariance plugin_asymptotic_cov(const EstimationResult& result,
                                           const LocalMeanSeries& lm,
                                           const DiffusionModel& model,
                                           const SamplingScheme& scheme,
                                           const Eigen::VectorXd& noise_fourth_moment);

}  // namespace lmm
