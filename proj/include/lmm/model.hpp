#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "lmm/numutil.hpp"
#include "lmm/sampling.hpp"

namespace lmm {

// Axis-aligned box defining a compact parameter space.
struct ParameterBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  void validate() const;
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
};

/**
 * Multivariate Ornstein-Uhlenbeck specification:
 *   dX_t = (B X_t + mu_shift) dt + A dw_t
 * with A symmetric. The parameter charts used everywhere are
 *   alpha = vech(A)                  (d(d+1)/2 components)
 *   beta  = [vec(B) column-major; mu_shift]   (d^2 + d components)
 */
struct OUSpec {
  Eigen::MatrixXd B;
  Eigen::VectorXd mu_shift;
  Eigen::MatrixXd A;
  Eigen::VectorXd x0;

  int dim() const { return static_cast<int>(B.rows()); }
  Eigen::VectorXd alpha() const { return vech(A); }
  Eigen::VectorXd beta() const;
  void validate() const;

  // true when every eigenvalue of B has negative real part
  bool mean_reverting() const;

  static OUSpec from_parameters(const Eigen::VectorXd& alpha,
                                const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& x0);
};

/**
 * Parametric diffusion dX_t = b(X_t, beta) dt + a(X_t, alpha) dw_t.
 * Generic models supply closures; analytic derivative hooks are optional
 * (finite differences fill in when absent). Instances are immutable after
 * construction and safe to share across threads.
 */
struct DiffusionModel {
  int state_dim = 0;
  int wiener_dim = 0;
  int alpha_dim = 0;
  int beta_dim = 0;

  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> drift;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> diffusion;

  // optional: d x beta_dim Jacobian of the drift in beta
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      drift_jacobian_beta;
  // optional: partial derivatives of a(x, alpha) in each alpha component
  std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      diffusion_deriv_alpha;

  // structure flags that unlock cached contrast evaluation
  bool diffusion_state_independent = false;
  bool drift_affine_in_beta = false;

  Eigen::VectorXd x0;
  std::optional<OUSpec> ou;  // set for the built-in OU instance

  void validate_alpha(const Eigen::VectorXd& alpha) const;
  void validate_beta(const Eigen::VectorXd& beta) const;
};

// c(x, alpha) = a a^T, the squared diffusion coefficient.
Eigen::MatrixXd c_matrix(const DiffusionModel& model, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& alpha);

// c + 3 Lambda, the noise-inflated coefficient at the block scale.
Eigen::MatrixXd c_dagger(const DiffusionModel& model, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& alpha, const Eigen::MatrixXd& Lambda);

// delta^((2 - tau)/(tau - 1)); the weight the block contrast puts on Lambda.
// Throws ValidationError for tau <= 1 (exponent singular).
double noise_shift_factor(const SamplingScheme& scheme);

// c + 3 * noise_shift_factor * Lambda; equals c_dagger exactly when tau = 2.
Eigen::MatrixXd c_tau(const DiffusionModel& model, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& alpha, const Eigen::MatrixXd& Lambda,
                      const SamplingScheme& scheme);

// Derivatives of c in alpha: analytic chain rule through diffusion_deriv_alpha
// when available, otherwise central finite differences on c itself.
std::vector<Eigen::MatrixXd> c_deriv_alpha(const DiffusionModel& model,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& alpha);

// Drift Jacobian in beta: analytic hook or central finite differences.
Eigen::MatrixXd drift_jacobian(const DiffusionModel& model, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& beta);

// Build the OU instance with closed-form derivative hooks.
DiffusionModel make_ou_model(const OUSpec& spec);

}  // namespace lmm
