#include "lmm/model.hpp"

#include <cmath>
#include <string>

namespace lmm {

void ParameterBox::validate() const {
  if (lower.size() != upper.size())
    throw ValidationError("ParameterBox: lower/upper size mismatch");
  if (lower.size() == 0) throw ValidationError("ParameterBox: empty box");
  if (!((lower.array() <= upper.array()).all()))
    throw ValidationError("ParameterBox: lower > upper in some component");
}

bool ParameterBox::contains(const Eigen::VectorXd& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

Eigen::VectorXd ParameterBox::project(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

Eigen::VectorXd OUSpec::beta() const {
  const int d = dim();
  Eigen::VectorXd b(d * d + d);
  int idx = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) b(idx++) = B(i, j);
  for (int i = 0; i < d; ++i) b(idx++) = mu_shift(i);
  return b;
}

void OUSpec::validate() const {
  const int d = dim();
  if (B.rows() != d || B.cols() != d || A.rows() != d || A.cols() != d ||
      mu_shift.size() != d || x0.size() != d)
    throw ValidationError("OUSpec: inconsistent dimensions");
  if (!A.isApprox(A.transpose(), 1e-12))
    throw ValidationError("OUSpec: A must be symmetric");
}

bool OUSpec::mean_reverting() const {
  Eigen::EigenSolver<Eigen::MatrixXd> es(B);
  return (es.eigenvalues().real().array() < 0.0).all();
}

OUSpec OUSpec::from_parameters(const Eigen::VectorXd& alpha,
                               const Eigen::VectorXd& beta,
                               const Eigen::VectorXd& x0) {
  const int d = static_cast<int>(x0.size());
  if (alpha.size() != vech_size(d))
    throw ValidationError("OUSpec: alpha must have d(d+1)/2 components");
  if (beta.size() != d * d + d)
    throw ValidationError("OUSpec: beta must have d^2+d components");
  OUSpec spec;
  spec.A = unvech(alpha, d);
  spec.B.resize(d, d);
  int idx = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) spec.B(i, j) = beta(idx++);
  spec.mu_shift = beta.segment(d * d, d);
  spec.x0 = x0;
  return spec;
}

void DiffusionModel::validate_alpha(const Eigen::VectorXd& alpha) const {
  if (alpha.size() != alpha_dim)
    throw ValidationError("model: alpha has " + std::to_string(alpha.size()) +
                          " components, expected " + std::to_string(alpha_dim));
}

void DiffusionModel::validate_beta(const Eigen::VectorXd& beta) const {
  if (beta.size() != beta_dim)
    throw ValidationError("model: beta has " + std::to_string(beta.size()) +
                          " components, expected " + std::to_string(beta_dim));
}

Eigen::MatrixXd c_matrix(const DiffusionModel& model, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& alpha) {
  model.validate_alpha(alpha);
  const Eigen::MatrixXd a = model.diffusion(x, alpha);
  return a * a.transpose();
}

Eigen::MatrixXd c_dagger(const DiffusionModel& model, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& alpha, const Eigen::MatrixXd& Lambda) {
  return c_matrix(model, x, alpha) + 3.0 * Lambda;
}

double noise_shift_factor(const SamplingScheme& scheme) {
  if (!(scheme.tau > 1.0))
    throw ValidationError("noise_shift_factor: tau must exceed 1");
  if (!(scheme.delta > 0.0))
    throw ValidationError("noise_shift_factor: delta must be positive");
  // exponent is exactly 0 for tau = 2, so pow returns exactly 1
  return std::pow(scheme.delta, (2.0 - scheme.tau) / (scheme.tau - 1.0));
}

Eigen::MatrixXd c_tau(const DiffusionModel& model, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& alpha, const Eigen::MatrixXd& Lambda,
                      const SamplingScheme& scheme) {
  const double f = noise_shift_factor(scheme);
  return c_matrix(model, x, alpha) + (3.0 * f) * Lambda;
}

std::vector<Eigen::MatrixXd> c_deriv_alpha(const DiffusionModel& model,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& alpha) {
  model.validate_alpha(alpha);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(model.alpha_dim);
  if (model.diffusion_deriv_alpha) {
    const Eigen::MatrixXd a = model.diffusion(x, alpha);
    const auto da = model.diffusion_deriv_alpha(x, alpha);
    if (static_cast<int>(da.size()) != model.alpha_dim)
      throw ValidationError("diffusion_deriv_alpha: wrong number of matrices");
    for (const auto& dai : da) {
      Eigen::MatrixXd t = dai * a.transpose();
      out.push_back(t + t.transpose());
    }
    return out;
  }
  for (int i = 0; i < model.alpha_dim; ++i) {
    const double step = 1e-6 * (1.0 + std::abs(alpha(i)));
    Eigen::VectorXd ap = alpha, am = alpha;
    ap(i) += step;
    am(i) -= step;
    out.push_back((c_matrix(model, x, ap) - c_matrix(model, x, am)) / (2.0 * step));
  }
  return out;
}

Eigen::MatrixXd drift_jacobian(const DiffusionModel& model, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& beta) {
  model.validate_beta(beta);
  if (model.drift_jacobian_beta) return model.drift_jacobian_beta(x, beta);
  Eigen::MatrixXd jac(model.state_dim, model.beta_dim);
  for (int i = 0; i < model.beta_dim; ++i) {
    const double step = 1e-6 * (1.0 + std::abs(beta(i)));
    Eigen::VectorXd bp = beta, bm = beta;
    bp(i) += step;
    bm(i) -= step;
    jac.col(i) = (model.drift(x, bp) - model.drift(x, bm)) / (2.0 * step);
  }
  return jac;
}

DiffusionModel make_ou_model(const OUSpec& spec) {
  spec.validate();
  const int d = spec.dim();
  const int m1 = vech_size(d);
  const int m2 = d * d + d;

  DiffusionModel model;
  model.state_dim = d;
  model.wiener_dim = d;
  model.alpha_dim = m1;
  model.beta_dim = m2;
  model.diffusion_state_independent = true;
  model.drift_affine_in_beta = true;
  model.x0 = spec.x0;
  model.ou = spec;

  model.drift = [d](const Eigen::VectorXd& x, const Eigen::VectorXd& beta) {
    Eigen::VectorXd out = beta.segment(d * d, d);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) out(i) += beta(j * d + i) * x(j);
    return out;
  };

  model.diffusion = [d](const Eigen::VectorXd&, const Eigen::VectorXd& alpha) {
    return unvech(alpha, d);
  };

  model.drift_jacobian_beta = [d, m2](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d, m2);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) jac(i, j * d + i) = x(j);
    for (int i = 0; i < d; ++i) jac(i, d * d + i) = 1.0;
    return jac;
  };

  model.diffusion_deriv_alpha = [d, m1](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(m1);
    for (int j = 0; j < d; ++j)
      for (int i = j; i < d; ++i) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, d);
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        out.push_back(e);
      }
    return out;
  };

  return model;
}

}  // namespace lmm
