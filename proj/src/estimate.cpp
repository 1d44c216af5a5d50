#include "lmm/estimate.hpp"

#include <cmath>
#include <limits>

#include "lmm/rng.hpp"

namespace lmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logdet_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (int i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

Eigen::LLT<Eigen::MatrixXd> factor_or_throw(const Eigen::MatrixXd& m, long index) {
  if (!m.allFinite())
    throw SingularMatrixError("coefficient matrix non-finite at block " +
                              std::to_string(index), index);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw SingularMatrixError("coefficient matrix not positive definite at block " +
                              std::to_string(index), index);
  return llt;
}

/**
 * Shared evaluator for the diffusion-parameter contrasts (block version and
 * raw-increment version): value = -(1/2) sum_t [ quad_coeff * u_t^T M_t^-1 u_t
 * + log det M_t ], M_t = c(state_t, alpha) + shift. When c is
 * state-independent, M is constant and the whole data reduces to
 * Q = sum u u^T, making each evaluation O(d^3) instead of O(T d^3).
 */
struct AlphaContrast {
  const DiffusionModel* model = nullptr;
  Eigen::MatrixXd states;  // d x T
  Eigen::MatrixXd incr;    // d x T
  Eigen::MatrixXd shift;   // d x d
  double quad_coeff = 0.0;
  long first_index = 0;  // index reported for singularities on the fast path
  long count = 0;
  bool fast = false;
  Eigen::MatrixXd q;  // sum of u u^T (fast path only)

  void prepare() {
    count = incr.cols();
    fast = model->diffusion_state_independent;
    if (fast) {
      const int d = static_cast<int>(incr.rows());
      q.resize(d, d);
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
          const double s = pairwise_sum(static_cast<std::size_t>(count),
                                        [&](std::size_t t) {
                                          return incr(a, static_cast<long>(t)) *
                                                 incr(b, static_cast<long>(t));
                                        });
          q(a, b) = s;
          q(b, a) = s;
        }
    }
  }

  double value(const Eigen::VectorXd& alpha) const {
    if (fast) {
      const Eigen::MatrixXd m = c_matrix(*model, states.col(0), alpha) + shift;
      const auto llt = factor_or_throw(m, first_index);
      return -0.5 * (quad_coeff * llt.solve(q).trace() +
                     static_cast<double>(count) * logdet_from_llt(llt));
    }
    const double total = pairwise_sum(static_cast<std::size_t>(count), [&](std::size_t t) {
      const long j = static_cast<long>(t);
      const Eigen::MatrixXd m = c_matrix(*model, states.col(j), alpha) + shift;
      const auto llt = factor_or_throw(m, first_index + j);
      const Eigen::VectorXd u = incr.col(j);
      return quad_coeff * u.dot(llt.solve(u)) + logdet_from_llt(llt);
    });
    return -0.5 * total;
  }

  double value_grad(const Eigen::VectorXd& alpha, Eigen::VectorXd& grad) const {
    const int m1 = static_cast<int>(alpha.size());
    grad.setZero(m1);
    if (fast) {
      const Eigen::MatrixXd m = c_matrix(*model, states.col(0), alpha) + shift;
      const auto llt = factor_or_throw(m, first_index);
      const Eigen::MatrixXd minv =
          llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
      const Eigen::MatrixXd p = llt.solve(q);
      const auto dcs = c_deriv_alpha(*model, states.col(0), alpha);
      for (int i = 0; i < m1; ++i) {
        const double dquad = -(minv * dcs[i] * p).trace();
        const double dlogdet = (minv * dcs[i]).trace();
        grad(i) = -0.5 * (quad_coeff * dquad + static_cast<double>(count) * dlogdet);
      }
      return -0.5 * (quad_coeff * p.trace() +
                     static_cast<double>(count) * logdet_from_llt(llt));
    }
    double total = 0.0;
    for (long j = 0; j < count; ++j) {
      const Eigen::MatrixXd m = c_matrix(*model, states.col(j), alpha) + shift;
      const auto llt = factor_or_throw(m, first_index + j);
      const Eigen::MatrixXd minv =
          llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
      const Eigen::VectorXd u = incr.col(j);
      const Eigen::VectorXd w = minv * u;
      total += quad_coeff * u.dot(w) + logdet_from_llt(llt);
      const auto dcs = c_deriv_alpha(*model, states.col(j), alpha);
      for (int i = 0; i < m1; ++i) {
        grad(i) += -0.5 * (-quad_coeff * w.dot(dcs[i] * w) + (minv * dcs[i]).trace());
      }
    }
    return -0.5 * total;
  }
};

/**
 * Shared evaluator for the drift-parameter contrasts:
 *   value = -(1/(2 s)) sum_t R_t^T M_t^-1 R_t,  R_t = u_t - s b(state_t, beta).
 * With state-independent c and drift affine in beta the sum collapses to a
 * quadratic form in beta (cached P, qv, r0), so evaluations cost O(m2^2).
 */
struct BetaContrast {
  const DiffusionModel* model = nullptr;
  Eigen::MatrixXd states;
  Eigen::MatrixXd incr;
  Eigen::MatrixXd shift;
  double step = 0.0;
  Eigen::VectorXd alpha;
  long first_index = 0;
  long count = 0;
  bool fast = false;
  Eigen::MatrixXd p;   // sum J^T M^-1 J
  Eigen::VectorXd qv;  // sum J^T M^-1 u0,  u0 = u - s b(x, 0)
  double r0 = 0.0;     // sum u0^T M^-1 u0

  void prepare() {
    count = incr.cols();
    fast = model->diffusion_state_independent && model->drift_affine_in_beta;
    if (!fast) return;
    const int m2 = model->beta_dim;
    const Eigen::MatrixXd m = c_matrix(*model, states.col(0), alpha) + shift;
    const auto llt = factor_or_throw(m, first_index);
    const Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(m2);
    p.setZero(m2, m2);
    qv.setZero(m2);
    std::vector<double> quad(static_cast<std::size_t>(count));
    for (long j = 0; j < count; ++j) {
      const Eigen::VectorXd x = states.col(j);
      const Eigen::MatrixXd jac = drift_jacobian(*model, x, beta0);
      const Eigen::VectorXd u0 = incr.col(j) - step * model->drift(x, beta0);
      const Eigen::MatrixXd w = llt.solve(jac);  // d x m2
      p.noalias() += jac.transpose() * w;
      qv.noalias() += jac.transpose() * llt.solve(u0);
      quad[static_cast<std::size_t>(j)] = u0.dot(llt.solve(u0));
    }
    r0 = pairwise_sum(quad.size(), [&](std::size_t t) { return quad[t]; });
  }

  double value(const Eigen::VectorXd& beta) const {
    if (fast) {
      const double s = step;
      return -0.5 / s * (r0 - 2.0 * s * beta.dot(qv) + s * s * beta.dot(p * beta));
    }
    const double total = pairwise_sum(static_cast<std::size_t>(count), [&](std::size_t t) {
      const long j = static_cast<long>(t);
      const Eigen::MatrixXd m = c_matrix(*model, states.col(j), alpha) + shift;
      const auto llt = factor_or_throw(m, first_index + j);
      const Eigen::VectorXd r = incr.col(j) - step * model->drift(states.col(j), beta);
      return r.dot(llt.solve(r));
    });
    return -0.5 / step * total;
  }

  double value_grad(const Eigen::VectorXd& beta, Eigen::VectorXd& grad) const {
    if (fast) {
      grad = qv - step * (p * beta);
      return value(beta);
    }
    const int m2 = static_cast<int>(beta.size());
    grad.setZero(m2);
    double total = 0.0;
    for (long j = 0; j < count; ++j) {
      const Eigen::VectorXd x = states.col(j);
      const Eigen::MatrixXd m = c_matrix(*model, x, alpha) + shift;
      const auto llt = factor_or_throw(m, first_index + j);
      const Eigen::VectorXd r = incr.col(j) - step * model->drift(x, beta);
      const Eigen::VectorXd w = llt.solve(r);
      total += r.dot(w);
      grad.noalias() += drift_jacobian(*model, x, beta).transpose() * w;
    }
    return -0.5 / step * total;
  }
};

Eigen::MatrixXd increments(const Eigen::MatrixXd& series, long count) {
  return series.middleCols(1, count) - series.middleCols(0, count);
}

AlphaContrast block_alpha_contrast(const LocalMeanSeries& lm,
                                   const Eigen::MatrixXd& Lambda,
                                   const DiffusionModel& model) {
  const long k = lm.scheme.k;
  if (k < 3) throw ValidationError("contrast needs at least 3 blocks");
  AlphaContrast ac;
  ac.model = &model;
  ac.states = lm.means.leftCols(k - 2);
  ac.incr = lm.means.middleCols(2, k - 2) - lm.means.middleCols(1, k - 2);
  ac.shift = (3.0 * noise_shift_factor(lm.scheme)) * Lambda;
  ac.quad_coeff = 3.0 / (2.0 * lm.scheme.delta);
  ac.first_index = 1;
  ac.prepare();
  return ac;
}

BetaContrast block_beta_contrast(const LocalMeanSeries& lm, const Eigen::MatrixXd& Lambda,
                                 const Eigen::VectorXd& alpha,
                                 const DiffusionModel& model) {
  const long k = lm.scheme.k;
  if (k < 3) throw ValidationError("contrast needs at least 3 blocks");
  BetaContrast bc;
  bc.model = &model;
  bc.states = lm.means.leftCols(k - 2);
  bc.incr = lm.means.middleCols(2, k - 2) - lm.means.middleCols(1, k - 2);
  bc.shift = (3.0 * noise_shift_factor(lm.scheme)) * Lambda;
  bc.step = lm.scheme.delta;
  bc.alpha = alpha;
  bc.first_index = 1;
  bc.prepare();
  return bc;
}

AlphaContrast raw_alpha_contrast(const Eigen::MatrixXd& raw, double h,
                                 const DiffusionModel& model) {
  const long n = raw.cols() - 1;
  if (n < 1) throw ValidationError("raw contrast needs at least 2 observations");
  if (!(h > 0.0)) throw ValidationError("raw contrast needs h > 0");
  AlphaContrast ac;
  ac.model = &model;
  ac.states = raw.leftCols(n);
  ac.incr = increments(raw, n);
  ac.shift = Eigen::MatrixXd::Zero(raw.rows(), raw.rows());
  ac.quad_coeff = 1.0 / h;
  ac.first_index = 0;
  ac.prepare();
  return ac;
}

BetaContrast raw_beta_contrast(const Eigen::MatrixXd& raw, double h,
                               const Eigen::VectorXd& alpha,
                               const DiffusionModel& model) {
  const long n = raw.cols() - 1;
  if (n < 1) throw ValidationError("raw contrast needs at least 2 observations");
  if (!(h > 0.0)) throw ValidationError("raw contrast needs h > 0");
  BetaContrast bc;
  bc.model = &model;
  bc.states = raw.leftCols(n);
  bc.incr = increments(raw, n);
  bc.shift = Eigen::MatrixXd::Zero(raw.rows(), raw.rows());
  bc.step = h;
  bc.alpha = alpha;
  bc.first_index = 0;
  bc.prepare();
  return bc;
}

template <class Contrast>
OptimReport optimize_contrast(const Contrast& contrast, const ParameterBox& box,
                              BfgsOptions opts) {
  const ValueFn value = [&](const Eigen::VectorXd& x) {
    try {
      return contrast.value(x);
    } catch (const SingularMatrixError&) {
      return -kInf;
    }
  };
  const ValueGradFn value_grad = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    try {
      return contrast.value_grad(x, g);
    } catch (const SingularMatrixError&) {
      g.setZero(x.size());
      return -kInf;
    }
  };
  return maximize_box(value, value_grad, box, opts);
}

StageInfo stage_info(const OptimReport& r) {
  StageInfo s;
  s.iterations = r.iterations;
  s.objective = r.objective;
  s.converged = r.converged;
  s.evaluations = r.evaluations;
  s.best_start = r.best_start;
  return s;
}

bool on_boundary(const Eigen::VectorXd& x, const ParameterBox& box) {
  for (int i = 0; i < x.size(); ++i) {
    const double edge = 1e-9 * (1.0 + box.upper(i) - box.lower(i));
    if (x(i) <= box.lower(i) + edge || x(i) >= box.upper(i) - edge) return true;
  }
  return false;
}

void validate_boxes(const DiffusionModel& model, const ParameterBoxes& boxes) {
  boxes.alpha.validate();
  boxes.beta.validate();
  if (boxes.alpha.dim() != model.alpha_dim)
    throw ValidationError("alpha box has " + std::to_string(boxes.alpha.dim()) +
                          " components, model expects " +
                          std::to_string(model.alpha_dim));
  if (boxes.beta.dim() != model.beta_dim)
    throw ValidationError("beta box has " + std::to_string(boxes.beta.dim()) +
                          " components, model expects " + std::to_string(model.beta_dim));
}

}  // namespace

Eigen::MatrixXd estimate_lambda(const Eigen::MatrixXd& raw) {
  const long n = raw.cols() - 1;
  if (n < 1) throw ValidationError("estimate_lambda: need at least 2 observations");
  const int d = static_cast<int>(raw.rows());
  Eigen::MatrixXd out(d, d);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      const double s =
          pairwise_sum(static_cast<std::size_t>(n), [&](std::size_t t) {
            const long i = static_cast<long>(t);
            return (raw(a, i + 1) - raw(a, i)) * (raw(b, i + 1) - raw(b, i));
          });
      out(a, b) = s * scale;
      out(b, a) = out(a, b);
    }
  return out;
}

double quasi_lik1(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& Lambda,
                  const LocalMeanSeries& lm, const DiffusionModel& model) {
  model.validate_alpha(alpha);
  return block_alpha_contrast(lm, Lambda, model).value(alpha);
}

double quasi_lik1_with_gradient(const Eigen::VectorXd& alpha,
                                const Eigen::MatrixXd& Lambda,
                                const LocalMeanSeries& lm, const DiffusionModel& model,
                                Eigen::VectorXd& grad) {
  model.validate_alpha(alpha);
  return block_alpha_contrast(lm, Lambda, model).value_grad(alpha, grad);
}

double quasi_lik2(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Lambda,
                  const Eigen::VectorXd& alpha, const LocalMeanSeries& lm,
                  const DiffusionModel& model) {
  model.validate_alpha(alpha);
  model.validate_beta(beta);
  return block_beta_contrast(lm, Lambda, alpha, model).value(beta);
}

double quasi_lik2_with_gradient(const Eigen::VectorXd& beta,
                                const Eigen::MatrixXd& Lambda,
                                const Eigen::VectorXd& alpha, const LocalMeanSeries& lm,
                                const DiffusionModel& model, Eigen::VectorXd& grad) {
  model.validate_alpha(alpha);
  model.validate_beta(beta);
  return block_beta_contrast(lm, Lambda, alpha, model).value_grad(beta, grad);
}

double lga_alpha_objective(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& raw,
                           double h, const DiffusionModel& model) {
  model.validate_alpha(alpha);
  return raw_alpha_contrast(raw, h, model).value(alpha);
}

double lga_beta_objective(const Eigen::VectorXd& beta, const Eigen::VectorXd& alpha,
                          const Eigen::MatrixXd& raw, double h,
                          const DiffusionModel& model) {
  model.validate_alpha(alpha);
  model.validate_beta(beta);
  return raw_beta_contrast(raw, h, alpha, model).value(beta);
}

EstimationResult adaptive_estimate(const Eigen::MatrixXd& raw,
                                   const SamplingScheme& scheme,
                                   const DiffusionModel& model,
                                   const ParameterBoxes& boxes,
                                   const EstimateOptions& opts) {
  validate_boxes(model, boxes);
  if (raw.rows() != model.state_dim)
    throw ValidationError("adaptive_estimate: data dimension mismatch");

  const LocalMeanSeries lm = local_means(raw, scheme);

  EstimationResult result;
  result.Lambda_hat = estimate_lambda(raw);
  result.theta_eps_hat = vech(result.Lambda_hat);

  const AlphaContrast ac = block_alpha_contrast(lm, result.Lambda_hat, model);
  BfgsOptions alpha_opts = opts.optimizer;
  alpha_opts.seed = mix_seed(opts.optimizer.seed, 21);
  const OptimReport alpha_report = optimize_contrast(ac, boxes.alpha, alpha_opts);
  result.alpha_hat = alpha_report.x;
  result.stage_alpha = stage_info(alpha_report);
  result.alpha_on_boundary = on_boundary(result.alpha_hat, boxes.alpha);

  const BetaContrast bc = block_beta_contrast(lm, result.Lambda_hat, result.alpha_hat, model);
  BfgsOptions beta_opts = opts.optimizer;
  beta_opts.seed = mix_seed(opts.optimizer.seed, 22);
  const OptimReport beta_report = optimize_contrast(bc, boxes.beta, beta_opts);
  result.beta_hat = beta_report.x;
  result.stage_beta = stage_info(beta_report);
  result.beta_on_boundary = on_boundary(result.beta_hat, boxes.beta);

  result.rates.lambda = std::sqrt(static_cast<double>(scheme.n));
  result.rates.alpha = std::sqrt(static_cast<double>(scheme.k));
  result.rates.beta = std::sqrt(static_cast<double>(scheme.k) * scheme.delta);

  if (opts.compute_stderr) {
    const Eigen::VectorXd xi4 =
        opts.noise_fourth_moment
            ? *opts.noise_fourth_moment
            : Eigen::VectorXd::Constant(model.state_dim, 3.0);
    const AsymptoticCovariance cov =
        plugin_asymptotic_cov(result, lm, model, scheme, xi4);
    result.std_errors = StdErrors{cov.se_lambda, cov.se_alpha, cov.se_beta};
  }
  return result;
}

EstimationResult lga_estimate(const Eigen::MatrixXd& raw, double h,
                              const DiffusionModel& model, const ParameterBoxes& boxes,
                              const EstimateOptions& opts) {
  validate_boxes(model, boxes);
  if (raw.rows() != model.state_dim)
    throw ValidationError("lga_estimate: data dimension mismatch");
  const long n = raw.cols() - 1;

  EstimationResult result;

  const AlphaContrast ac = raw_alpha_contrast(raw, h, model);
  BfgsOptions alpha_opts = opts.optimizer;
  alpha_opts.seed = mix_seed(opts.optimizer.seed, 31);
  const OptimReport alpha_report = optimize_contrast(ac, boxes.alpha, alpha_opts);
  result.alpha_hat = alpha_report.x;
  result.stage_alpha = stage_info(alpha_report);
  result.alpha_on_boundary = on_boundary(result.alpha_hat, boxes.alpha);

  const BetaContrast bc = raw_beta_contrast(raw, h, result.alpha_hat, model);
  BfgsOptions beta_opts = opts.optimizer;
  beta_opts.seed = mix_seed(opts.optimizer.seed, 32);
  const OptimReport beta_report = optimize_contrast(bc, boxes.beta, beta_opts);
  result.beta_hat = beta_report.x;
  result.stage_beta = stage_info(beta_report);
  result.beta_on_boundary = on_boundary(result.beta_hat, boxes.beta);

  result.rates.lambda = std::numeric_limits<double>::quiet_NaN();
  result.rates.alpha = std::sqrt(static_cast<double>(n));
  result.rates.beta = std::sqrt(static_cast<double>(n) * h);
  return result;
}

AsymptoticCovariance plugin_asymptotic_cov(const EstimationResult& result,
                                           const LocalMeanSeries& lm,
                                           const DiffusionModel& model,
                                           const SamplingScheme& scheme,
                                           const Eigen::VectorXd& noise_fourth_moment) {
  const int d = model.state_dim;
  const int dv = vech_size(d);
  const int m1 = model.alpha_dim;
  const int m2 = model.beta_dim;
  if (result.Lambda_hat.rows() != d)
    throw ValidationError("plugin_asymptotic_cov: result lacks a noise variance stage");
  if (noise_fourth_moment.size() != d)
    throw ValidationError("plugin_asymptotic_cov: fourth-moment vector size mismatch");

  AsymptoticCovariance out;
  if (result.alpha_on_boundary)
    out.warnings.push_back("alpha estimate sits on its box boundary");
  if (result.beta_on_boundary)
    out.warnings.push_back("beta estimate sits on its box boundary");

  const Eigen::MatrixXd& Lam = result.Lambda_hat;
  const Eigen::MatrixXd lhalf = symmetric_psd_sqrt(Lam);

  // noise-variance block over vech pairs
  out.W1.resize(dv, dv);
  for (int a = 0; a < dv; ++a)
    for (int b = 0; b < dv; ++b) out.W1(a, b) = 0.0;
  {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(dv);
    for (int j = 0; j < d; ++j)
      for (int i = j; i < d; ++i) pairs.emplace_back(i, j);
    for (int a = 0; a < dv; ++a)
      for (int b = 0; b < dv; ++b) {
        const auto [l1, l2] = pairs[a];
        const auto [l3, l4] = pairs[b];
        double kurt = 0.0;
        for (int k = 0; k < d; ++k)
          kurt += lhalf(l1, k) * lhalf(l2, k) * lhalf(l3, k) * lhalf(l4, k) *
                  (noise_fourth_moment(k) - 3.0);
        out.W1(a, b) = kurt + 1.5 * (Lam(l1, l3) * Lam(l2, l4) + Lam(l1, l4) * Lam(l2, l3));
      }
  }
  out.cov_lambda = out.W1;

  const bool tau2 = scheme.tau == 2.0;
  const long k = lm.scheme.k;
  const Eigen::VectorXd& alpha = result.alpha_hat;
  const Eigen::VectorXd& beta = result.beta_hat;

  out.I22.setZero(m1, m1);
  out.J22.setZero(m1, m1);
  out.I33.setZero(m2, m2);
  out.J33.setZero(m2, m2);

  for (long j = 0; j < k; ++j) {
    const Eigen::VectorXd x = lm.means.col(j);
    const Eigen::MatrixXd c = c_matrix(model, x, alpha);
    const Eigen::MatrixXd g = tau2 ? Eigen::MatrixXd(c + 3.0 * Lam) : c;
    const auto llt = factor_or_throw(g, j);
    const Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(d, d));

    const auto dcs = c_deriv_alpha(model, x, alpha);
    std::vector<Eigen::MatrixXd> abar(m1);
    for (int i = 0; i < m1; ++i) {
      const Eigen::MatrixXd t = 0.75 * ginv * dcs[i] * ginv;
      abar[i] = 0.5 * (t + t.transpose());
    }
    for (int i1 = 0; i1 < m1; ++i1)
      for (int i2 = 0; i2 < m1; ++i2) {
        if (tau2) {
          out.I22(i1, i2) += (abar[i1] * c * abar[i2] * c +
                              4.0 * abar[i1] * c * abar[i2] * Lam +
                              12.0 * abar[i1] * Lam * abar[i2] * Lam)
                                 .trace();
        } else {
          out.I22(i1, i2) += (abar[i1] * c * abar[i2] * c).trace();
        }
        out.J22(i1, i2) += 0.5 * (ginv * dcs[i1] * ginv * dcs[i2]).trace();
      }

    const Eigen::MatrixXd jac = drift_jacobian(model, x, beta);
    const Eigen::MatrixXd f = jac.transpose() * ginv;  // m2 x d
    out.I33.noalias() += f * c * f.transpose();
    out.J33.noalias() += f * jac;
  }
  const double invk = 1.0 / static_cast<double>(k);
  out.I22 *= invk;
  out.J22 *= invk;
  out.I33 *= invk;
  out.J33 *= invk;

  auto sandwich = [](const Eigen::MatrixXd& jmat, const Eigen::MatrixXd& imat,
                     const char* name) {
    Eigen::LLT<Eigen::MatrixXd> llt(jmat);
    if (llt.info() != Eigen::Success)
      throw SingularMatrixError(std::string(name) + " information block singular", -1);
    const Eigen::MatrixXd jinv =
        llt.solve(Eigen::MatrixXd::Identity(jmat.rows(), jmat.cols()));
    return Eigen::MatrixXd(jinv * imat * jinv);
  };
  out.cov_alpha = sandwich(out.J22, out.I22, "alpha");
  out.cov_beta = sandwich(out.J33, out.I33, "beta");

  out.full_cov.setZero(dv + m1 + m2, dv + m1 + m2);
  out.full_cov.topLeftCorner(dv, dv) = out.cov_lambda;
  out.full_cov.block(dv, dv, m1, m1) = out.cov_alpha;
  out.full_cov.bottomRightCorner(m2, m2) = out.cov_beta;

  const double rn = std::sqrt(static_cast<double>(scheme.n));
  const double rk = std::sqrt(static_cast<double>(scheme.k));
  const double rkd = std::sqrt(static_cast<double>(scheme.k) * scheme.delta);
  out.se_lambda = out.cov_lambda.diagonal().cwiseMax(0.0).cwiseSqrt() / rn;
  out.se_alpha = out.cov_alpha.diagonal().cwiseMax(0.0).cwiseSqrt() / rk;
  out.se_beta = out.cov_beta.diagonal().cwiseMax(0.0).cwiseSqrt() / rkd;
  return out;
}

}  // namespace lmm
