#include "lmm/optimizer.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "lmm/rng.hpp"

namespace lmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StartResult {
  Eigen::VectorXd x;
  double fmin = kInf;  // minimized value (negated objective)
  int iterations = 0;
  bool converged = false;
};

struct Trial {
  double t = 0.0;
  double f = kInf;
  double slope = kInf;  // directional derivative g.dot(dir)
  Eigen::VectorXd x;
  Eigen::VectorXd g;
};

class Minimizer {
 public:
  Minimizer(const ValueFn& value, const ValueGradFn& value_grad,
            const ParameterBox& box, const BfgsOptions& opts, long& evals)
      : value_(value), value_grad_(value_grad), box_(box), opts_(opts), evals_(evals) {}

  double eval(const Eigen::VectorXd& x) {
    ++evals_;
    const double v = value_(x);
    return std::isfinite(v) ? -v : kInf;
  }

  double eval_grad(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    if (value_grad_) {
      ++evals_;
      Eigen::VectorXd og(x.size());
      const double v = value_grad_(x, og);
      g = -og;
      return std::isfinite(v) ? -v : kInf;
    }
    // central differences on the value, one-sided next to non-finite spots
    const double f0 = eval(x);
    g.resize(x.size());
    for (int i = 0; i < x.size(); ++i) {
      const double step = opts_.fd_step * (1.0 + std::abs(x(i)));
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += step;
      xm(i) -= step;
      const double fp = eval(xp);
      const double fm = eval(xm);
      if (std::isfinite(fp) && std::isfinite(fm)) {
        g(i) = (fp - fm) / (2.0 * step);
      } else if (std::isfinite(fp) && std::isfinite(f0)) {
        g(i) = (fp - f0) / step;
      } else if (std::isfinite(fm) && std::isfinite(f0)) {
        g(i) = (f0 - fm) / step;
      } else {
        g(i) = 0.0;
      }
    }
    return f0;
  }

  bool at_lower(const Eigen::VectorXd& x, int i) const {
    const double edge = 1e-12 * (1.0 + std::abs(box_.upper(i) - box_.lower(i)));
    return x(i) <= box_.lower(i) + edge;
  }

  bool at_upper(const Eigen::VectorXd& x, int i) const {
    const double edge = 1e-12 * (1.0 + std::abs(box_.upper(i) - box_.lower(i)));
    return x(i) >= box_.upper(i) - edge;
  }

  // zero out gradient components that push outside the box at active bounds
  Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& g) const {
    Eigen::VectorXd pg = g;
    for (int i = 0; i < x.size(); ++i) {
      if (at_lower(x, i) && g(i) > 0.0) pg(i) = 0.0;
      if (at_upper(x, i) && g(i) < 0.0) pg(i) = 0.0;
    }
    return pg;
  }

  // zero out direction components that would leave the box at active bounds,
  // so the search ray stays feasible and the 1-d restriction stays smooth
  void freeze(const Eigen::VectorXd& x, Eigen::VectorXd& dir) const {
    for (int i = 0; i < x.size(); ++i) {
      if (at_lower(x, i) && dir(i) < 0.0) dir(i) = 0.0;
      if (at_upper(x, i) && dir(i) > 0.0) dir(i) = 0.0;
    }
  }

  // largest step along dir that stays inside the box (dir already frozen)
  double max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dir) const {
    double tmax = 1e12;
    for (int i = 0; i < x.size(); ++i) {
      if (dir(i) > 0.0) tmax = std::min(tmax, (box_.upper(i) - x(i)) / dir(i));
      else if (dir(i) < 0.0) tmax = std::min(tmax, (box_.lower(i) - x(i)) / dir(i));
    }
    return std::max(tmax, 0.0);
  }

  Trial probe(const Eigen::VectorXd& x, const Eigen::VectorXd& dir, double t) {
    Trial tr;
    tr.t = t;
    tr.x = box_.project(x + t * dir);
    tr.f = eval_grad(tr.x, tr.g);
    tr.slope = std::isfinite(tr.f) ? tr.g.dot(dir) : kInf;
    return tr;
  }

  // Strong Wolfe line search (bracket then bisection zoom) on the feasible
  // segment t in (0, tmax]. Accepting tmax with plain decrease activates a
  // bound, which is how the box constraint is enforced. Returns false only
  // when no trial achieved sufficient decrease.
  bool line_search(const Eigen::VectorXd& x, double f, const Eigen::VectorXd& g,
                   const Eigen::VectorXd& dir, Trial& out) {
    constexpr double c1 = 1e-4;
    constexpr double c2 = 0.9;
    const double slope0 = g.dot(dir);
    if (!(slope0 < 0.0)) return false;
    const double tmax = max_step(x, dir);
    if (!(tmax > 0.0)) return false;

    auto armijo = [&](const Trial& tr) {
      return tr.f <= f + c1 * tr.t * slope0;
    };
    auto curvature = [&](const Trial& tr) {
      return std::abs(tr.slope) <= c2 * std::abs(slope0);
    };

    Trial lo;  // best Armijo point found so far; t = 0 state to begin with
    lo.t = 0.0;
    lo.f = f;
    lo.slope = slope0;
    lo.x = x;
    lo.g = g;
    bool have_lo = false;

    // bracketing stage
    Trial hi;
    bool bracketed = false;
    double t = std::min(1.0, tmax);
    Trial prev = lo;
    for (int k = 0; k < 25; ++k) {
      Trial tr = probe(x, dir, t);
      if (!armijo(tr) || (k > 0 && tr.f >= prev.f)) {
        lo = prev;
        have_lo = have_lo || prev.t > 0.0;
        hi = tr;
        bracketed = true;
        break;
      }
      // sufficient decrease holds from here on
      if (curvature(tr)) {
        out = tr;
        return true;
      }
      if (tr.slope >= 0.0) {
        lo = tr;
        have_lo = true;
        hi = prev;
        bracketed = true;
        break;
      }
      if (t >= tmax * (1.0 - 1e-12)) {
        out = tr;  // ran into the box; the bound becomes active
        return true;
      }
      prev = tr;
      have_lo = true;
      t = std::min(2.5 * t, tmax);
    }
    if (!bracketed) {
      if (have_lo && prev.t > 0.0) {
        out = prev;
        return true;
      }
      return false;
    }

    // zoom stage: keep [lo, hi] with lo the lower of the two; invariant is
    // that lo satisfies sufficient decrease (or is the origin)
    for (int k = 0; k < 40; ++k) {
      const double tm = 0.5 * (lo.t + hi.t);
      if (std::abs(hi.t - lo.t) < 1e-14 * (1.0 + std::abs(lo.t))) break;
      Trial tr = probe(x, dir, tm);
      if (!armijo(tr) || tr.f >= lo.f) {
        hi = tr;
        continue;
      }
      if (curvature(tr)) {
        out = tr;
        return true;
      }
      if (tr.slope * (hi.t - lo.t) >= 0.0) hi = lo;
      lo = tr;
      have_lo = true;
    }
    if (have_lo && lo.t > 0.0 && armijo(lo)) {
      out = lo;
      return true;
    }

    // Endgame fallback: near a maximizer the attainable change per step can
    // sit below one ulp of the objective, where the Wolfe bookkeeping sees
    // only noise. Plain backtracking still accepts those microscopic but
    // genuine steps, letting the gradient keep shrinking.
    double tb = std::min(1.0, tmax);
    while (tb >= std::ldexp(1.0, -40)) {
      Trial tr = probe(x, dir, tb);
      if ((tr.x - x).norm() == 0.0) return false;
      if (std::isfinite(tr.f) && armijo(tr)) {
        out = tr;
        return true;
      }
      tb *= 0.5;
    }
    return false;
  }

  StartResult run(const Eigen::VectorXd& start) {
    const int m = static_cast<int>(start.size());
    StartResult res;
    Eigen::VectorXd x = box_.project(start);
    Eigen::VectorXd g(m);
    double f = eval_grad(x, g);
    res.x = x;
    res.fmin = f;
    if (!std::isfinite(f)) return res;  // dead start, multistart moves on

    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m);
    bool h_scaled = false;
    for (int it = 0; it < opts_.max_iterations; ++it) {
      res.iterations = it;
      const Eigen::VectorXd pg = projected_gradient(x, g);
      if (pg.lpNorm<Eigen::Infinity>() <
          opts_.gradient_tolerance * (1.0 + std::abs(f))) {
        res.converged = true;
        break;
      }

      Eigen::VectorXd dir = -(h * g);
      freeze(x, dir);
      bool steepest = false;
      if (!(g.dot(dir) < -1e-12 * dir.norm() * g.norm())) {
        h.setIdentity();
        h_scaled = false;
        dir = -pg;
        freeze(x, dir);
        steepest = true;
      }

      Trial step;
      bool accepted = line_search(x, f, g, dir, step);
      if (!accepted && !steepest) {
        // the curvature model misfired (commonly right after bounds became
        // active); retry once from scratch before giving up on the start
        h.setIdentity();
        h_scaled = false;
        dir = -pg;
        freeze(x, dir);
        accepted = line_search(x, f, g, dir, step);
      }
      if (!accepted) break;  // numerically stalled; report converged = false
      if (!std::isfinite(step.f)) break;

      const Eigen::VectorXd s = step.x - x;
      const Eigen::VectorXd y = step.g - g;
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        if (!h_scaled) {
          h *= sy / y.squaredNorm();
          h_scaled = true;
        }
        const double rho = 1.0 / sy;
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
        h = (eye - rho * s * y.transpose()) * h * (eye - rho * y * s.transpose()) +
            rho * s * s.transpose();
      }
      x = step.x;
      f = step.f;
      g = step.g;
      res.x = x;
      res.fmin = f;
    }
    return res;
  }

 private:
  const ValueFn& value_;
  const ValueGradFn& value_grad_;
  const ParameterBox& box_;
  const BfgsOptions& opts_;
  long& evals_;
};

}  // namespace

OptimReport maximize_box(const ValueFn& value, const ValueGradFn& value_grad,
                         const ParameterBox& box, const BfgsOptions& opts) {
  box.validate();
  if (!value) throw ValidationError("maximize_box: value function required");
  if (opts.multistarts < 1) throw ValidationError("maximize_box: need >= 1 start");

  const int m = box.dim();
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(box.center());
  auto eng = make_engine(mix_seed(opts.seed, kStreamOptimizer));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 1; s < opts.multistarts; ++s) {
    Eigen::VectorXd x(m);
    for (int i = 0; i < m; ++i)
      x(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * unit(eng);
    starts.push_back(x);
  }

  long evals = 0;
  Minimizer minimizer(value, value_grad, box, opts, evals);

  OptimReport best;
  best.objective = -kInf;
  best.x = box.project(box.center());
  for (int s = 0; s < static_cast<int>(starts.size()); ++s) {
    const StartResult r = minimizer.run(starts[s]);
    const double obj = std::isfinite(r.fmin) ? -r.fmin : -kInf;
    if (best.best_start < 0 || obj > best.objective) {
      best.objective = obj;
      best.x = r.x;
      best.iterations = r.iterations;
      best.converged = r.converged && std::isfinite(r.fmin);
      best.best_start = s;
    }
  }
  best.evaluations = evals;
  return best;
}

}  // namespace lmm
