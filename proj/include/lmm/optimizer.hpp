#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "lmm/model.hpp"

namespace lmm {

using ValueFn = std::function<double(const Eigen::VectorXd&)>;
// returns the value and fills the gradient
using ValueGradFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct BfgsOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;  // scaled by (1 + |objective|)
  int multistarts = 5;               // box center plus seeded uniform draws
  std::uint64_t seed = 0;            // drives the random starts
  double fd_step = 1e-6;             // relative central-difference step
};

struct OptimReport {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;       // of the winning start
  bool converged = false;   // of the winning start
  long evaluations = 0;     // objective evaluations across all starts
  int best_start = -1;      // 0 = box center
};

/**
 * Maximize a (possibly non-concave) objective over a box with a projected
 * BFGS quasi-Newton search from multiple starts: the box center plus
 * seeded uniform draws. Gradients come from value_grad when supplied,
 * otherwise central finite differences of value. Non-finite objective
 * values mark a start as failed; the best finite start wins, ties going
 * to the lower start index. Convergence is declared when the projected
 * gradient (components pushing out of the box at an active bound are
 * zeroed) has infinity norm below gradient_tolerance * (1 + |objective|).
 */
OptimReport maximize_box(const ValueFn& value, const ValueGradFn& value_grad,
                         const ParameterBox& box, const BfgsOptions& opts);

}  // namespace lmm
