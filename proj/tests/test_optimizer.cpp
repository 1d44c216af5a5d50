#include <cmath>
#include <limits>

#include "doctest.h"
#include "lmm/optimizer.hpp"

using namespace lmm;

namespace {

ParameterBox box2(double lo, double hi) {
  ParameterBox b;
  b.lower = Eigen::Vector2d(lo, lo);
  b.upper = Eigen::Vector2d(hi, hi);
  return b;
}

}  // namespace

TEST_CASE("concave quadratic is maximized at its vertex") {
  const Eigen::Vector2d target(0.7, -0.3);
  const ValueFn f = [&](const Eigen::VectorXd& x) {
    return -(x - target).squaredNorm();
  };
  const ValueGradFn fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = -2.0 * (x - target);
    return -(x - target).squaredNorm();
  };
  BfgsOptions opts;
  opts.seed = 3;

  SUBCASE("analytic gradient") {
    const OptimReport r = maximize_box(f, fg, box2(-2.0, 2.0), opts);
    CHECK(r.converged);
    CHECK((r.x - target).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(r.evaluations > 0);
  }
  SUBCASE("finite differences") {
    const OptimReport r = maximize_box(f, nullptr, box2(-2.0, 2.0), opts);
    CHECK(r.converged);
    CHECK((r.x - target).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("maximum on the boundary is found and flagged converged") {
  const ValueFn f = [](const Eigen::VectorXd& x) { return x(0) + 2.0 * x(1); };
  BfgsOptions opts;
  opts.seed = 5;
  const OptimReport r = maximize_box(f, nullptr, box2(0.0, 1.0), opts);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("multistart escapes the inferior well") {
  // two maxima near -1 and +1; +1 is higher
  const ValueFn f = [](const Eigen::VectorXd& x) {
    const double v = x(0);
    return -(v * v - 1.0) * (v * v - 1.0) + 0.3 * v;
  };
  ParameterBox b;
  b.lower = Eigen::VectorXd::Constant(1, -2.0);
  b.upper = Eigen::VectorXd::Constant(1, 2.0);
  BfgsOptions opts;
  opts.seed = 11;
  const OptimReport r = maximize_box(f, nullptr, b, opts);
  CHECK(r.x(0) > 0.9);
  CHECK(r.objective > 0.25);
}

TEST_CASE("optimization is deterministic given the seed") {
  const ValueFn f = [](const Eigen::VectorXd& x) {
    return -std::pow(x(0) - 0.2, 4) - x(1) * x(1) + std::sin(3.0 * x(0));
  };
  BfgsOptions opts;
  opts.seed = 77;
  const OptimReport a = maximize_box(f, nullptr, box2(-3.0, 3.0), opts);
  const OptimReport b = maximize_box(f, nullptr, box2(-3.0, 3.0), opts);
  CHECK(a.x == b.x);
  CHECK(a.objective == b.objective);
  CHECK(a.best_start == b.best_start);
}

TEST_CASE("ties go to the first start") {
  const ValueFn f = [](const Eigen::VectorXd&) { return 1.0; };
  BfgsOptions opts;
  opts.seed = 1;
  const OptimReport r = maximize_box(f, nullptr, box2(0.0, 4.0), opts);
  CHECK(r.best_start == 0);
  CHECK(r.x == Eigen::Vector2d(2.0, 2.0));  // box center
}

TEST_CASE("non-finite starts are skipped") {
  // value only finite in the left half of the box
  const ValueFn f = [](const Eigen::VectorXd& x) {
    if (x(0) > 1.0) return std::numeric_limits<double>::quiet_NaN();
    return -(x(0) + 1.0) * (x(0) + 1.0) - x(1) * x(1);
  };
  ParameterBox b = box2(-2.0, 2.0);
  BfgsOptions opts;
  opts.seed = 13;
  opts.multistarts = 8;
  const OptimReport r = maximize_box(f, nullptr, b, opts);
  CHECK(std::isfinite(r.objective));
  CHECK(r.x(0) == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("iteration budget is honored") {
  const Eigen::Vector2d target(0.7, -0.3);
  const ValueFn f = [&](const Eigen::VectorXd& x) {
    return -(x - target).squaredNorm();
  };
  BfgsOptions opts;
  opts.max_iterations = 1;
  opts.multistarts = 1;
  const OptimReport r = maximize_box(f, nullptr, box2(-2.0, 2.0), opts);
  CHECK(r.iterations <= 1);
}
