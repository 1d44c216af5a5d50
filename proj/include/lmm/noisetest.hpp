#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "lmm/sampling.hpp"

namespace lmm {

class NoiseTestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Outcome of the noise-detection test. The statistic compares the realized
 * quadratic variation of the component-sum series on the base grid against
 * the same quantity on a twice-coarser grid: without observation noise the
 * two agree asymptotically, with noise the fine grid picks up an extra
 * O(n) contribution, so large z favors rejecting "no noise".
 */
struct NoiseTestResult {
  double z = 0.0;
  double p_value = 1.0;  // upper tail of N(0,1) at z
  double sum_sq_fine = 0.0;
  double sum_sq_coarse = 0.0;
  double quartic_denom = 0.0;

  // rejection region z >= z_level, equivalently p_value <= level
  bool reject_at(double level) const { return p_value <= level; }
};

// Per-observation sum across components (columns stay time points).
Eigen::VectorXd component_sum_series(const Eigen::MatrixXd& raw);

/**
 * The statistic
 *   z = sqrt(2 p / (3 * quartic)) * (fine - coarse)
 * with fine the squared increments over i = 0..n-1, coarse the squared
 * two-step increments over i = 0..floor((n-2)/2), and quartic the fourth
 * powers of block-mean increments on the estimation scheme's blocks.
 * Throws NoiseTestError on a zero denominator (constant-like data).
 */
NoiseTestResult noise_test(const Eigen::MatrixXd& raw, const SamplingScheme& scheme);

}  // namespace lmm
