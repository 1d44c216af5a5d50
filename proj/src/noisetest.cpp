#include "lmm/noisetest.hpp"

#include <cmath>
#include <string>

namespace lmm {

Eigen::VectorXd component_sum_series(const Eigen::MatrixXd& raw) {
  Eigen::VectorXd s(raw.cols());
  for (long i = 0; i < raw.cols(); ++i) {
    double acc = 0.0;
    for (long l = 0; l < raw.rows(); ++l) acc += raw(l, i);
    s(i) = acc;
  }
  return s;
}

NoiseTestResult noise_test(const Eigen::MatrixXd& raw, const SamplingScheme& scheme) {
  const long n = scheme.n;
  if (n < 3) throw ValidationError("noise_test: need n >= 3");
  if (scheme.k < 3) throw ValidationError("noise_test: need k >= 3 blocks");
  if (raw.cols() < n + 1)
    throw ValidationError("noise_test: series has " + std::to_string(raw.cols()) +
                          " observations, scheme.n needs " + std::to_string(n + 1));
  if (raw.cols() < scheme.used())
    throw ValidationError("noise_test: series too short for the block scheme");

  const Eigen::VectorXd s = component_sum_series(raw);

  NoiseTestResult res;
  res.sum_sq_fine = pairwise_sum(static_cast<std::size_t>(n), [&](std::size_t t) {
    const double d = s(static_cast<long>(t) + 1) - s(static_cast<long>(t));
    return d * d;
  });

  const long coarse_terms = (n - 2) / 2 + 1;  // i = 0..floor((n-2)/2)
  res.sum_sq_coarse =
      pairwise_sum(static_cast<std::size_t>(coarse_terms), [&](std::size_t t) {
        const long i = static_cast<long>(t);
        const double d = s(2 * i + 2) - s(2 * i);
        return d * d;
      });

  // block means of the summed series on the estimation scheme's blocks
  const LocalMeanSeries sbar =
      local_means(s.transpose(), scheme);  // 1 x k
  res.quartic_denom =
      pairwise_sum(static_cast<std::size_t>(scheme.k - 2), [&](std::size_t t) {
        const long j = static_cast<long>(t) + 1;
        const double d = sbar.means(0, j + 1) - sbar.means(0, j);
        const double d2 = d * d;
        return d2 * d2;
      });

  if (!(res.quartic_denom > 0.0))
    throw NoiseTestError(
        "noise_test: zero quartic denominator (block means are constant; "
        "the data carries no usable variation)");

  res.z = std::sqrt(2.0 * static_cast<double>(scheme.p) / (3.0 * res.quartic_denom)) *
          (res.sum_sq_fine - res.sum_sq_coarse);
  res.p_value = normal_upper_tail(res.z);
  return res;
}

}  // namespace lmm
