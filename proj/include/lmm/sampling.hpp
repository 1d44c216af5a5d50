#pragma once

#include <Eigen/Dense>

#include "lmm/numutil.hpp"

namespace lmm {

/**
 * Block scheme tying together the observation grid (n steps of size h)
 * and the pre-averaging blocks: p consecutive observations per block,
 * k blocks, block duration delta = p*h. The tuning exponent tau in (1,2]
 * links the two scales via p ~ h^(-1/tau).
 */
struct SamplingScheme {
  long n = 0;        // number of observation increments
  double h = 0.0;    // observation step
  double tau = 2.0;  // block tuning exponent
  long p = 0;        // observations per block
  long k = 0;        // number of blocks
  double delta = 0.0;  // p * h

  long used() const { return k * p; }
  long dropped() const { return n - k * p; }
};

/**
 * Derive (p, k, delta) from (n, h, tau): p starts from round(h^(-1/tau))
 * clamped to [2, n/3]; if some divisor of n falls within +-2 of that,
 * the largest such divisor is used (avoids dropping a partial block when
 * an exact tiling is nearby); k = floor(n/p).
 * Throws ValidationError if the result has k < 3.
 */
SamplingScheme derive_scheme(long n, double h, double tau);

// Same but with caller-chosen p; only validates p >= 2 and k >= 3.
SamplingScheme derive_scheme_with_p(long n, double h, double tau, long p);

/**
 * Per-block arithmetic means of a series. Data convention throughout the
 * library: columns are time points, rows are components, so raw is
 * d x m with m >= scheme.k * scheme.p.
 */
struct LocalMeanSeries {
  Eigen::MatrixXd means;  // d x k
  SamplingScheme scheme;
};

LocalMeanSeries local_means(const Eigen::MatrixXd& raw, const SamplingScheme& scheme);

}  // namespace lmm
