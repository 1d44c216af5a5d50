#include "lmm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lmm {

namespace {

SamplingScheme finish(long n, double h, double tau, long p) {
  SamplingScheme s;
  s.n = n;
  s.h = h;
  s.tau = tau;
  s.p = p;
  s.k = n / p;
  s.delta = static_cast<double>(p) * h;
  if (s.k < 3)
    throw ValidationError("sampling scheme infeasible: k = " + std::to_string(s.k) +
                          " < 3 blocks (n=" + std::to_string(n) +
                          ", p=" + std::to_string(p) + ")");
  return s;
}

}  // namespace

SamplingScheme derive_scheme(long n, double h, double tau) {
  if (n < 3) throw ValidationError("derive_scheme: need n >= 3");
  if (!(h > 0.0)) throw ValidationError("derive_scheme: need h > 0");
  if (!(tau > 1.0) || !(tau <= 2.0))
    throw ValidationError("derive_scheme: tau must lie in (1, 2]");

  const double ideal = std::pow(h, -1.0 / tau);
  long p0 = std::llround(ideal);
  p0 = std::clamp(p0, 2L, std::max(2L, n / 3));

  long p = p0;
  const long lo = std::max(2L, p0 - 2);
  const long hi = std::min(n / 3, p0 + 2);
  for (long c = hi; c >= lo; --c) {
    if (n % c == 0) {
      p = c;
      break;
    }
  }
  return finish(n, h, tau, p);
}

SamplingScheme derive_scheme_with_p(long n, double h, double tau, long p) {
  if (n < 3) throw ValidationError("derive_scheme_with_p: need n >= 3");
  if (!(h > 0.0)) throw ValidationError("derive_scheme_with_p: need h > 0");
  if (!(tau > 1.0) || !(tau <= 2.0))
    throw ValidationError("derive_scheme_with_p: tau must lie in (1, 2]");
  if (p < 2) throw ValidationError("derive_scheme_with_p: need p >= 2");
  return finish(n, h, tau, p);
}

LocalMeanSeries local_means(const Eigen::MatrixXd& raw, const SamplingScheme& scheme) {
  const long d = raw.rows();
  if (scheme.p < 1 || scheme.k < 1)
    throw ValidationError("local_means: empty scheme");
  if (raw.cols() < scheme.used())
    throw ValidationError("local_means: series has " + std::to_string(raw.cols()) +
                          " observations, scheme needs " + std::to_string(scheme.used()));

  LocalMeanSeries out;
  out.scheme = scheme;
  out.means.resize(d, scheme.k);
  const double p = static_cast<double>(scheme.p);
  for (long j = 0; j < scheme.k; ++j) {
    const long base = j * scheme.p;
    for (long l = 0; l < d; ++l) {
      const double s = pairwise_sum(static_cast<std::size_t>(scheme.p),
                                    [&](std::size_t i) { return raw(l, base + static_cast<long>(i)); });
      out.means(l, j) = s / p;
    }
  }
  return out;
}

}  // namespace lmm
