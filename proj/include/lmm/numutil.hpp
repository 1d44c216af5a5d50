#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>

namespace lmm {

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Deterministic pairwise (tree) summation of term(0..count-1).
 * Rounding error grows like O(log n) ulp instead of O(n), and the
 * reduction order is fixed, so results are reproducible regardless
 * of how callers parallelize around it.
 */
template <class F>
double pairwise_sum(std::size_t count, F&& term) {
  struct Rec {
    static double go(std::size_t lo, std::size_t hi, F& f) {
      if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        return s;
      }
      const std::size_t mid = lo + (hi - lo) / 2;
      return go(lo, mid, f) + go(mid, hi, f);
    }
  };
  if (count == 0) return 0.0;
  return Rec::go(0, count, term);
}

// Half-vectorization: stack the lower triangle column by column.
// d=2 order: (1,1), (2,1), (2,2).
Eigen::VectorXd vech(const Eigen::MatrixXd& m);

// Inverse of vech for a symmetric matrix of dimension d.
Eigen::MatrixXd unvech(const Eigen::VectorXd& v, int d);

// Position of entry (i,j), i >= j, inside vech of a d x d matrix.
int vech_index(int i, int j, int d);

// Number of vech components for dimension d.
inline int vech_size(int d) { return d * (d + 1) / 2; }

/**
 * Symmetric PSD square root via eigendecomposition. Eigenvalues in
 * [-tol*scale, 0) are clipped to 0; anything below that is an error.
 */
Eigen::MatrixXd symmetric_psd_sqrt(const Eigen::MatrixXd& s, double tol = 1e-12);

// Upper tail P(N(0,1) >= z), evaluated through erfc for far-tail accuracy.
double normal_upper_tail(double z);

}  // namespace lmm
