#include "lmm/numutil.hpp"

#include <cmath>
#include <string>

namespace lmm {

Eigen::VectorXd vech(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ValidationError("vech: matrix must be square");
  const int d = static_cast<int>(m.rows());
  Eigen::VectorXd v(vech_size(d));
  int idx = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) v(idx++) = m(i, j);
  return v;
}

Eigen::MatrixXd unvech(const Eigen::VectorXd& v, int d) {
  if (v.size() != vech_size(d)) throw ValidationError("unvech: size mismatch");
  Eigen::MatrixXd m(d, d);
  int idx = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) {
      m(i, j) = v(idx);
      m(j, i) = v(idx);
      ++idx;
    }
  return m;
}

int vech_index(int i, int j, int d) {
  if (j > i) std::swap(i, j);
  if (i >= d || j < 0) throw ValidationError("vech_index: out of range");
  // offset of column j plus position within it
  return j * d - j * (j - 1) / 2 + (i - j);
}

Eigen::MatrixXd symmetric_psd_sqrt(const Eigen::MatrixXd& s, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("symmetric_psd_sqrt: eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) < -tol * scale)
      throw ValidationError("symmetric_psd_sqrt: negative eigenvalue " +
                            std::to_string(lam(i)));
    if (lam(i) < 0.0) lam(i) = 0.0;
  }
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace lmm
