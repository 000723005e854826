#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "cdii/error.hpp"
#include "cdii/types.hpp"

namespace cdii {

template <class D>
auto sym_part(const Eigen::MatrixBase<D>& m) {
  return ((m + m.transpose()) / 2.0).eval();
}

template <class D>
auto antisym_part(const Eigen::MatrixBase<D>& m) {
  return ((m - m.transpose()) / 2.0).eval();
}

template <class D>
double asymmetry(const Eigen::MatrixBase<D>& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// Principal square root of an SPD matrix via eigendecomposition.
template <int N>
Mat<N> spd_sqrt(const Mat<N>& m) {
  Eigen::SelfAdjointEigenSolver<Mat<N>> es(m);
  if (es.info() != Eigen::Success) throw Error("spd_sqrt: eigensolver failed");
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error("spd_sqrt: matrix not positive definite");
  return es.operatorSqrt();
}

template <int N>
Mat<N> spd_inv_sqrt(const Mat<N>& m) {
  Eigen::SelfAdjointEigenSolver<Mat<N>> es(m);
  if (es.info() != Eigen::Success) throw Error("spd_inv_sqrt: eigensolver failed");
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw Error("spd_inv_sqrt: matrix not positive definite");
  return es.operatorInverseSqrt();
}

/// Smallest / largest eigenvalue of a symmetric matrix.
template <int N>
std::pair<double, double> sym_eig_range(const Mat<N>& m) {
  Eigen::SelfAdjointEigenSolver<Mat<N>> es(sym_part(m));
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

/// Determinant by Gaussian elimination with partial pivoting.
///
/// Row operations subtract exact multiples, so matrices with two equal
/// (or exactly proportional by a power of two) rows eliminate to an exact
/// zero pivot and the result is exactly 0.  Used by the generalized cross
/// product, whose alternating/degeneracy guarantees rely on it.
inline double pivot_det(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(a(r, k)) > std::abs(a(p, k))) p = r;
    if (a(p, k) == 0.0) return 0.0;
    if (p != k) {
      a.row(p).swap(a.row(k));
      det = -det;
    }
    det *= a(k, k);
    for (int r = k + 1; r < n; ++r) {
      const double m = a(r, k) / a(k, k);
      a.row(r) -= m * a.row(k);
    }
  }
  return det;
}

}  // namespace cdii
