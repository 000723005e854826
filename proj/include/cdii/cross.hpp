#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "cdii/linalg.hpp"
#include "cdii/types.hpp"

namespace cdii {

/// Basis of the space of symmetric n x n matrices (dimension n(n+1)/2).
///
/// Coordinates are always taken with respect to the canonical orthonormal
/// basis {e_i x e_i} u {(e_i x e_j + e_j x e_i)/sqrt(2), i<j} under the
/// Frobenius inner product; a custom basis enters the cross product only
/// through its coordinate matrix and determinant.
template <int n>
struct SymBasis {
  std::vector<Mat<n>> elems;

  static constexpr int dim() { return sym_dim(n); }

  static SymBasis canonical() {
    SymBasis b;
    for (int i = 0; i < n; ++i) {
      Mat<n> m = Mat<n>::Zero();
      m(i, i) = 1.0;
      b.elems.push_back(m);
    }
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Mat<n> m = Mat<n>::Zero();
        m(i, j) = m(j, i) = r;
        b.elems.push_back(m);
      }
    return b;
  }

  /// Canonical orthonormal coordinates of a symmetric matrix.
  static Eigen::VectorXd coords(const Mat<n>& m) {
    Eigen::VectorXd c(dim());
    int k = 0;
    for (int i = 0; i < n; ++i) c[k++] = m(i, i);
    const double r = std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) c[k++] = r * m(i, j);
    return c;
  }

  static Mat<n> from_coords(const Eigen::VectorXd& c) {
    Mat<n> m = Mat<n>::Zero();
    int k = 0;
    for (int i = 0; i < n; ++i) m(i, i) = c[k++];
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        m(i, j) = m(j, i) = r * c[k];
        ++k;
      }
    return m;
  }

  /// Columns = canonical coordinates of the basis elements.
  Eigen::MatrixXd coord_matrix() const {
    Eigen::MatrixXd e(dim(), dim());
    for (int k = 0; k < dim(); ++k) e.col(k) = coords(elems[k]);
    return e;
  }
};

/// Generalized cross product of K-1 vectors in a K-dimensional inner-product
/// space, expressed in coordinates of an orthonormal realization.
///
/// Formal determinant with rows <V_i, e_j> and a last row of basis symbols,
/// expanded along the last row and normalized by det(e_1, ..., e_K); the
/// value is basis-independent.  Inputs are canonically sorted first (parity
/// tracked), so swapping two arguments negates the result bitwise; inputs
/// dependent below `dep_tol` times the product of their norms yield exactly 0.
inline Eigen::VectorXd cross_product(const Eigen::MatrixXd& basis_coords,
                                     const std::vector<Eigen::VectorXd>& inputs,
                                     double dep_tol = 1e-9) {
  const int K = static_cast<int>(basis_coords.rows());
  if (basis_coords.cols() != K) throw Error("cross_product: basis must be square");
  if (static_cast<int>(inputs.size()) != K - 1)
    throw Error("cross_product: needs exactly K-1 inputs");
  const double det_e = pivot_det(basis_coords);
  if (det_e == 0.0) throw Error("cross_product: degenerate basis");

  // Rows of the formal determinant: <V_i, e_j> = V_i . E_j.
  std::vector<Eigen::VectorXd> rows(K - 1);
  double norm_prod = 1.0;
  for (int i = 0; i < K - 1; ++i) {
    if (inputs[i].size() != K) throw Error("cross_product: input dimension mismatch");
    rows[i] = basis_coords.transpose() * inputs[i];
    norm_prod *= inputs[i].norm();
  }

  // Canonical row order (lexicographic), parity tracked, so the expansion
  // below is evaluated on identical data regardless of argument order.
  std::vector<int> perm(K - 1);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    return std::lexicographical_compare(rows[a].data(), rows[a].data() + K, rows[b].data(),
                                        rows[b].data() + K);
  });
  double parity = 1.0;
  {
    std::vector<int> p = perm;
    for (int i = 0; i < K - 1; ++i) {
      while (p[i] != i) {
        std::swap(p[i], p[p[i]]);
        parity = -parity;
      }
    }
  }

  Eigen::VectorXd result = Eigen::VectorXd::Zero(K);
  Eigen::MatrixXd minor(K - 1, K - 1);
  for (int j = 0; j < K; ++j) {
    for (int r = 0; r < K - 1; ++r) {
      int cc = 0;
      for (int c = 0; c < K; ++c)
        if (c != j) minor(r, cc++) = rows[perm[r]][c];
    }
    const double cof = pivot_det(minor);
    const double sign = ((K + j + 1) % 2 == 0) ? 1.0 : -1.0;
    result += (sign * cof) * basis_coords.col(j);
  }
  result *= parity / det_e;

  if (result.norm() < dep_tol * norm_prod) return Eigen::VectorXd::Zero(K);
  return result;
}

/// Cross product of n(n+1)/2 - 1 symmetric matrices within S_n.
template <int n>
Mat<n> cross_product_sym(const SymBasis<n>& basis, const std::vector<Mat<n>>& inputs,
                         double dep_tol = 1e-9) {
  std::vector<Eigen::VectorXd> c;
  c.reserve(inputs.size());
  for (const auto& m : inputs) c.push_back(SymBasis<n>::coords(m));
  return SymBasis<n>::from_coords(cross_product(basis.coord_matrix(), c, dep_tol));
}

}  // namespace cdii
