#pragma once

#include "cdii/field.hpp"

namespace cdii {

namespace detail {

/// d/dx_axis of per-node data accessed through `get`, second order:
/// centered differences inside, one-sided three-point stencils on the
/// two boundary layers of that axis.
template <int N, class Get>
double stencil_derivative(const Grid<N>& g, NodeIndex<N> i, int axis, Get&& get) {
  const double h = g.spacing[axis];
  NodeIndex<N> a = i, b = i;
  if (i[axis] == 0) {
    a[axis] = 1;
    b[axis] = 2;
    // -3f0 + 4f1 - f2, grouped so constant fields give an exact zero.
    return (4.0 * (get(a) - get(i)) - (get(b) - get(i))) / (2.0 * h);
  }
  if (i[axis] == g.dims[axis] - 1) {
    a[axis] = i[axis] - 1;
    b[axis] = i[axis] - 2;
    return (4.0 * (get(i) - get(a)) - (get(i) - get(b))) / (2.0 * h);
  }
  a[axis] = i[axis] - 1;
  b[axis] = i[axis] + 1;
  return (get(b) - get(a)) / (2.0 * h);
}

}  // namespace detail

/// Nodewise d f / d x_axis.
template <int N>
ScalarField<N> partial_derivative(const ScalarField<N>& f, int axis) {
  ScalarField<N> out(f.grid);
  f.grid.for_each([&](const NodeIndex<N>& i, std::int64_t fl) {
    out[fl] = detail::stencil_derivative<N>(f.grid, i, axis,
                                         [&](const NodeIndex<N>& j) { return f.at(j); });
  });
  return out;
}

/// Gradient of a scalar field.
template <int N>
VectorField<N> gradient(const ScalarField<N>& f) {
  VectorField<N> out(f.grid);
  f.grid.for_each([&](const NodeIndex<N>& i, std::int64_t fl) {
    for (int a = 0; a < N; ++a)
      out[fl][a] = detail::stencil_derivative<N>(f.grid, i, a,
                                              [&](const NodeIndex<N>& j) { return f.at(j); });
  });
  return out;
}

/// Jacobian of a vector field, J(c,d) = d V^c / d x_d.
template <int N>
MatrixField<N> jacobian(const VectorField<N>& V) {
  MatrixField<N> out(V.grid);
  V.grid.for_each([&](const NodeIndex<N>& i, std::int64_t fl) {
    for (int c = 0; c < N; ++c)
      for (int d = 0; d < N; ++d)
        out[fl](c, d) = detail::stencil_derivative<N>(
            V.grid, i, d, [&](const NodeIndex<N>& j) { return V.at(j)[c]; });
  });
  return out;
}

/// Exterior derivative of a vector field (identified with a 1-form):
/// coefficient matrix C with C_ij = d_i V^j - d_j V^i (antisymmetric).
template <int N>
TwoFormField<N> exterior_derivative(const VectorField<N>& V) {
  TwoFormField<N> out(V.grid);
  const MatrixField<N> J = jacobian(V);
  for (std::int64_t f = 0; f < V.size(); ++f)
    out[f] = J[f].transpose() - J[f];
  return out;
}

/// Contraction of a 2-form with one vector: w(A, .) = C^T A.
template <int N>
VectorField<N> two_form_apply(const TwoFormField<N>& w, const VectorField<N>& A) {
  if (w.grid != A.grid) throw Error("two_form_apply: grid mismatch");
  VectorField<N> out(w.grid);
  for (std::int64_t f = 0; f < w.size(); ++f)
    out[f] = w[f].transpose() * A[f];
  return out;
}

/// Full contraction: w(A, B) = A^T C B.
template <int N>
ScalarField<N> two_form_apply(const TwoFormField<N>& w, const VectorField<N>& A,
                              const VectorField<N>& B) {
  if (w.grid != A.grid || w.grid != B.grid) throw Error("two_form_apply: grid mismatch");
  ScalarField<N> out(w.grid);
  for (std::int64_t f = 0; f < w.size(); ++f)
    out[f] = A[f].dot(w[f] * B[f]);
  return out;
}

/// Pointwise wedge of two vectors as a 2-form: (A ^ B)(C,D) = (A.C)(B.D) - (A.D)(B.C),
/// coefficient matrix A B^T - B A^T.
template <int N>
Mat<N> wedge(const Vec<N>& A, const Vec<N>& B) {
  return A * B.transpose() - B * A.transpose();
}

template <int N>
TwoFormField<N> wedge(const VectorField<N>& A, const VectorField<N>& B) {
  if (A.grid != B.grid) throw Error("wedge: grid mismatch");
  TwoFormField<N> out(A.grid);
  for (std::int64_t f = 0; f < A.size(); ++f)
    out[f] = wedge<N>(A[f], B[f]);
  return out;
}

/// Column-wise divergence of a matrix field: out_k = sum_l d_l M(l,k).
template <int N>
VectorField<N> divergence_columns(const MatrixField<N>& M) {
  VectorField<N> out(M.grid, Vec<N>::Zero());
  M.grid.for_each([&](const NodeIndex<N>& i, std::int64_t fl) {
    for (int k = 0; k < N; ++k) {
      double s = 0.0;
      for (int l = 0; l < N; ++l)
        s += detail::stencil_derivative<N>(M.grid, i, l,
                                        [&](const NodeIndex<N>& j) { return M.at(j)(l, k); });
      out[fl][k] = s;
    }
  });
  return out;
}

/// Lie bracket of vector fields: [X,Y] = (X . grad) Y - (Y . grad) X.
template <int N>
VectorField<N> lie_bracket(const VectorField<N>& X, const VectorField<N>& Y) {
  if (X.grid != Y.grid) throw Error("lie_bracket: grid mismatch");
  const MatrixField<N> JX = jacobian(X), JY = jacobian(Y);
  VectorField<N> out(X.grid);
  for (std::int64_t f = 0; f < X.size(); ++f)
    out[f] = JY[f] * X[f] - JX[f] * Y[f];
  return out;
}

}  // namespace cdii
