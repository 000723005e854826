#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "cdii/grid.hpp"
#include "cdii/types.hpp"

namespace cdii {

/// Per-node values of type T over a Grid<N>.  Plain value type; the grid
/// descriptor travels with the data so shape mismatches are checkable.
template <int N, class T>
struct Field {
  Grid<N> grid;
  std::vector<T> v;

  Field() = default;
  explicit Field(const Grid<N>& g) : grid(g), v(g.node_count()) {}
  Field(const Grid<N>& g, const T& init) : grid(g), v(g.node_count(), init) {}

  T& operator[](std::int64_t f) { return v[f]; }
  const T& operator[](std::int64_t f) const { return v[f]; }
  T& at(const NodeIndex<N>& i) { return v[grid.flat(i)]; }
  const T& at(const NodeIndex<N>& i) const { return v[grid.flat(i)]; }

  std::int64_t size() const { return static_cast<std::int64_t>(v.size()); }
};

template <int N>
using ScalarField = Field<N, double>;
template <int N>
using VectorField = Field<N, Vec<N>>;
template <int N>
using MatrixField = Field<N, Mat<N>>;

/// Antisymmetric coefficient matrix C of a 2-form, C_ij = c_ij for i<j,
/// C_ji = -c_ij, stored densely per node.
template <int N>
using TwoFormField = Field<N, Mat<N>>;

/// Samples a scalar function at every node.
template <int N>
ScalarField<N> sample(const Grid<N>& g, const std::function<double(Vec<N>)>& f) {
  ScalarField<N> out(g);
  g.for_each([&](const NodeIndex<N>& i, std::int64_t fl) { out[fl] = f(g.position(i)); });
  return out;
}

template <int N>
VectorField<N> sample_vector(const Grid<N>& g, const std::function<Vec<N>(Vec<N>)>& f) {
  VectorField<N> out(g);
  g.for_each([&](const NodeIndex<N>& i, std::int64_t fl) { out[fl] = f(g.position(i)); });
  return out;
}

template <int N>
MatrixField<N> sample_matrix(const Grid<N>& g, const std::function<Mat<N>(Vec<N>)>& f) {
  MatrixField<N> out(g);
  g.for_each([&](const NodeIndex<N>& i, std::int64_t fl) { out[fl] = f(g.position(i)); });
  return out;
}

inline bool entry_finite(double x) { return std::isfinite(x); }
template <class D>
bool entry_finite(const Eigen::MatrixBase<D>& m) {
  return m.allFinite();
}

/// All node values finite (fields must never carry NaN/inf).
template <int N, class T>
bool all_finite(const Field<N, T>& f) {
  for (const auto& x : f.v)
    if (!entry_finite(x)) return false;
  return true;
}

template <int N>
double sup_norm(const ScalarField<N>& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

template <int N>
double sup_norm(const VectorField<N>& f) {
  double m = 0.0;
  for (const auto& x : f.v) m = std::max(m, x.template lpNorm<Eigen::Infinity>());
  return m;
}

template <int N>
double sup_norm(const MatrixField<N>& f) {
  double m = 0.0;
  for (const auto& x : f.v) m = std::max(m, x.cwiseAbs().maxCoeff());
  return m;
}

/// Max-norm of the difference over a node box.
template <int N, class T>
double sup_diff(const Field<N, T>& a, const Field<N, T>& b, const Box<N>& box) {
  if (a.grid != b.grid) throw Error("sup_diff: grid mismatch");
  double m = 0.0;
  box.for_each([&](const NodeIndex<N>& i) {
    if constexpr (std::is_same_v<T, double>) {
      m = std::max(m, std::abs(a.at(i) - b.at(i)));
    } else {
      m = std::max(m, (a.at(i) - b.at(i)).cwiseAbs().maxCoeff());
    }
  });
  return m;
}

template <int N, class T>
double sup_diff(const Field<N, T>& a, const Field<N, T>& b) {
  return sup_diff(a, b, Box<N>::full(a.grid));
}

/// Grid-weighted L2 norm of the difference over a node box.
template <int N, class T>
double l2_diff(const Field<N, T>& a, const Field<N, T>& b, const Box<N>& box) {
  if (a.grid != b.grid) throw Error("l2_diff: grid mismatch");
  double cell = 1.0;
  for (int d = 0; d < N; ++d) cell *= a.grid.spacing[d];
  double s = 0.0;
  box.for_each([&](const NodeIndex<N>& i) {
    if constexpr (std::is_same_v<T, double>) {
      const double d = a.at(i) - b.at(i);
      s += d * d;
    } else {
      s += (a.at(i) - b.at(i)).squaredNorm();
    }
  });
  return std::sqrt(s * cell);
}

}  // namespace cdii
