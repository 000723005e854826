#pragma once

#include <Eigen/Dense>

namespace cdii {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N>
using Mat = Eigen::Matrix<double, N, N>;

/// Number of independent entries of a symmetric n x n matrix.
constexpr int sym_dim(int n) { return n * (n + 1) / 2; }

/// Number of independent entries of an antisymmetric n x n matrix.
constexpr int antisym_dim(int n) { return n * (n - 1) / 2; }

}  // namespace cdii
