#pragma once

#include <cstdint>
#include <vector>

#include "cdii/field.hpp"
#include "cdii/linalg.hpp"

namespace cdii {

/// Nodewise two-sided ellipticity audit of a matrix field.
template <int N>
struct SpdReport {
  bool pass = false;
  double min_lambda_min = 0.0;   // worst smallest eigenvalue
  double max_lambda_max = 0.0;   // worst largest eigenvalue
  double max_asymmetry = 0.0;    // sup |M - M^T| entrywise
  std::int64_t argmin_node = -1; // node attaining min_lambda_min
  std::int64_t argmax_node = -1;
  std::vector<std::uint8_t> node_pass;
};

/// Checks 1/kappa |xi|^2 <= xi . M xi <= kappa |xi|^2 at every node
/// (eigenvalues of the symmetrized matrix against [1/kappa, kappa]).
template <int N>
SpdReport<N> spd_check(const MatrixField<N>& M, double kappa) {
  if (!(kappa >= 1.0)) throw Error("spd_check: kappa must be >= 1");
  SpdReport<N> rep;
  rep.node_pass.assign(M.v.size(), 0);
  bool first = true;
  for (std::int64_t f = 0; f < M.size(); ++f) {
    rep.max_asymmetry = std::max(rep.max_asymmetry, asymmetry(M[f]));
    const auto [lo, hi] = sym_eig_range<N>(M[f]);
    if (first || lo < rep.min_lambda_min) {
      rep.min_lambda_min = lo;
      rep.argmin_node = f;
    }
    if (first || hi > rep.max_lambda_max) {
      rep.max_lambda_max = hi;
      rep.argmax_node = f;
    }
    first = false;
    rep.node_pass[f] = (lo >= 1.0 / kappa && hi <= kappa) ? 1 : 0;
  }
  rep.pass = rep.min_lambda_min >= 1.0 / kappa && rep.max_lambda_max <= kappa;
  return rep;
}

}  // namespace cdii
