#pragma once

#include <cmath>

#include "cdii/field.hpp"
#include "cdii/linalg.hpp"
#include "cdii/spd.hpp"

namespace cdii {

/// Symmetric positive definite conductivity tensor field together with its
/// multiplicative decomposition gamma = beta * gamma_tilde, where
/// beta = det(gamma)^{1/n} and det(gamma_tilde) = 1.
template <int N>
struct ConductivityField {
  MatrixField<N> gamma;
  ScalarField<N> beta;
  MatrixField<N> gamma_tilde;
  double kappa = 1.0;  // two-sided ellipticity bound

  /// Builds the decomposition from the full tensor.  kappa, when not
  /// supplied, is measured from the field's eigenvalue range.
  static ConductivityField from_gamma(const MatrixField<N>& g, double kappa = 0.0) {
    ConductivityField<N> out;
    out.gamma = g;
    out.beta = ScalarField<N>(g.grid);
    out.gamma_tilde = MatrixField<N>(g.grid);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::int64_t f = 0; f < g.size(); ++f) {
      if (asymmetry(g[f]) > 1e-10)
        throw HypothesisError("conductivity: tensor not symmetric at node " + std::to_string(f));
      const auto [lmin, lmax] = sym_eig_range<N>(g[f]);
      if (lmin <= 0.0)
        throw HypothesisError("conductivity: tensor not positive definite at node " +
                              std::to_string(f));
      lo = first ? lmin : std::min(lo, lmin);
      hi = first ? lmax : std::max(hi, lmax);
      first = false;
      const double b = std::pow(g[f].determinant(), 1.0 / N);
      out.beta[f] = b;
      out.gamma_tilde[f] = g[f] / b;
    }
    out.kappa = kappa > 0.0 ? kappa : std::max({hi, 1.0 / lo, 1.0});
    return out;
  }

  /// Assembles gamma = beta * gamma_tilde from the two factors.
  static ConductivityField from_parts(const ScalarField<N>& beta,
                                      const MatrixField<N>& gamma_tilde, double kappa = 0.0) {
    if (beta.grid != gamma_tilde.grid) throw Error("conductivity: grid mismatch");
    MatrixField<N> g(beta.grid);
    for (std::int64_t f = 0; f < beta.size(); ++f) {
      if (!(beta[f] > 0.0))
        throw HypothesisError("conductivity: beta must be positive at node " + std::to_string(f));
      g[f] = beta[f] * gamma_tilde[f];
    }
    return from_gamma(g, kappa);
  }

  /// Max deviation of det(gamma_tilde) from 1 (consistency diagnostic).
  double det_defect() const {
    double m = 0.0;
    for (const auto& g : gamma_tilde.v) m = std::max(m, std::abs(g.determinant() - 1.0));
    return m;
  }
};

}  // namespace cdii
