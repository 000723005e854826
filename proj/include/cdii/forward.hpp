#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cdii/conductivity.hpp"
#include "cdii/exterior.hpp"
#include "cdii/field.hpp"
#include "cdii/solver.hpp"

namespace cdii {

/// Dirichlet boundary data on a grid.  Stored as a full-size value array;
/// only boundary-node entries participate in solves.
template <int N>
struct BoundaryCondition {
  Grid<N> grid;
  std::vector<double> values;

  BoundaryCondition() = default;
  explicit BoundaryCondition(const Grid<N>& g) : grid(g), values(g.node_count(), 0.0) {}

  static BoundaryCondition from_function(const Grid<N>& g,
                                         const std::function<double(Vec<N>)>& f) {
    BoundaryCondition bc(g);
    g.for_each([&](const NodeIndex<N>& i, std::int64_t fl) {
      if (g.is_boundary(i)) bc.values[fl] = f(g.position(i));
    });
    return bc;
  }

  static BoundaryCondition from_field(const ScalarField<N>& f) {
    BoundaryCondition bc(f.grid);
    f.grid.for_each([&](const NodeIndex<N>& i, std::int64_t fl) {
      if (f.grid.is_boundary(i)) bc.values[fl] = f[fl];
    });
    return bc;
  }
};

/// Interior-node system for -div(gamma grad u) = f with Dirichlet data
/// folded into the right-hand side.  The matrix is symmetric by
/// construction (conservative face fluxes plus centered cross terms).
template <int N>
struct DiscreteOperator {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  std::vector<std::int64_t> flat_of_row;   // interior row -> grid flat index
  std::vector<std::int64_t> row_of_flat;   // grid flat index -> row or -1
};

/// Second-order conservative discretization of -div(gamma grad u):
/// face-averaged fluxes for the diagonal part of gamma (arithmetic mean),
/// centered differences for the mixed part.  Support is the 3x3 (2-D) or
/// 3x3x3 (3-D) node neighborhood.
template <int N>
DiscreteOperator<N> assemble_conductivity_system(const MatrixField<N>& gamma,
                                                 const BoundaryCondition<N>& bc,
                                                 const ScalarField<N>* source = nullptr) {
  const Grid<N>& g = gamma.grid;
  if (bc.grid != g) throw Error("assemble: boundary data grid mismatch");
  if (source && source->grid != g) throw Error("assemble: source grid mismatch");

  DiscreteOperator<N> op;
  op.row_of_flat.assign(g.node_count(), -1);
  g.for_each([&](const NodeIndex<N>& i, std::int64_t fl) {
    if (!g.is_boundary(i)) {
      op.row_of_flat[fl] = static_cast<std::int64_t>(op.flat_of_row.size());
      op.flat_of_row.push_back(fl);
    }
  });
  const std::int64_t rows = static_cast<std::int64_t>(op.flat_of_row.size());
  op.rhs = Eigen::VectorXd::Zero(rows);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(rows * (N == 2 ? 9 : 19));

  // Adds coupling A(row, node j); boundary nodes fold into the rhs.
  auto add = [&](std::int64_t row, const NodeIndex<N>& j, double w) {
    const std::int64_t fj = g.flat(j);
    if (op.row_of_flat[fj] >= 0)
      trip.emplace_back(static_cast<int>(row), static_cast<int>(op.row_of_flat[fj]), w);
    else
      op.rhs[row] -= w * bc.values[fj];
  };

  g.for_each([&](const NodeIndex<N>& i, std::int64_t fl) {
    const std::int64_t row = op.row_of_flat[fl];
    if (row < 0) return;
    if (source) op.rhs[row] += (*source)[fl];

    for (int a = 0; a < N; ++a) {
      const double ha2 = g.spacing[a] * g.spacing[a];
      NodeIndex<N> ip = i, im = i;
      ip[a] += 1;
      im[a] -= 1;
      const double gp = 0.5 * (gamma.at(i)(a, a) + gamma.at(ip)(a, a));
      const double gm = 0.5 * (gamma.at(i)(a, a) + gamma.at(im)(a, a));
      add(row, i, (gp + gm) / ha2);
      add(row, ip, -gp / ha2);
      add(row, im, -gm / ha2);

      for (int b = 0; b < N; ++b) {
        if (b == a) continue;
        const double w = 1.0 / (4.0 * g.spacing[a] * g.spacing[b]);
        // -d_a(gamma_ab d_b u): centered in both directions.
        NodeIndex<N> j;
        j = ip; j[b] += 1; add(row, j, -gamma.at(ip)(a, b) * w);
        j = ip; j[b] -= 1; add(row, j, gamma.at(ip)(a, b) * w);
        j = im; j[b] += 1; add(row, j, gamma.at(im)(a, b) * w);
        j = im; j[b] -= 1; add(row, j, -gamma.at(im)(a, b) * w);
      }
    }
  });

  op.A.resize(rows, rows);
  op.A.setFromTriplets(trip.begin(), trip.end());
  return op;
}

template <int N>
struct ForwardSolution {
  ScalarField<N> u;
  SolveStats stats;
};

/// Solves div(gamma grad u) = 0 (or = -f when a source is given) with
/// Dirichlet data g, returning u on the full grid.
template <int N>
ForwardSolution<N> solve_conductivity(const MatrixField<N>& gamma, const BoundaryCondition<N>& bc,
                                      const SolverConfig& cfg = {},
                                      const ScalarField<N>* source = nullptr) {
  DiscreteOperator<N> op = assemble_conductivity_system(gamma, bc, source);
  SolveStats stats;
  const Eigen::VectorXd x = solve_spd(op.A, op.rhs, cfg, &stats);
  ForwardSolution<N> out{ScalarField<N>(gamma.grid), stats};
  gamma.grid.for_each([&](const NodeIndex<N>&, std::int64_t fl) {
    const std::int64_t r = op.row_of_flat[fl];
    out.u[fl] = r >= 0 ? x[r] : bc.values[fl];
  });
  return out;
}

template <int N>
ForwardSolution<N> solve_conductivity(const ConductivityField<N>& gamma,
                                      const BoundaryCondition<N>& bc,
                                      const SolverConfig& cfg = {},
                                      const ScalarField<N>* source = nullptr) {
  return solve_conductivity(gamma.gamma, bc, cfg, source);
}

/// Current density H = gamma grad u.
template <int N>
VectorField<N> current_density(const MatrixField<N>& gamma, const ScalarField<N>& u) {
  if (gamma.grid != u.grid) throw Error("current_density: grid mismatch");
  VectorField<N> gu = gradient(u);
  VectorField<N> out(u.grid);
  for (std::int64_t f = 0; f < u.size(); ++f) out[f] = gamma[f] * gu[f];
  return out;
}

/// Interior current-density measurements: n + m fields H_i = gamma grad u_i,
/// the boundary data that generated them, and a noise descriptor.
template <int N>
struct MeasurementSet {
  Grid<N> grid;
  std::vector<VectorField<N>> H;
  std::vector<BoundaryCondition<N>> bc;
  bool analytic = false;
  double noise_level = 0.0;
  double noise_radius = 0.0;
  std::uint64_t noise_seed = 0;

  int count() const { return static_cast<int>(H.size()); }
  int extra() const { return count() - N; }
};

/// Numeric synthesis: one forward solve per boundary datum.
template <int N>
MeasurementSet<N> synthesize_measurements(const ConductivityField<N>& gamma,
                                          const std::vector<BoundaryCondition<N>>& bcs,
                                          const SolverConfig& cfg = {}) {
  MeasurementSet<N> ms;
  ms.grid = gamma.gamma.grid;
  ms.bc = bcs;
  for (const auto& bc : bcs) {
    const auto sol = solve_conductivity(gamma, bc, cfg);
    ms.H.push_back(current_density(gamma.gamma, sol.u));
  }
  return ms;
}

/// The first n measurements as matrix columns, [H_1 | ... | H_n].
template <int N>
MatrixField<N> measurement_matrix(const MeasurementSet<N>& ms) {
  if (ms.count() < N) throw Error("measurement_matrix: fewer than n fields");
  MatrixField<N> out(ms.grid);
  for (std::int64_t f = 0; f < out.size(); ++f)
    for (int c = 0; c < N; ++c) out[f].col(c) = ms.H[c][f];
  return out;
}

}  // namespace cdii
