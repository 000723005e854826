#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cdii/cross.hpp"
#include "cdii/error.hpp"
#include "cdii/exterior.hpp"
#include "cdii/field.hpp"
#include "cdii/forward.hpp"
#include "cdii/linalg.hpp"

namespace cdii {

/// F1(a, b) = |a|^2 |b|^2 - (a.b)^2, node-wise.  Zero exactly when the two
/// fields are linearly dependent at a node (Cauchy-Schwarz equality).
template <int N>
ScalarField<N> functional_F1(const VectorField<N>& a, const VectorField<N>& b) {
  if (a.grid != b.grid) throw Error("functional_F1: grid mismatch");
  ScalarField<N> out(a.grid);
  for (std::int64_t f = 0; f < a.size(); ++f) {
    const double d = a[f].dot(b[f]);
    out[f] = a[f].squaredNorm() * b[f].squaredNorm() - d * d;
  }
  return out;
}

/// F2 = det of the matrix whose columns are the N given fields.
template <int N>
ScalarField<N> functional_F2(const std::vector<VectorField<N>>& v) {
  if (static_cast<int>(v.size()) != N) throw Error("functional_F2: needs exactly n fields");
  for (const auto& x : v)
    if (x.grid != v[0].grid) throw Error("functional_F2: grid mismatch");
  ScalarField<N> out(v[0].grid);
  for (std::int64_t f = 0; f < out.size(); ++f) {
    Mat<N> m;
    for (int c = 0; c < N; ++c) m.col(c) = v[c][f];
    out[f] = m.determinant();
  }
  return out;
}

/// Node-wise determinant of a matrix field.
template <int N>
ScalarField<N> det_field(const MatrixField<N>& m) {
  ScalarField<N> out(m.grid);
  for (std::int64_t f = 0; f < m.size(); ++f) out[f] = m[f].determinant();
  return out;
}

/// Coefficients mu_k of the extra current densities in the frame of the
/// first n: H mu_k = H_{n+k} node-wise.
template <int N>
struct DecompositionCoefficients {
  std::vector<VectorField<N>> mu;

  int extra() const { return static_cast<int>(mu.size()); }
};

namespace detail {

template <int N>
std::string node_string(const NodeIndex<N>& i) {
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < N; ++a) os << i[a] << (a + 1 < N ? "," : ")");
  return os.str();
}

}  // namespace detail

/// Solves the n x n frame system H mu_k = H_{n+k} at every node by LU with
/// one step of iterative refinement.  Requires |det H| >= det_threshold
/// everywhere; the determinant-ratio (Cramer) form gives the same values and
/// is kept as a test oracle only.
template <int N>
DecompositionCoefficients<N> decomposition_coefficients(const MeasurementSet<N>& ms,
                                                        double det_threshold = 1e-10) {
  if (ms.count() < N) throw Error("decomposition_coefficients: fewer than n fields");
  const int m = ms.extra();
  DecompositionCoefficients<N> out;
  out.mu.assign(m, VectorField<N>(ms.grid));

  ms.grid.for_each([&](const NodeIndex<N>& i, std::int64_t f) {
    Mat<N> h;
    for (int c = 0; c < N; ++c) h.col(c) = ms.H[c][f];
    if (std::abs(h.determinant()) < det_threshold)
      throw HypothesisError("frame matrix nearly singular at node " + detail::node_string<N>(i) +
                            " (linear independence of the base currents fails)");
    const Eigen::PartialPivLU<Mat<N>> lu(h);
    for (int k = 0; k < m; ++k) {
      const Vec<N>& b = ms.H[N + k][f];
      Vec<N> x = lu.solve(b);
      x += lu.solve(b - h * x);
      out.mu[k][f] = x;
    }
  });
  return out;
}

/// Z_k has columns grad(mu_k^i), i = 1..n; equivalently the transposed
/// Jacobian of mu_k.
template <int N>
std::vector<MatrixField<N>> build_Z(const DecompositionCoefficients<N>& c) {
  std::vector<MatrixField<N>> out;
  out.reserve(c.mu.size());
  for (const auto& mu : c.mu) {
    MatrixField<N> j = jacobian(mu);
    for (auto& v : j.v) v = v.transpose().eval();
    out.push_back(std::move(j));
  }
  return out;
}

/// Canonical basis of antisymmetric matrices: e_i x e_j - e_j x e_i, i < j
/// in lexicographic order.
template <int N>
std::vector<Mat<N>> antisym_basis() {
  std::vector<Mat<N>> b;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      Mat<N> m = Mat<N>::Zero();
      m(i, j) = 1.0;
      m(j, i) = -1.0;
      b.push_back(m);
    }
  return b;
}

/// The symmetric matrices (Z_k H^T Omega)^sym whose orthogonal complement
/// pins the anisotropic part, plus a per-node numerical rank of their span.
template <int N>
struct ConstraintSpace {
  Grid<N> grid;
  int num_z = 0;
  std::vector<Mat<N>> omega_basis;
  std::vector<MatrixField<N>> mats;  // k-major: all Omegas for Z_1, then Z_2, ...
  std::vector<std::uint8_t> rank;    // per node, within the symmetric-matrix space

  int size() const { return static_cast<int>(mats.size()); }
};

template <int N>
ConstraintSpace<N> constraint_space(const std::vector<MatrixField<N>>& Z, const MatrixField<N>& H,
                                    std::vector<Mat<N>> omegas = antisym_basis<N>()) {
  if (Z.empty()) throw Error("constraint_space: no coefficient matrices");
  for (const auto& z : Z)
    if (z.grid != H.grid) throw Error("constraint_space: grid mismatch");

  ConstraintSpace<N> cs;
  cs.grid = H.grid;
  cs.num_z = static_cast<int>(Z.size());
  cs.omega_basis = std::move(omegas);
  cs.mats.reserve(Z.size() * cs.omega_basis.size());
  for (const auto& z : Z)
    for (const auto& w : cs.omega_basis) {
      MatrixField<N> mf(H.grid);
      for (std::int64_t f = 0; f < mf.size(); ++f) mf[f] = sym_part(z[f] * H[f].transpose() * w);
      cs.mats.push_back(std::move(mf));
    }

  const int ns = sym_dim(N);
  cs.rank.assign(static_cast<std::size_t>(H.grid.node_count()), 0);
  Eigen::MatrixXd coords(ns, cs.size());
  for (std::int64_t f = 0; f < H.size(); ++f) {
    for (int c = 0; c < cs.size(); ++c) coords.col(c) = SymBasis<N>::coords(cs.mats[c][f]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(coords);
    qr.setThreshold(1e-10);
    cs.rank[static_cast<std::size_t>(f)] = static_cast<std::uint8_t>(qr.rank());
  }
  return cs;
}

/// B (scalar) and the sign-corrected sum of the cross products N(I) over all
/// increasing (n_S - 1)-subsets I of the constraint list.  Under the rank
/// hypothesis each N(I) is a multiple of the normalized anisotropy, so the
/// trace sign aligns the multiples and signed_sum = B * gamma_tilde.
template <int N>
struct CodimAccumulation {
  ScalarField<N> B;
  MatrixField<N> signed_sum;
};

template <int N>
CodimAccumulation<N> codim_accumulate(const ConstraintSpace<N>& cs, double dep_tol = 1e-9) {
  const int ns = sym_dim(N);
  const int k = ns - 1;
  if (cs.size() < k)
    throw HypothesisError("codim functional: " + std::to_string(cs.size()) +
                          " constraint matrices but " + std::to_string(k) +
                          " needed (not enough additional solutions)");

  const SymBasis<N> basis = SymBasis<N>::canonical();
  const Eigen::MatrixXd bc = basis.coord_matrix();

  CodimAccumulation<N> acc{ScalarField<N>(cs.grid), MatrixField<N>(cs.grid)};
  for (auto& m : acc.signed_sum.v) m.setZero();

  // Increasing injections [1..k] -> [1..#W], enumerated in place.
  std::vector<int> idx(k);
  std::vector<Eigen::VectorXd> pick(k);
  for (std::int64_t f = 0; f < acc.B.size(); ++f) {
    double b = 0.0;
    Mat<N> s = Mat<N>::Zero();
    for (int j = 0; j < k; ++j) idx[j] = j;
    while (true) {
      for (int j = 0; j < k; ++j) pick[j] = SymBasis<N>::coords(cs.mats[idx[j]][f]);
      const Mat<N> cross = SymBasis<N>::from_coords(cross_product(bc, pick, dep_tol));
      b += std::pow(std::abs(cross.determinant()), 1.0 / N);
      const double tr = cross.trace();
      if (tr > 0.0)
        s += cross;
      else if (tr < 0.0)
        s -= cross;

      int j = k - 1;
      while (j >= 0 && idx[j] == cs.size() - k + j) --j;
      if (j < 0) break;
      ++idx[j];
      for (int l = j + 1; l < k; ++l) idx[l] = idx[l - 1] + 1;
    }
    acc.B[f] = b;
    acc.signed_sum[f] = s;
  }
  return acc;
}

template <int N>
ScalarField<N> codim_functional_B(const ConstraintSpace<N>& cs, double dep_tol = 1e-9) {
  return codim_accumulate(cs, dep_tol).B;
}

/// S = (Z_2^{-T} Z_1^T Omega_1 + H Z_1^T Omega_2)^sym.  The formula inverts
/// Z_2; a nearly singular Z_2 at any node is an error naming the node.
template <int N>
MatrixField<N> build_S(const MatrixField<N>& Z1, const MatrixField<N>& Z2, const MatrixField<N>& H,
                       const MatrixField<N>& Omega1, const MatrixField<N>& Omega2,
                       double det_threshold = 1e-10) {
  const Grid<N>& g = H.grid;
  if (Z1.grid != g || Z2.grid != g || Omega1.grid != g || Omega2.grid != g)
    throw Error("build_S: grid mismatch");
  MatrixField<N> s(g);
  g.for_each([&](const NodeIndex<N>& i, std::int64_t f) {
    if (std::abs(Z2[f].determinant()) < det_threshold)
      throw HypothesisError("second coefficient matrix nearly singular at node " +
                            detail::node_string<N>(i));
    const Mat<N> z2it = Z2[f].transpose().inverse();
    s[f] = sym_part(z2it * Z1[f].transpose() * Omega1[f] + H[f] * Z1[f].transpose() * Omega2[f]);
  });
  return s;
}

template <int N>
MatrixField<N> build_S(const MatrixField<N>& Z1, const MatrixField<N>& Z2, const MatrixField<N>& H,
                       const Mat<N>& Omega1, const Mat<N>& Omega2, double det_threshold = 1e-10) {
  return build_S(Z1, Z2, H, MatrixField<N>(H.grid, Omega1), MatrixField<N>(H.grid, Omega2),
                 det_threshold);
}

/// Auxiliary two-form pair used when a caller does not supply one: the
/// pairing that makes the constant reference bundles elliptic (planar
/// rotation block for Omega_1; for n = 3 additionally the (2,3) rotation
/// as Omega_2).
template <int N>
Mat<N> default_omega1() {
  Mat<N> w = Mat<N>::Zero();
  w(1, 0) = 1.0;
  w(0, 1) = -1.0;
  return w;
}

template <int N>
Mat<N> default_omega2() {
  Mat<N> w = Mat<N>::Zero();
  if constexpr (N == 3) {
    w(1, 2) = 1.0;
    w(2, 1) = -1.0;
  }
  return w;
}

template <int N>
struct HypothesisReport {
  std::string id;  // "H1", "H2", "H3", "H4A", "H4B"
  double infimum = 0.0;
  double threshold = 0.0;
  bool pass = false;
  NodeIndex<N> argmin{};
  std::string note;
};

template <int N>
struct CheckConfig {
  double c0 = 1e-6;
  double c1 = 1e-6;
  std::optional<Box<N>> subdomain;       // default: grid minus one boundary layer
  std::optional<Mat<N>> omega1, omega2;  // default: the constant elliptic pairing
  double det_threshold = 1e-10;
  std::vector<std::string> request;  // empty: every check the data can feed
};

namespace detail {

template <int N>
HypothesisReport<N> scan_infimum(const std::string& id, const ScalarField<N>& f, const Box<N>& sub,
                                 double threshold) {
  HypothesisReport<N> r;
  r.id = id;
  r.threshold = threshold;
  r.infimum = std::numeric_limits<double>::infinity();
  sub.for_each([&](const NodeIndex<N>& i) {
    const double v = f.at(i);
    if (v < r.infimum) {
      r.infimum = v;
      r.argmin = i;
    }
  });
  r.pass = r.infimum >= threshold;
  return r;
}

}  // namespace detail

/// Evaluates every requested pointwise solvability functional over a
/// subdomain and reports the infimum, the minimizer, and pass/fail:
///   H1  independence of the first two currents (F1 >= c0),
///   H2  frame invertibility (|det[H_1..H_n]| >= c0),
///   H3  constraint-space codimension (B >= c1),
///   H4A invertibility of the coefficient matrix the S-formula inverts
///       (|det Z_2| >= c0; inf |det Z_1| goes in the note),
///   H4B ellipticity of S (lambda_min >= c0).
/// An empty request list runs whatever the measurement count supports; an
/// explicit request the data cannot feed is an error.
template <int N>
std::vector<HypothesisReport<N>> check_hypotheses(const MeasurementSet<N>& ms,
                                                  const CheckConfig<N>& cfg = {}) {
  const Grid<N>& g = ms.grid;
  const Box<N> sub = cfg.subdomain ? *cfg.subdomain : Box<N>::interior(g);
  const int m = ms.extra();

  auto feasible = [&](const std::string& id) {
    if (id == "H1") return ms.count() >= 2;
    if (id == "H2") return ms.count() >= N;
    if (id == "H3") return ms.count() >= N && m >= 1 && m * antisym_dim(N) >= sym_dim(N) - 1;
    if (id == "H4A" || id == "H4B") return ms.count() >= N && m >= 2;
    throw Error("check_hypotheses: unknown hypothesis id " + id);
  };

  std::vector<std::string> ids = cfg.request;
  if (ids.empty()) {
    for (const char* id : {"H1", "H2", "H3", "H4A", "H4B"})
      if (feasible(id)) ids.push_back(id);
  } else {
    for (const auto& id : ids)
      if (!feasible(id))
        throw HypothesisError("check " + id + " needs more solutions than the " +
                              std::to_string(ms.count()) + " provided");
  }

  const bool needs_mu = std::any_of(ids.begin(), ids.end(), [](const std::string& id) {
    return id == "H3" || id == "H4A" || id == "H4B";
  });

  std::vector<HypothesisReport<N>> out;
  std::optional<MatrixField<N>> H;
  std::vector<MatrixField<N>> Z;
  std::string frame_failure;
  if (ms.count() >= N) H = measurement_matrix(ms);
  if (needs_mu && H) {
    try {
      Z = build_Z(decomposition_coefficients(ms, cfg.det_threshold));
    } catch (const HypothesisError& e) {
      frame_failure = e.what();
    }
  }

  auto unavailable = [&](const std::string& id, const std::string& why) {
    HypothesisReport<N> r;
    r.id = id;
    r.threshold = (id == "H3") ? cfg.c1 : cfg.c0;
    r.infimum = -std::numeric_limits<double>::infinity();
    r.pass = false;
    r.note = why;
    out.push_back(std::move(r));
  };

  for (const auto& id : ids) {
    if (id == "H1") {
      out.push_back(detail::scan_infimum("H1", functional_F1(ms.H[0], ms.H[1]), sub, cfg.c0));
    } else if (id == "H2") {
      ScalarField<N> d = det_field(*H);
      for (auto& v : d.v) v = std::abs(v);
      out.push_back(detail::scan_infimum("H2", d, sub, cfg.c0));
    } else if (!frame_failure.empty()) {
      unavailable(id, frame_failure);
    } else if (id == "H3") {
      const auto cs = constraint_space(Z, *H);
      out.push_back(detail::scan_infimum("H3", codim_functional_B(cs), sub, cfg.c1));
    } else if (id == "H4A") {
      ScalarField<N> d2 = det_field(Z[1]);
      for (auto& v : d2.v) v = std::abs(v);
      auto r = detail::scan_infimum("H4A", d2, sub, cfg.c0);
      ScalarField<N> d1 = det_field(Z[0]);
      for (auto& v : d1.v) v = std::abs(v);
      std::ostringstream os;
      os << "inf |det Z1| = " << detail::scan_infimum("", d1, sub, 0.0).infimum
         << " (reported; pass/fail keys on the inverted matrix Z2)";
      r.note = os.str();
      out.push_back(std::move(r));
    } else if (id == "H4B") {
      const Mat<N> w1 = cfg.omega1 ? *cfg.omega1 : default_omega1<N>();
      const Mat<N> w2 = cfg.omega2 ? *cfg.omega2 : default_omega2<N>();
      bool singular = false;
      NodeIndex<N> where{};
      sub.for_each([&](const NodeIndex<N>& i) {
        if (!singular && std::abs(Z[1].at(i).determinant()) < cfg.det_threshold) {
          singular = true;
          where = i;
        }
      });
      if (singular) {
        unavailable("H4B", "second coefficient matrix nearly singular at node " +
                               detail::node_string<N>(where));
        continue;
      }
      ScalarField<N> lmin(g);
      for (auto& v : lmin.v) v = std::numeric_limits<double>::infinity();
      sub.for_each([&](const NodeIndex<N>& i) {
        const std::int64_t f = g.flat(i);
        const Mat<N> z2it = Z[1][f].transpose().inverse();
        const Mat<N> s =
            sym_part(z2it * Z[0][f].transpose() * w1 + (*H)[f] * Z[0][f].transpose() * w2);
        lmin[f] = sym_eig_range<N>(s).first;
      });
      out.push_back(detail::scan_infimum("H4B", lmin, sub, cfg.c0));
    }
  }
  return out;
}

}  // namespace cdii
