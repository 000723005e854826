#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "cdii/error.hpp"
#include "cdii/types.hpp"

namespace cdii {

template <int N>
using NodeIndex = std::array<int, N>;

/// Axis-aligned structured lattice of nodes in R^N.
///
/// Nodes carry a multi-index (i_0, ..., i_{N-1}), 0 <= i_d < dims[d].
/// Flat storage is row-major with the last axis fastest:
///   flat = (i_0 * dims[1] + i_1) * dims[2] + ...
/// Grids are small value types and are copied freely.
template <int N>
struct Grid {
  static_assert(N == 2 || N == 3, "only 2-D and 3-D lattices are supported");

  std::array<int, N> dims{};
  std::array<double, N> origin{};
  std::array<double, N> spacing{};

  Grid() = default;
  Grid(std::array<int, N> d, std::array<double, N> o, std::array<double, N> s)
      : dims(d), origin(o), spacing(s) {
    for (int a = 0; a < N; ++a) {
      if (dims[a] < 3) throw Error("grid needs at least 3 nodes per axis");
      if (!(spacing[a] > 0.0)) throw Error("grid spacing must be positive");
    }
  }

  /// Uniform grid over [0,extent]^N with `nodes` nodes per axis.
  static Grid unit(int nodes, double extent = 1.0) {
    std::array<int, N> d;
    std::array<double, N> o, s;
    d.fill(nodes);
    o.fill(0.0);
    s.fill(extent / (nodes - 1));
    return Grid(d, o, s);
  }

  std::int64_t node_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < N; ++a) c *= dims[a];
    return c;
  }

  std::int64_t flat(const NodeIndex<N>& i) const {
    std::int64_t f = i[0];
    for (int a = 1; a < N; ++a) f = f * dims[a] + i[a];
    return f;
  }

  NodeIndex<N> unflat(std::int64_t f) const {
    NodeIndex<N> i{};
    for (int a = N - 1; a >= 0; --a) {
      i[a] = static_cast<int>(f % dims[a]);
      f /= dims[a];
    }
    return i;
  }

  Vec<N> position(const NodeIndex<N>& i) const {
    Vec<N> x;
    for (int a = 0; a < N; ++a) x[a] = origin[a] + spacing[a] * i[a];
    return x;
  }

  bool is_boundary(const NodeIndex<N>& i) const {
    for (int a = 0; a < N; ++a)
      if (i[a] == 0 || i[a] == dims[a] - 1) return true;
    return false;
  }

  bool contains(const NodeIndex<N>& i) const {
    for (int a = 0; a < N; ++a)
      if (i[a] < 0 || i[a] >= dims[a]) return false;
    return true;
  }

  double min_spacing() const {
    double h = spacing[0];
    for (int a = 1; a < N; ++a) h = std::min(h, spacing[a]);
    return h;
  }

  /// Invokes f(idx, flat) over all nodes in storage order.
  template <class F>
  void for_each(F&& f) const {
    NodeIndex<N> i{};
    std::int64_t flat = 0;
    while (true) {
      f(i, flat);
      ++flat;
      int a = N - 1;
      for (; a >= 0; --a) {
        if (++i[a] < dims[a]) break;
        i[a] = 0;
      }
      if (a < 0) break;
    }
  }

  bool operator==(const Grid& o) const {
    return dims == o.dims && origin == o.origin && spacing == o.spacing;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Closed axis-aligned node-index box: lo[a] <= i[a] <= hi[a].
/// Convex, so straight node-to-node segments stay inside.
template <int N>
struct Box {
  NodeIndex<N> lo{};
  NodeIndex<N> hi{};

  static Box full(const Grid<N>& g) {
    Box b;
    for (int a = 0; a < N; ++a) {
      b.lo[a] = 0;
      b.hi[a] = g.dims[a] - 1;
    }
    return b;
  }

  /// Default reconstruction subdomain: the grid minus one boundary layer.
  static Box interior(const Grid<N>& g, int layers = 1) {
    Box b;
    for (int a = 0; a < N; ++a) {
      b.lo[a] = layers;
      b.hi[a] = g.dims[a] - 1 - layers;
      if (b.lo[a] > b.hi[a]) throw Error("box: boundary layer exhausts grid");
    }
    return b;
  }

  bool contains(const NodeIndex<N>& i) const {
    for (int a = 0; a < N; ++a)
      if (i[a] < lo[a] || i[a] > hi[a]) return false;
    return true;
  }

  std::int64_t node_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < N; ++a) c *= (hi[a] - lo[a] + 1);
    return c;
  }

  template <class F>
  void for_each(F&& f) const {
    NodeIndex<N> i = lo;
    while (true) {
      f(i);
      int a = N - 1;
      for (; a >= 0; --a) {
        if (++i[a] <= hi[a]) break;
        i[a] = lo[a];
      }
      if (a < 0) break;
    }
  }
};

}  // namespace cdii
