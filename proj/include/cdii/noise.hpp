#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cdii/exterior.hpp"
#include "cdii/forward.hpp"

namespace cdii {

/// Which discrete norm the perturbation is rescaled to.
enum class NoiseScaling {
  w1_inf,   // max of sup |p| and sup |grad p| (default contract)
  sup_only  // amplitude only; used to study derivative blow-up at fixed size
};

/// Discrete W^{1,inf} norm of a scalar field: max over nodes of |f| and of
/// every stencil partial derivative.
template <int N>
double w1_inf_norm(const ScalarField<N>& f) {
  double m = sup_norm(f);
  for (int a = 0; a < N; ++a) m = std::max(m, sup_norm(partial_derivative(f, a)));
  return m;
}

namespace detail {

inline double standard_normal(std::mt19937_64& rng) {
  // Box-Muller on open-interval uniforms; stable across standard libraries.
  std::uniform_real_distribution<double> unif(std::numeric_limits<double>::min(), 1.0);
  const double u1 = unif(rng), u2 = unif(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Separable truncated-Gaussian blur, clamped and renormalized at edges.
template <int N>
void mollify(ScalarField<N>& f, double radius) {
  for (int a = 0; a < N; ++a) {
    const double h = f.grid.spacing[a];
    const int K = std::max(1, static_cast<int>(std::lround(radius / h)));
    const double sigma = std::max(radius / 2.0, h / 2.0);
    std::vector<double> w(2 * K + 1);
    for (int k = -K; k <= K; ++k) w[k + K] = std::exp(-0.5 * (k * h) * (k * h) / (sigma * sigma));
    ScalarField<N> out(f.grid);
    f.grid.for_each([&](const NodeIndex<N>& i, std::int64_t fl) {
      double acc = 0.0, wsum = 0.0;
      NodeIndex<N> j = i;
      for (int k = -K; k <= K; ++k) {
        j[a] = i[a] + k;
        if (j[a] < 0 || j[a] >= f.grid.dims[a]) continue;
        acc += w[k + K] * f.at(j);
        wsum += w[k + K];
      }
      out[fl] = acc / wsum;
    });
    f = out;
  }
}

}  // namespace detail

/// Adds seeded mollified white noise to every component of every measured
/// field.  Per field, white noise is blurred with a Gaussian of physical
/// radius `radius` and rescaled so the chosen discrete norm of the
/// perturbation equals `level` exactly.  Deterministic for a fixed seed.
template <int N>
MeasurementSet<N> add_noise(const MeasurementSet<N>& ms, double level, double radius,
                            std::uint64_t seed, NoiseScaling scaling = NoiseScaling::w1_inf) {
  if (level < 0.0 || radius <= 0.0) throw Error("add_noise: level >= 0 and radius > 0 required");
  MeasurementSet<N> out = ms;
  out.noise_level = level;
  out.noise_radius = radius;
  out.noise_seed = seed;
  if (level == 0.0) return out;

  std::mt19937_64 rng(seed);
  for (auto& field : out.H) {
    std::array<ScalarField<N>, N> pert;
    double norm = 0.0;
    for (int c = 0; c < N; ++c) {
      pert[c] = ScalarField<N>(ms.grid);
      for (auto& x : pert[c].v) x = detail::standard_normal(rng);
      detail::mollify(pert[c], radius);
      norm = std::max(norm, scaling == NoiseScaling::w1_inf ? w1_inf_norm(pert[c])
                                                            : sup_norm(pert[c]));
    }
    const double scale = level / norm;
    for (std::int64_t f = 0; f < field.size(); ++f)
      for (int c = 0; c < N; ++c) field[f][c] += scale * pert[c][f];
  }
  return out;
}

}  // namespace cdii
