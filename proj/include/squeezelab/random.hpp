#pragma once

// Seedable random streams.
//
// Each stream is a std::mt19937_64 whose seed is derived from a user seed
// and a stream index:
//
//   stream_seed(seed, index) = splitmix64(splitmix64(seed) ^ splitmix64(index + 1))
//
// so trial t of a run with seed s always draws from stream (s, t) no matter
// which order trials are evaluated in. Normal deviates come from Box-Muller
// on 53-bit uniforms; std::normal_distribution is avoided because its output
// differs between standard library implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "squeezelab/hilbert.hpp"

namespace squeezelab {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(stream_seed(seed, index)); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // n is tiny everywhere in this library; the modulo bias is below 2^-50.
    return engine_() % n;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Unit vector from independent complex normals (Haar on the sphere).
inline CVector random_ket(Eigen::Index dim, Rng& rng) {
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

/// Random density matrix G G^dagger / Tr with G of shape dim x rank.
inline CMatrix random_density(Eigen::Index dim, Eigen::Index rank, Rng& rng) {
  CMatrix g(dim, rank);
  for (Eigen::Index j = 0; j < rank; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = rng.complex_normal();
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

/// Flat Dirichlet weights (normalized exponentials).
inline std::vector<double> random_simplex(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(rng.uniform_open0());
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace squeezelab
