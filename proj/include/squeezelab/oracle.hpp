#pragma once

// Brute-force verification layer: random product and separable states, the
// single-site qutrit image used in the product-state argument, and the
// intermediate inequalities of that argument as checkable margins.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "squeezelab/hilbert.hpp"
#include "squeezelab/observables.hpp"
#include "squeezelab/random.hpp"
#include "squeezelab/witness.hpp"

namespace squeezelab {

struct SeparableSpec {
  int sites = 2;
  int local_dim = 2;
  int terms = 1;  // mixture length L
  std::uint64_t seed = 0;
};

namespace detail {
inline CVector product_of(int sites, int local_dim, Rng& rng) {
  CVector psi = random_ket(local_dim, rng);
  for (int s = 1; s < sites; ++s) psi = kron(psi, random_ket(local_dim, rng));
  return psi;
}
}  // namespace detail

/// Tensor product of independent Haar-random local kets, drawn in site order
/// from Rng(spec.seed).
inline MultiSpinState sample_pure_product(const SeparableSpec& spec) {
  checked_dimension(spec.local_dim, spec.sites);
  Rng rng(spec.seed);
  CVector psi = detail::product_of(spec.sites, spec.local_dim, rng);
  psi /= psi.norm();
  return MultiSpinState::pure(spec.sites, spec.local_dim, std::move(psi));
}

/// Convex mixture of spec.terms random pure products with flat Dirichlet
/// weights. Products are drawn first, weights last, all from Rng(spec.seed).
inline MultiSpinState sample_separable(const SeparableSpec& spec) {
  if (spec.terms < 1) throw InvalidArgument("separable mixture needs at least one term");
  const auto dim = static_cast<Eigen::Index>(checked_dimension(spec.local_dim, spec.sites));
  Rng rng(spec.seed);
  std::vector<CVector> kets;
  for (int l = 0; l < spec.terms; ++l) {
    CVector psi = detail::product_of(spec.sites, spec.local_dim, rng);
    kets.push_back(psi / psi.norm());
  }
  const std::vector<double> w = random_simplex(static_cast<std::size_t>(spec.terms), rng);
  CMatrix rho = CMatrix::Zero(dim, dim);
  for (int l = 0; l < spec.terms; ++l) rho.noalias() += w[l] * kets[l] * kets[l].adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return MultiSpinState::density(spec.sites, spec.local_dim, std::move(rho), /*skip_spectrum=*/true);
}

/// R = n |Psi><Psi| + (1 - n) |2><2| on a qutrit, where |Psi> lives on
/// span{|0>, |1>} with Bloch vector <A^(i)> / eta.
struct QutritImage {
  CMatrix R;
  double n = 0.0;
  double eta = 0.0;
};

inline constexpr double kDegenerateEta = 1e-14;

/// Maps one site's state. `alpha` must bound the local operators:
/// sum_k <A_k>^2 <= alpha^2 <N^(i)>^2 is checked (with 1e-10 slack).
inline QutritImage qutrit_map(const CMatrix& rho_local, const std::array<CMatrix, 3>& local,
                              const CMatrix& local_number, double alpha) {
  const auto d = rho_local.rows();
  if (rho_local.cols() != d || local_number.rows() != d)
    throw InvalidArgument("qutrit_map: local operators and state differ in dimension");
  if (!is_hermitian(rho_local, 1e-12) || std::abs(rho_local.trace().real() - 1.0) > 1e-12)
    throw InvalidArgument("qutrit_map: input is not a normalized Hermitian density matrix");
  Eigen::Vector3d a;
  for (int k = 0; k < 3; ++k) a(k) = local_expect(rho_local, local[k]);
  const double n = local_expect(rho_local, local_number);
  if (a.squaredNorm() > alpha * alpha * n * n + 1e-10)
    throw PreconditionError("qutrit_map: local Bloch vector exceeds alpha * <N^(i)>");

  QutritImage img;
  img.n = n;
  img.eta = a.norm();
  const cplx i(0.0, 1.0);
  CMatrix sx = CMatrix::Zero(3, 3), sy = CMatrix::Zero(3, 3), sz = CMatrix::Zero(3, 3),
          s0 = CMatrix::Zero(3, 3), two = CMatrix::Zero(3, 3);
  sx(0, 1) = sx(1, 0) = 1.0;
  sy(0, 1) = -i;
  sy(1, 0) = i;
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  s0(0, 0) = s0(1, 1) = 1.0;
  two(2, 2) = 1.0;
  CMatrix block = 0.5 * s0;
  if (img.eta >= kDegenerateEta) {
    const Eigen::Vector3d b = a / img.eta;
    block += 0.5 * (b(0) * sx + b(1) * sy + b(2) * sz);
  }
  img.R = n * block + (1.0 - n) * two;
  return img;
}

inline QutritImage qutrit_map(const CMatrix& rho_local, const ObservableTriple& triple) {
  return qutrit_map(rho_local, triple.local, triple.local_number, triple.alpha);
}

/// Largest deviation of an image from the state invariants: |Tr R - 1|,
/// negativity of the spectrum, non-Hermiticity, and (for eta above the
/// degenerate threshold) distance of the spectrum from {0, 1 - n, n}.
struct QutritResiduals {
  double trace = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = 0.0;
  double spectrum = 0.0;
};

inline QutritResiduals qutrit_residuals(const QutritImage& img) {
  QutritResiduals r;
  r.trace = std::abs(img.R.trace() - cplx(1.0));
  r.hermiticity = max_abs(img.R - img.R.adjoint());
  const RVector ev = herm_eig(0.5 * (img.R + img.R.adjoint())).values;
  r.min_eigenvalue = ev(0);
  if (img.eta >= kDegenerateEta) {
    std::array<double, 3> expected{0.0, 1.0 - img.n, img.n};
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < 3; ++k) r.spectrum = std::max(r.spectrum, std::abs(ev(k) - expected[k]));
  } else {
    std::array<double, 3> expected{img.n / 2, img.n / 2, 1.0 - img.n};
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < 3; ++k) r.spectrum = std::max(r.spectrum, std::abs(ev(k) - expected[k]));
  }
  return r;
}

namespace detail {
/// alpha^2 <N> (<N> - sum_i <N^(i)>^2)
inline double occupation_term(const MomentSet& ms, double alpha) {
  return alpha * alpha * ms.n_mean * (ms.n_mean - ms.local_n.squaredNorm());
}
inline double local_sq_sum(const MomentSet& ms, int k) { return ms.local_first.col(k).squaredNorm(); }
}  // namespace detail

/// Tighter single-component bound on a pure product:
///   <A_k>^2 <= <N> sum_i <A_k^(i)>^2 + alpha^2 <N> (<N> - sum_i <N^(i)>^2),
/// returned as min over k of RHS - LHS.
inline double check_tighter_bound(const MomentSet& ms, double alpha) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double rhs = ms.n_mean * detail::local_sq_sum(ms, k) + detail::occupation_term(ms, alpha);
    worst = std::min(worst, rhs - ms.first[k] * ms.first[k]);
  }
  return worst;
}

inline double check_tighter_bound(const MultiSpinState& state, const ObservableTriple& triple) {
  return check_tighter_bound(moments(state, triple), triple.alpha);
}

struct SubsetBound {
  double chain = 0.0;   // subset-sum bound on sum_{k in I} <A_k>^2
  double master = 0.0;  // product-state master inequality
};

/// For a pure product and subset I:
///   chain:  <N> sum_i sum_{k in I} <A_k^(i)>^2 + alpha^2 <N>(<N> - sum_i n_i^2) - sum_{k in I} <A_k>^2
///   master: <N> sum_{k not in I} dvar_k + sum_{k in I} (dvar_k - <A~_k^2>) + alpha^2 <N>^2
inline SubsetBound check_subset_bound(const MomentSet& ms, double alpha, Subset subset) {
  SubsetBound b;
  double local = 0.0;
  double collective_sq = 0.0;
  double outside = 0.0;
  double inside = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (subset.contains(k)) {
      local += detail::local_sq_sum(ms, k);
      collective_sq += ms.first[k] * ms.first[k];
      inside += ms.mod_variance[k] - ms.mod_second[k];
    } else {
      outside += ms.mod_variance[k];
    }
  }
  b.chain = ms.n_mean * local + detail::occupation_term(ms, alpha) - collective_sq;
  b.master = ms.n_mean * outside + inside + alpha * alpha * ms.n_mean * ms.n_mean;
  return b;
}

inline SubsetBound check_subset_bound(const MultiSpinState& state, const ObservableTriple& triple,
                                      Subset subset) {
  return check_subset_bound(moments(state, triple), triple.alpha, subset);
}

/// Compact generalized margin with delta' in place of delta. On pure
/// products delta' <= delta, so this is the sharper of the two.
inline double check_product_bound(const MomentSet& ms, double alpha, Subset subset) {
  return detail::compact_margin(ms, alpha, ms.n_mean, subset) + delta_prime(ms, alpha);
}

/// Residual of the product-state identity dvar_k + sum_i <A_k^(i)>^2 = 0,
/// max over k.
inline double product_identity_residual(const MomentSet& ms) {
  double worst = 0.0;
  for (int k = 0; k < 3; ++k)
    worst = std::max(worst, std::abs(ms.mod_variance[k] + detail::local_sq_sum(ms, k)));
  return worst;
}

/// Midpoint convexity of f(x, y) = x^2 / y on y > 0 for each pair of points.
/// Returns the smallest (f(p1) + f(p2)) / 2 - f(mid) and whether all were
/// >= -tol relative to the scale of the values.
struct ConvexityResult {
  bool holds = true;
  double min_gap = std::numeric_limits<double>::infinity();
};

using Point2 = std::pair<double, double>;

inline ConvexityResult check_convexity_lemma(std::span<const std::pair<Point2, Point2>> pairs,
                                             double tol = 1e-12) {
  ConvexityResult r;
  const auto f = [](Point2 p) { return p.first * p.first / p.second; };
  for (const auto& [p1, p2] : pairs) {
    if (!(p1.second > 0.0) || !(p2.second > 0.0))
      throw InvalidArgument("convexity lemma needs y > 0");
    const Point2 mid{0.5 * (p1.first + p2.first), 0.5 * (p1.second + p2.second)};
    const double avg = 0.5 * (f(p1) + f(p2));
    const double gap = avg - f(mid);
    r.min_gap = std::min(r.min_gap, gap);
    if (gap < -tol * std::max(1.0, avg)) r.holds = false;
  }
  return r;
}

}  // namespace squeezelab
