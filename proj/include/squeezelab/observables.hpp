#pragma once

// Local spin matrices and the collective observable triples the witnesses
// are evaluated on: collective spin components, and dichotomic (spin-1/2
// like) operators on a pair of levels or a pair of orthogonal projectors,
// together with the per-site particle-number operator.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "squeezelab/hilbert.hpp"
#include "squeezelab/random.hpp"

namespace squeezelab {

/// Spin quantum number stored as the integer 2j.
class Spin {
 public:
  static Spin from_twice(int two_j) {
    if (two_j < 0) throw InvalidArgument("spin must be non-negative");
    return Spin(two_j);
  }
  static Spin from_value(double j) {
    const double twice = 2.0 * j;
    const double rounded = std::round(twice);
    if (j < 0.0 || std::abs(twice - rounded) > 1e-12)
      throw InvalidArgument("spin " + std::to_string(j) + " is not a non-negative half-integer");
    return Spin(static_cast<int>(rounded));
  }
  int twice() const { return two_j_; }
  double value() const { return 0.5 * two_j_; }
  int dim() const { return two_j_ + 1; }

  /// Basis index of magnetic number m (ordering m = -j ... +j).
  int index_of(double m) const {
    const double shifted = m + value();
    const double rounded = std::round(shifted);
    if (std::abs(shifted - rounded) > 1e-12 || rounded < 0 || rounded > two_j_)
      throw InvalidArgument("magnetic number " + std::to_string(m) + " is not a level of spin " +
                            std::to_string(value()));
    return static_cast<int>(rounded);
  }

  friend bool operator==(Spin, Spin) = default;

 private:
  explicit Spin(int two_j) : two_j_(two_j) {}
  int two_j_;
};

/// j_x, j_y, j_z in the basis m = -j ... +j.
inline std::array<CMatrix, 3> spin_matrices(Spin spin) {
  const int d = spin.dim();
  const double j = spin.value();
  CMatrix jz = CMatrix::Zero(d, d);
  CMatrix jp = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = -j + k;
    jz(k, k) = m;
    if (k + 1 < d) jp(k + 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const CMatrix jm = jp.adjoint();
  const cplx i2(0.0, 2.0);
  return {0.5 * (jp + jm), (jp - jm) / i2, jz};
}

enum class TripleKind { spin, dichotomic };

/// Three collective observables A_k = sum_i A_k^(i), the number operator
/// N-hat = sum_i N^(i) and the single-site bound alpha.
///
/// Every site carries the same local operators.
struct ObservableTriple {
  TripleKind kind = TripleKind::spin;
  int sites = 0;
  int local_dim = 0;
  std::array<CMatrix, 3> local;  // A_k^(i)
  CMatrix local_number;          // N^(i)
  std::array<CMatrix, 3> collective;
  CMatrix number;  // N-hat
  double alpha = 0.0;
  double factor = 1.0;   // dichotomic scale (1/2 gives A = sigma/2); 1 for spin
  double closure = 1.0;  // [A_a, A_b] = i * closure * eps_abc A_c
  double spin = 0.0;     // j of the underlying spin (spin triples and level-built triples)
};

/// Builds collectives from shared local operators.
inline ObservableTriple make_triple(TripleKind kind, int sites, const std::array<CMatrix, 3>& local,
                                    const CMatrix& local_number, double alpha, double factor,
                                    double closure, double spin) {
  const auto d = static_cast<int>(local_number.rows());
  for (const auto& op : local)
    if (op.rows() != d || op.cols() != d || !is_hermitian(op))
      throw InvalidArgument("local observables must be Hermitian and " + std::to_string(d) + "x" +
                            std::to_string(d));
  if (!is_hermitian(local_number)) throw InvalidArgument("local number operator must be Hermitian");
  checked_dimension(d, sites);
  ObservableTriple t;
  t.kind = kind;
  t.sites = sites;
  t.local_dim = d;
  t.local = local;
  t.local_number = local_number;
  for (int k = 0; k < 3; ++k) t.collective[k] = collective(local[k], sites, d);
  t.number = collective(local_number, sites, d);
  t.alpha = alpha;
  t.factor = factor;
  t.closure = closure;
  t.spin = spin;
  return t;
}

/// Collective spin J_k with N^(i) = identity and alpha = j.
inline ObservableTriple collective_spin(Spin spin, int sites) {
  return make_triple(TripleKind::spin, sites, spin_matrices(spin), identity(spin.dim()),
                     spin.value(), 1.0, 1.0, spin.value());
}

namespace detail {
inline ObservableTriple dichotomic_from_lowering(const CMatrix& lowering, const CMatrix& p0,
                                                 const CMatrix& p1, double factor, int sites,
                                                 double spin) {
  if (!(factor > 0.0)) throw InvalidArgument("dichotomic factor must be positive");
  const CMatrix raising = lowering.adjoint();
  const cplx minus_i(0.0, -1.0);
  const std::array<CMatrix, 3> sigma{lowering + raising, minus_i * (lowering - raising), p0 - p1};
  std::array<CMatrix, 3> local;
  for (int k = 0; k < 3; ++k) local[k] = factor * sigma[k];
  return make_triple(TripleKind::dichotomic, sites, local, p0 + p1, factor, factor,
                     2.0 * factor, spin);
}
}  // namespace detail

/// Pauli-like operators on span{|m0>, |m1>} of a spin-j site, scaled by
/// `factor`; N^(i) projects onto that span and alpha = factor.
inline ObservableTriple dichotomic_from_levels(Spin spin, double m0, double m1, double factor,
                                               int sites) {
  const int i0 = spin.index_of(m0);
  const int i1 = spin.index_of(m1);
  if (i0 == i1) throw InvalidArgument("dichotomic levels must differ");
  const int d = spin.dim();
  CMatrix lowering = CMatrix::Zero(d, d);  // |m0><m1|
  lowering(i0, i1) = 1.0;
  CMatrix p0 = CMatrix::Zero(d, d);
  CMatrix p1 = CMatrix::Zero(d, d);
  p0(i0, i0) = 1.0;
  p1(i1, i1) = 1.0;
  return detail::dichotomic_from_lowering(lowering, p0, p1, factor, sites, spin.value());
}

/// Two orthogonal rank-r projectors P0 = U U^dagger, P1 = V V^dagger together
/// with the isometries that fix S = U V^dagger (range(P1) -> range(P0)).
class ProjectorPair {
 public:
  static ProjectorPair from_isometries(CMatrix u, CMatrix v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || u.cols() < 1)
      throw InvalidArgument("projector pair isometries must have equal shape d x r, r >= 1");
    const auto r = u.cols();
    const CMatrix id = CMatrix::Identity(r, r);
    if (max_abs(u.adjoint() * u - id) > 1e-10 || max_abs(v.adjoint() * v - id) > 1e-10)
      throw InvalidArgument("projector pair factors are not isometries (U^dag U != 1)");
    if (max_abs(u.adjoint() * v) > 1e-10)
      throw InvalidArgument("projector pair ranges are not orthogonal (P0 P1 != 0)");
    return ProjectorPair(std::move(u), std::move(v));
  }

  /// Uses eigenvector bases of the projector ranges as U and V, in
  /// eigensolver order.
  static ProjectorPair from_projectors(const CMatrix& p0, const CMatrix& p1) {
    if (p0.rows() != p0.cols() || p1.rows() != p0.rows() || p1.cols() != p0.cols())
      throw InvalidArgument("projectors must be square and of equal size");
    const auto range = [](const CMatrix& p, const char* name) {
      if (!is_hermitian(p, 1e-10) || max_abs(p * p - p) > 1e-10)
        throw InvalidArgument(std::string(name) + " is not an orthogonal projector");
      const EigenDecomposition e = herm_eig(p);
      std::vector<Eigen::Index> cols;
      for (Eigen::Index k = 0; k < e.values.size(); ++k)
        if (e.values(k) > 0.5) cols.push_back(k);
      CMatrix basis(p.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c)
        basis.col(static_cast<Eigen::Index>(c)) = e.vectors.col(cols[c]);
      return basis;
    };
    CMatrix u = range(p0, "P0");
    CMatrix v = range(p1, "P1");
    if (u.cols() != v.cols())
      throw InvalidArgument("projector ranks differ: " + std::to_string(u.cols()) + " vs " +
                            std::to_string(v.cols()));
    if (u.cols() == 0) throw InvalidArgument("projectors must have rank >= 1");
    if (max_abs(p0 * p1) > 1e-10) throw InvalidArgument("projectors are not orthogonal");
    // Canonical basis vectors stay canonical: align each eigenvector to the
    // unit vector it is supported on when the projector is diagonal.
    const auto canonicalize = [](CMatrix& b) {
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        Eigen::Index arg = 0;
        b.col(c).cwiseAbs().maxCoeff(&arg);
        const cplx lead = b(arg, c);
        b.col(c) *= std::abs(lead) / lead;
      }
    };
    canonicalize(u);
    canonicalize(v);
    return from_isometries(std::move(u), std::move(v));
  }

  const CMatrix& u() const { return u_; }
  const CMatrix& v() const { return v_; }
  CMatrix p0() const { return u_ * u_.adjoint(); }
  CMatrix p1() const { return v_ * v_.adjoint(); }
  Eigen::Index rank() const { return u_.cols(); }
  Eigen::Index local_dim() const { return u_.rows(); }

 private:
  ProjectorPair(CMatrix u, CMatrix v) : u_(std::move(u)), v_(std::move(v)) {}
  CMatrix u_;
  CMatrix v_;
};

/// sigma_z = P0 - P1, sigma_x = S_- + S_+, sigma_y = -i (S_- - S_+) with
/// S_- = P0 S P1, N^(i) = P0 + P1.
inline ObservableTriple dichotomic_from_projectors(const ProjectorPair& pair, double factor,
                                                   int sites) {
  const CMatrix p0 = pair.p0();
  const CMatrix p1 = pair.p1();
  const CMatrix s = pair.u() * pair.v().adjoint();
  const CMatrix lowering = p0 * s * p1;
  // j is only meaningful for level-built triples; keep the (d-1)/2 label.
  return detail::dichotomic_from_lowering(lowering, p0, p1, factor, sites,
                                          0.5 * static_cast<double>(pair.local_dim() - 1));
}

/// max entry of [A_a, A_b] - i * kappa * eps_abc A_c over the three cyclic pairs.
inline double closure_residual(const std::array<CMatrix, 3>& ops, double kappa) {
  const cplx i(0.0, 1.0);
  double worst = 0.0;
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    const CMatrix comm = ops[a] * ops[b] - ops[b] * ops[a];
    worst = std::max(worst, max_abs(comm - i * kappa * ops[c]));
  }
  return worst;
}

/// Conjugates every local operator by u = exp(i * angle * n.A^(i)) and
/// rebuilds the collectives. N-hat and alpha are untouched.
inline ObservableTriple rotate_triple(const ObservableTriple& triple,
                                      const Eigen::Vector3d& axis, double angle) {
  const double norm = axis.norm();
  if (!(norm > 0.0)) throw InvalidArgument("rotation axis must be nonzero");
  if (closure_residual(triple.local, triple.closure) > 1e-12)
    throw InvalidArgument("rotate_triple: local operators do not close under commutation");
  const Eigen::Vector3d n = axis / norm;
  CMatrix generator = n(0) * triple.local[0] + n(1) * triple.local[1] + n(2) * triple.local[2];
  const CMatrix u = herm_expm(generator, cplx(0.0, angle));
  std::array<CMatrix, 3> local;
  for (int k = 0; k < 3; ++k) {
    local[k] = u * triple.local[k] * u.adjoint();
    local[k] = 0.5 * (local[k] + local[k].adjoint());
  }
  ObservableTriple out = triple;
  out.local = local;
  for (int k = 0; k < 3; ++k) out.collective[k] = collective(local[k], triple.sites, triple.local_dim);
  return out;
}

/// sum_k <A_k^(i)>^2 for one local density matrix.
inline double local_bloch_sq(const ObservableTriple& triple, const CMatrix& rho_local) {
  double s = 0.0;
  for (const auto& op : triple.local) {
    const double e = local_expect(rho_local, op);
    s += e * e;
  }
  return s;
}

/// Largest sum_k <A_k^(i)>^2 over `trials` random pure local states. A lower
/// estimate of alpha^2; it must never exceed it.
inline double alpha_check(const ObservableTriple& triple, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("alpha_check needs at least one trial");
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
    const CVector psi = random_ket(triple.local_dim, rng);
    double s = 0.0;
    for (const auto& op : triple.local) {
      const double e = psi.dot(op * psi).real();
      s += e * e;
    }
    best = std::max(best, s);
  }
  return best;
}

}  // namespace squeezelab
