#pragma once

// Dense complex linear algebra for small many-site spin systems: tensor
// products, local embeddings, Hermitian eigensolver and exponential,
// expectation values and single-site reductions.
//
// Basis convention: site 1 is the slowest-varying tensor factor, and every
// local basis is ordered m = -j ... +j.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "squeezelab/errors.hpp"

namespace squeezelab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix3 = Eigen::Matrix3d;

inline constexpr std::size_t kDefaultDimensionCap = 4096;

namespace detail {
inline std::atomic<std::size_t>& dimension_cap_storage() {
  static std::atomic<std::size_t> cap{kDefaultDimensionCap};
  return cap;
}
}  // namespace detail

inline std::size_t dimension_cap() { return detail::dimension_cap_storage().load(); }

inline void set_dimension_cap(std::size_t cap) {
  if (cap == 0) throw InvalidArgument("dimension cap must be positive");
  detail::dimension_cap_storage().store(cap);
}

/// Applies SQUEEZELAB_DIM_CAP if it is set to a positive integer.
inline void load_dimension_cap_from_env() {
  const char* raw = std::getenv("SQUEEZELAB_DIM_CAP");
  if (raw == nullptr || *raw == '\0') return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0)
    throw InvalidArgument(std::string("SQUEEZELAB_DIM_CAP is not a positive integer: ") + raw);
  set_dimension_cap(static_cast<std::size_t>(v));
}

/// d^N, or a DimensionCapError when it exceeds the cap (or overflows).
inline std::size_t checked_dimension(int local_dim, int sites) {
  if (local_dim < 1 || sites < 1)
    throw InvalidArgument("local dimension and site count must be positive");
  const std::size_t cap = dimension_cap();
  std::size_t dim = 1;
  for (int s = 0; s < sites; ++s) {
    dim *= static_cast<std::size_t>(local_dim);
    if (dim > cap)
      throw DimensionCapError("dimension " + std::to_string(local_dim) + "^" +
                              std::to_string(sites) + " exceeds cap " + std::to_string(cap));
  }
  return dim;
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |M - M^dagger| <= tol * max(1, max|M|).
inline bool is_hermitian(const CMatrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, max_abs(m));
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

inline CMatrix identity(Eigen::Index d) { return CMatrix::Identity(d, d); }

/// Kronecker product a (x) b.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const auto cap = static_cast<Eigen::Index>(dimension_cap());
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > cap || cols > cap)
    throw DimensionCapError("kron result " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " exceeds cap " + std::to_string(cap));
  CMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CVector kron(const CVector& a, const CVector& b) {
  const Eigen::Index n = a.size() * b.size();
  if (n > static_cast<Eigen::Index>(dimension_cap()))
    throw DimensionCapError("kron vector of length " + std::to_string(n) + " exceeds cap");
  CVector out(n);
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// 1 (x) ... (x) op (x) ... (x) 1 with `op` at `site` (1-based) out of `sites`.
inline CMatrix embed_local(const CMatrix& op, int site, int sites, int local_dim) {
  if (op.rows() != local_dim || op.cols() != local_dim)
    throw InvalidArgument("embed_local: operator is " + std::to_string(op.rows()) + "x" +
                          std::to_string(op.cols()) + ", expected " + std::to_string(local_dim));
  if (site < 1 || site > sites)
    throw InvalidArgument("embed_local: site " + std::to_string(site) + " outside 1.." +
                          std::to_string(sites));
  const auto dim = static_cast<Eigen::Index>(checked_dimension(local_dim, sites));
  Eigen::Index stride = 1;
  for (int s = site; s < sites; ++s) stride *= local_dim;
  const Eigen::Index outer = dim / (stride * local_dim);
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index o = 0; o < outer; ++o)
    for (Eigen::Index a = 0; a < local_dim; ++a)
      for (Eigen::Index b = 0; b < local_dim; ++b) {
        const cplx v = op(a, b);
        if (v == cplx(0.0)) continue;
        const Eigen::Index ra = (o * local_dim + a) * stride;
        const Eigen::Index cb = (o * local_dim + b) * stride;
        for (Eigen::Index i = 0; i < stride; ++i) out(ra + i, cb + i) = v;
      }
  return out;
}

/// Sum over sites of embed_local(op, site, ...).
inline CMatrix collective(const CMatrix& op, int sites, int local_dim) {
  const auto dim = static_cast<Eigen::Index>(checked_dimension(local_dim, sites));
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int s = 1; s <= sites; ++s) out += embed_local(op, s, sites, local_dim);
  return out;
}

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // columns are the eigenvectors, unitary
};

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Sweeps visit (p, q) pairs in row-major order, so results are
/// reproducible bit for bit. Converges when the off-diagonal Frobenius norm
/// drops to 1e-12 of the full norm.
inline EigenDecomposition herm_eig(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("herm_eig: matrix is not square");
  if (!is_hermitian(m, 1e-10)) throw InvalidArgument("herm_eig: matrix is not Hermitian");
  const Eigen::Index n = m.rows();
  CMatrix a = 0.5 * (m + m.adjoint());
  CMatrix v = CMatrix::Identity(n, n);

  const double total = a.norm();
  const double threshold = 1e-12 * total;
  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps && total > 0.0 && off_norm() > threshold; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        const cplx phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = std::abs(theta) > 1e150
                             ? 0.5 / theta
                             : (theta >= 0.0 ? 1.0 : -1.0) /
                                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G = [[c, s e], [-s conj(e), c]] on (p, q); a <- G^dagger a G.
        const cplx gpq = s * phase;
        const cplx gqp = -s * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx kp = a(k, p);
          const cplx kq = a(k, q);
          a(k, p) = kp * c + kq * gqp;
          a(k, q) = kp * gpq + kq * c;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx pk = a(p, k);
          const cplx qk = a(q, k);
          a(p, k) = c * pk + std::conj(gqp) * qk;
          a(q, k) = std::conj(gpq) * pk + c * qk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx kp = v(k, p);
          const cplx kq = v(k, q);
          v(k, p) = kp * c + kq * gqp;
          v(k, q) = kp * gpq + kq * c;
        }
      }
    }
  }
  if (total > 0.0 && off_norm() > threshold)
    throw NumericalError("herm_eig: Jacobi sweeps did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  EigenDecomposition out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Real symmetric 3x3 routed through the same eigensolver.
inline Eigen::Vector3d symmetric_eigenvalues(const RMatrix3& m) {
  const EigenDecomposition e = herm_eig(m.cast<cplx>());
  return e.values;
}

/// V diag(exp(scale * lambda)) V^dagger from an existing decomposition.
inline CMatrix herm_expm(const EigenDecomposition& eig, cplx scale) {
  CVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) phases(k) = std::exp(scale * eig.values(k));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

/// exp(scale * m) for Hermitian m.
inline CMatrix herm_expm(const CMatrix& m, cplx scale) { return herm_expm(herm_eig(m), scale); }

/// Pure vector or density matrix on `sites` copies of a d-level system.
class MultiSpinState {
 public:
  enum class Kind { pure, density };

  static MultiSpinState pure(int sites, int local_dim, CVector ket) {
    const auto dim = static_cast<Eigen::Index>(checked_dimension(local_dim, sites));
    if (ket.size() != dim)
      throw InvalidArgument("pure state has length " + std::to_string(ket.size()) + ", expected " +
                            std::to_string(dim));
    const double norm = ket.norm();
    if (std::abs(norm - 1.0) > 1e-12)
      throw InvariantViolation("pure state is not normalized (norm " + std::to_string(norm) + ")");
    return MultiSpinState(sites, local_dim, std::move(ket));
  }

  /// Normalizes first; rejects the zero vector.
  static MultiSpinState normalized(int sites, int local_dim, CVector ket) {
    const double norm = ket.norm();
    if (norm == 0.0) throw InvariantViolation("cannot normalize the zero vector");
    ket /= norm;
    return pure(sites, local_dim, std::move(ket));
  }

  /// `skip_spectrum` skips the eigenvalue check, for matrices that are
  /// positive by construction (convex mixtures of projectors).
  static MultiSpinState density(int sites, int local_dim, CMatrix rho, bool skip_spectrum = false) {
    const auto dim = static_cast<Eigen::Index>(checked_dimension(local_dim, sites));
    if (rho.rows() != dim || rho.cols() != dim)
      throw InvalidArgument("density matrix is " + std::to_string(rho.rows()) + "x" +
                            std::to_string(rho.cols()) + ", expected " + std::to_string(dim));
    if (!is_hermitian(rho, 1e-12)) throw InvariantViolation("density matrix is not Hermitian");
    const cplx tr = rho.trace();
    if (std::abs(tr - cplx(1.0)) > 1e-12)
      throw InvariantViolation("density matrix trace is " + std::to_string(tr.real()) + ", not 1");
    if (skip_spectrum) return MultiSpinState(sites, local_dim, std::move(rho));
    const double lmin = herm_eig(rho).values(0);
    if (lmin < -1e-10)
      throw InvariantViolation("density matrix has negative eigenvalue " + std::to_string(lmin));
    return MultiSpinState(sites, local_dim, std::move(rho));
  }

  int sites() const { return sites_; }
  int local_dim() const { return local_dim_; }
  Eigen::Index dim() const {
    return kind() == Kind::pure ? std::get<CVector>(data_).size() : std::get<CMatrix>(data_).rows();
  }
  Kind kind() const { return std::holds_alternative<CVector>(data_) ? Kind::pure : Kind::density; }

  const CVector& ket() const {
    if (kind() != Kind::pure) throw InvalidArgument("state is a density matrix, not a ket");
    return std::get<CVector>(data_);
  }
  const CMatrix& rho() const {
    if (kind() != Kind::density) throw InvalidArgument("state is a ket; call to_density()");
    return std::get<CMatrix>(data_);
  }

  CMatrix to_density() const {
    if (kind() == Kind::density) return std::get<CMatrix>(data_);
    const CVector& k = std::get<CVector>(data_);
    return k * k.adjoint();
  }

  MultiSpinState as_density() const {
    return MultiSpinState(sites_, local_dim_, to_density());
  }

 private:
  MultiSpinState(int sites, int local_dim, CVector ket)
      : sites_(sites), local_dim_(local_dim), data_(std::move(ket)) {}
  MultiSpinState(int sites, int local_dim, CMatrix rho)
      : sites_(sites), local_dim_(local_dim), data_(std::move(rho)) {}

  int sites_;
  int local_dim_;
  std::variant<CVector, CMatrix> data_;
};

/// <op> without the Hermiticity assumption.
inline cplx expect_complex(const MultiSpinState& state, const CMatrix& op) {
  if (op.rows() != state.dim() || op.cols() != state.dim())
    throw InvalidArgument("expect: operator is " + std::to_string(op.rows()) + "x" +
                          std::to_string(op.cols()) + ", state dimension " +
                          std::to_string(state.dim()));
  if (state.kind() == MultiSpinState::Kind::pure) {
    const CVector& k = state.ket();
    return k.dot(op * k);
  }
  // Tr(rho op) = sum_ij rho_ij op_ji
  return (state.rho().transpose().cwiseProduct(op)).sum();
}

/// Real expectation of a Hermitian operator; throws NumericalError when the
/// imaginary residue exceeds 1e-10 (relative to the operator scale).
inline double expect(const MultiSpinState& state, const CMatrix& op) {
  const cplx v = expect_complex(state, op);
  const double scale = std::max(1.0, max_abs(op));
  if (std::abs(v.imag()) > 1e-10 * scale)
    throw NumericalError("expectation value has imaginary part " + std::to_string(v.imag()));
  return v.real();
}

/// Matrix of <O_a O_b> over a list of operators (not symmetrized).
inline CMatrix moment_matrix(const MultiSpinState& state, const std::vector<const CMatrix*>& ops) {
  const auto n = static_cast<Eigen::Index>(ops.size());
  for (const CMatrix* op : ops)
    if (op->rows() != state.dim() || op->cols() != state.dim())
      throw InvalidArgument("moment_matrix: operator does not match state dimension");
  CMatrix out(n, n);
  if (state.kind() == MultiSpinState::Kind::pure) {
    std::vector<CVector> images;
    images.reserve(ops.size());
    for (const CMatrix* op : ops) images.push_back(*op * state.ket());
    // <psi| O_a O_b |psi> = (O_a psi)^dagger (O_b psi) for Hermitian O_a
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) out(a, b) = images[a].dot(images[b]);
    return out;
  }
  const CMatrix& rho = state.rho();
  std::vector<CMatrix> right;
  right.reserve(ops.size());
  for (const CMatrix* op : ops) right.push_back(*op * rho);
  // Tr(rho O_a O_b) = sum_ij (O_a)_ij (O_b rho)_ji
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      out(a, b) = ops[a]->transpose().cwiseProduct(right[b]).sum();
  return out;
}

/// Single-site reduced density matrix (site is 1-based).
inline CMatrix reduced_density(const MultiSpinState& state, int site) {
  const int d = state.local_dim();
  const int n = state.sites();
  if (site < 1 || site > n)
    throw InvalidArgument("reduced_density: site " + std::to_string(site) + " outside 1.." +
                          std::to_string(n));
  Eigen::Index stride = 1;
  for (int s = site; s < n; ++s) stride *= d;
  const Eigen::Index outer = state.dim() / (stride * d);
  CMatrix r = CMatrix::Zero(d, d);
  if (state.kind() == MultiSpinState::Kind::pure) {
    const CVector& k = state.ket();
    for (Eigen::Index o = 0; o < outer; ++o)
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
          const Eigen::Index ia = (o * d + a) * stride;
          const Eigen::Index ib = (o * d + b) * stride;
          cplx acc = 0.0;
          for (Eigen::Index i = 0; i < stride; ++i) acc += k(ia + i) * std::conj(k(ib + i));
          r(a, b) += acc;
        }
  } else {
    const CMatrix& rho = state.rho();
    for (Eigen::Index o = 0; o < outer; ++o)
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
          const Eigen::Index ia = (o * d + a) * stride;
          const Eigen::Index ib = (o * d + b) * stride;
          cplx acc = 0.0;
          for (Eigen::Index i = 0; i < stride; ++i) acc += rho(ia + i, ib + i);
          r(a, b) += acc;
        }
  }
  return r;
}

/// Tr(rho op) for a local density matrix and a Hermitian local operator.
inline double local_expect(const CMatrix& rho_local, const CMatrix& op) {
  return (rho_local.transpose().cwiseProduct(op)).sum().real();
}

}  // namespace squeezelab
