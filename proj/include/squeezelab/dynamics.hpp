#pragma once

// One-axis twisting |psi(theta)> = exp(-i J_x^2 theta / 2) |0>^N and
// parameter sweeps of the frame-independent suites along it.

#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "squeezelab/hilbert.hpp"
#include "squeezelab/invariant.hpp"
#include "squeezelab/observables.hpp"
#include "squeezelab/witness.hpp"

namespace squeezelab {

/// Tensor product of |m_i> with one magnetic number per site.
inline MultiSpinState product_ket(Spin spin, std::span<const double> levels) {
  if (levels.empty()) throw InvalidArgument("product_ket needs at least one site");
  const auto sites = static_cast<int>(levels.size());
  checked_dimension(spin.dim(), sites);
  CVector psi = CVector::Ones(1);
  for (double m : levels) {
    CVector local = CVector::Zero(spin.dim());
    local(spin.index_of(m)) = 1.0;
    psi = kron(psi, local);
  }
  return MultiSpinState::pure(sites, spin.dim(), std::move(psi));
}

/// lo, ..., hi with `steps` points, endpoints included; one point gives {lo}.
inline std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw InvalidArgument("grid needs at least one point");
  std::vector<double> g(static_cast<std::size_t>(steps));
  if (steps == 1) {
    g[0] = lo;
    return g;
  }
  for (int k = 0; k < steps; ++k) g[k] = lo + (hi - lo) * k / (steps - 1);
  g.back() = hi;
  return g;
}

/// Diagonalizes J_x^2 once and evolves |0>^N to any theta.
class OneAxisTwisting {
 public:
  OneAxisTwisting(int sites, Spin spin) : sites_(sites), spin_(spin) {
    spin.index_of(0.0);  // throws for half-integer spins: no m = 0 level
    const CMatrix jx = collective(spin_matrices(spin)[0], sites, spin.dim());
    eig_ = herm_eig(jx * jx);
    const std::vector<double> zeros(static_cast<std::size_t>(sites), 0.0);
    initial_ = product_ket(spin, zeros).ket();
    coefficients_ = eig_.vectors.adjoint() * initial_;
  }

  int sites() const { return sites_; }
  Spin spin() const { return spin_; }
  const EigenDecomposition& spectrum() const { return eig_; }

  MultiSpinState state(double theta) const {
    CVector c = coefficients_;
    for (Eigen::Index k = 0; k < c.size(); ++k)
      c(k) *= std::exp(cplx(0.0, -0.5 * theta * eig_.values(k)));
    CVector psi = eig_.vectors * c;
    psi /= psi.norm();
    return MultiSpinState::pure(sites_, spin_.dim(), std::move(psi));
  }

 private:
  int sites_;
  Spin spin_;
  EigenDecomposition eig_;
  CVector initial_;
  CVector coefficients_;
};

inline MultiSpinState oat_state(int sites, Spin spin, double theta) {
  return OneAxisTwisting(sites, spin).state(theta);
}

enum class SweepSuite {
  original_invariant,     // F1..F4 on the collective spin
  generalized_invariant,  // G1..G4 on a factor-1/2 dichotomic triple
  moments,                // raw first moments, modified variances, <N>, delta
};

struct SweepRow {
  double theta = 0.0;
  std::vector<double> values;
};

struct SweepResult {
  std::vector<std::string> labels;
  std::vector<SweepRow> rows;

  std::vector<double> column(std::size_t k) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.values.at(k));
    return out;
  }
  std::vector<double> thetas() const {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r.theta);
    return out;
  }
};

inline std::vector<std::string> sweep_labels(SweepSuite suite) {
  switch (suite) {
    case SweepSuite::original_invariant: return {"F1", "F2", "F3", "F4"};
    case SweepSuite::generalized_invariant: return {"G1", "G2", "G3", "G4"};
    case SweepSuite::moments:
      return {"A1", "A2", "A3", "dvar1", "dvar2", "dvar3", "n_mean", "delta"};
  }
  return {};
}

/// Evaluates `suite` at every theta in order. `triple` is the collective
/// spin for original_invariant and a dichotomic triple otherwise.
inline SweepResult sweep(const OneAxisTwisting& evolution, std::span<const double> thetas,
                         const ObservableTriple& triple, SweepSuite suite,
                         const InvariantOptions& opts = {}) {
  SweepResult out;
  out.labels = sweep_labels(suite);
  out.rows.reserve(thetas.size());
  for (double theta : thetas) {
    const MultiSpinState psi = evolution.state(theta);
    SweepRow row{theta, {}};
    switch (suite) {
      case SweepSuite::original_invariant: {
        const InvariantMatrices m = build_invariant_spin(psi, triple);
        const auto f = original_invariant_suite(m, triple.spin, triple.sites);
        row.values.assign(f.begin(), f.end());
        break;
      }
      case SweepSuite::generalized_invariant: {
        const InvariantReport r = generalized_invariant_report(psi, triple, opts);
        row.values.assign(r.margins.begin(), r.margins.end());
        break;
      }
      case SweepSuite::moments: {
        const MomentSet ms = moments(psi, triple);
        row.values = {ms.first[0],        ms.first[1],        ms.first[2],
                      ms.mod_variance[0], ms.mod_variance[1], ms.mod_variance[2],
                      ms.n_mean,          delta(ms, triple.alpha)};
        break;
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace squeezelab
