#pragma once

// The two reference constructions:
//
//  * two spin-1 sites in rho(p) = p rho' + (1 - p)|0,0><0,0| with
//    rho' = (|-1,-1><-1,-1| + |1,1><1,1|) / 2, probed by factor-1/2 Pauli
//    operators on the {-1, 1} levels. The naive margin L goes negative while
//    the generalized margin G = L + delta does not.
//  * N spin-1 sites under one-axis twisting, probed by the collective spin
//    (F1..F4) and by the {-1, 1} dichotomic triple (G1..G4).

#include <string>
#include <utility>
#include <vector>

#include "squeezelab/dynamics.hpp"
#include "squeezelab/hilbert.hpp"
#include "squeezelab/invariant.hpp"
#include "squeezelab/observables.hpp"
#include "squeezelab/witness.hpp"

namespace squeezelab {

inline constexpr double kViolationTolerance = 1e-9;

struct ExampleCurve {
  std::string parameter;  // "p" or "theta"
  std::vector<double> grid;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> series;       // one per label, grid-aligned
  std::vector<std::vector<bool>> violation_mask;  // series[k][i] < -1e-9

  const std::vector<double>& at(const std::string& label) const {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == label) return series[k];
    throw InvalidArgument("curve has no series " + label);
  }
  const std::vector<bool>& mask(const std::string& label) const {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == label) return violation_mask[k];
    throw InvalidArgument("curve has no series " + label);
  }
};

namespace detail {
inline void fill_masks(ExampleCurve& c) {
  c.violation_mask.clear();
  for (const auto& s : c.series) {
    std::vector<bool> m(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) m[i] = s[i] < -kViolationTolerance;
    c.violation_mask.push_back(std::move(m));
  }
}
}  // namespace detail

/// rho(p) on two spin-1 sites.
inline MultiSpinState example1_state(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0, 1], got " + std::to_string(p));
  CMatrix rho = CMatrix::Zero(9, 9);
  // index = 3 * idx(m1) + idx(m2), idx(m) = m + 1
  rho(0, 0) = 0.5 * p;        // |-1,-1>
  rho(8, 8) = 0.5 * p;        // |1,1>
  rho(4, 4) = 1.0 - p;        // |0,0>
  return MultiSpinState::density(2, 3, std::move(rho));
}

/// Factor-1/2 Pauli operators on levels {-1, 1} of spin 1.
inline ObservableTriple example_dichotomic_triple(int sites) {
  return dichotomic_from_levels(Spin::from_twice(2), -1.0, 1.0, 0.5, sites);
}

/// Subset whose margin is the L / G pair: <A~_z^2> on the right, modified
/// variances of x and y on the left.
inline Subset example1_subset() { return Subset::of({3}); }

/// Series "L" (naive), "G" (generalized) and "delta" along p.
inline ExampleCurve example1_curve(const std::vector<double>& p_grid) {
  const ObservableTriple triple = example_dichotomic_triple(2);
  ExampleCurve c;
  c.parameter = "p";
  c.grid = p_grid;
  c.labels = {"L", "G", "delta"};
  c.series.assign(3, {});
  for (double p : p_grid) {
    const MomentSet ms = moments(example1_state(p), triple);
    c.series[0].push_back(naive_lhs(ms, triple.alpha, example1_subset()));
    c.series[1].push_back(generalized_lhs(ms, triple.alpha, example1_subset()));
    c.series[2].push_back(delta(ms, triple.alpha));
  }
  detail::fill_masks(c);
  return c;
}

struct Example2Curves {
  ExampleCurve spin;        // F1..F4
  ExampleCurve dichotomic;  // G1..G4
};

inline ExampleCurve curve_from_sweep(const SweepResult& s) {
  ExampleCurve c;
  c.parameter = "theta";
  c.grid = s.thetas();
  c.labels = s.labels;
  for (std::size_t k = 0; k < s.labels.size(); ++k) c.series.push_back(s.column(k));
  detail::fill_masks(c);
  return c;
}

inline Example2Curves example2_curves(int sites, const std::vector<double>& theta_grid,
                                      const InvariantOptions& opts = {}) {
  const Spin one = Spin::from_twice(2);
  const OneAxisTwisting evolution(sites, one);
  const ObservableTriple spin = collective_spin(one, sites);
  const ObservableTriple dich = example_dichotomic_triple(sites);
  return {curve_from_sweep(sweep(evolution, theta_grid, spin, SweepSuite::original_invariant)),
          curve_from_sweep(sweep(evolution, theta_grid, dich, SweepSuite::generalized_invariant, opts))};
}

}  // namespace squeezelab
