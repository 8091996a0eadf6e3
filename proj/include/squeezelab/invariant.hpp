#pragma once

// Frame-independent criteria built from the 3x3 correlation matrices
//
//   C_ab     = <A_a A_b + A_b A_a> / 2
//   gamma_ab = C_ab - <A_a><A_b>
//   X        = (N - 1) gamma + C - N^2 Q     (Q only for spin triples)
//
// and their traces and extremal eigenvalues.

#include <array>
#include <optional>
#include <string>

#include "squeezelab/hilbert.hpp"
#include "squeezelab/observables.hpp"
#include "squeezelab/witness.hpp"

namespace squeezelab {

struct InvariantMatrices {
  RMatrix3 C = RMatrix3::Zero();
  RMatrix3 gamma = RMatrix3::Zero();
  std::optional<RMatrix3> Q;  // spin triples only
  RMatrix3 X = RMatrix3::Zero();
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();  // <A_k>
  double n_mean = 0.0;
  double alpha = 0.0;
};

/// Which N multiplies gamma in X for the dichotomic construction.
enum class XScale { mean_occupation, site_count };

/// Which coefficients the generalized frame-independent margins use.
///
/// `consistent` is what minimizing the coordinate-dependent generalized
/// margins over all frames gives (and what reduces to the fixed-N spin-1/2
/// forms). `as_printed` uses the alternative coefficients
///   G2 = delta + (n - 1) tr gamma - n (n - 2) / 2 - lambda_max
///   G3 = delta - tr C - n / 2 + lambda_min
/// which some product states violate (G3 = -N on |m0>^N).
enum class InvariantForm { consistent, as_printed };

inline std::string to_string(InvariantForm f) {
  return f == InvariantForm::consistent ? "consistent" : "printed";
}

namespace detail {
inline void correlations(const MultiSpinState& state, const ObservableTriple& triple,
                         InvariantMatrices& m) {
  if (state.sites() != triple.sites || state.local_dim() != triple.local_dim)
    throw InvalidArgument("invariant matrices: state and triple dimensions differ");
  const CMatrix mm =
      moment_matrix(state, {&triple.collective[0], &triple.collective[1], &triple.collective[2]});
  for (int a = 0; a < 3; ++a) m.mean(a) = expect(state, triple.collective[a]);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m.C(a, b) = 0.5 * (mm(a, b) + mm(b, a)).real();
  m.gamma = m.C - m.mean * m.mean.transpose();
  m.n_mean = expect(state, triple.number);
  m.alpha = triple.alpha;
}

inline void finish_spectrum(InvariantMatrices& m) {
  m.X = 0.5 * (m.X + m.X.transpose()).eval();
  const Eigen::Vector3d ev = symmetric_eigenvalues(m.X);
  m.lambda_min = ev(0);
  m.lambda_max = ev(2);
}
}  // namespace detail

/// C, gamma, Q and X for a collective spin triple at fixed N = site count.
inline InvariantMatrices build_invariant_spin(const MultiSpinState& state,
                                              const ObservableTriple& triple) {
  if (triple.kind != TripleKind::spin)
    throw InvalidArgument("build_invariant_spin needs a collective spin triple");
  InvariantMatrices m;
  detail::correlations(state, triple, m);
  const double n = triple.sites;
  const double j = triple.spin;
  RMatrix3 q = RMatrix3::Zero();
  std::array<std::array<CMatrix, 3>, 3> anti;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      anti[a][b] = 0.5 * (triple.local[a] * triple.local[b] + triple.local[b] * triple.local[a]);
  for (int s = 1; s <= triple.sites; ++s) {
    const CMatrix r = reduced_density(state, s);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) q(a, b) += local_expect(r, anti[a][b]);
  }
  q /= n;
  q.diagonal().array() -= j * (j + 1.0) / 3.0;
  m.Q = q;
  m.X = (n - 1.0) * m.gamma + m.C - n * n * q;
  detail::finish_spectrum(m);
  return m;
}

/// Fixed-N frame-independent margins F1..F4 for spin j.
inline std::array<double, 4> original_invariant_suite(const InvariantMatrices& m, double j, int sites) {
  const double n = sites;
  const double tr_c = m.C.trace();
  const double tr_g = m.gamma.trace();
  const double q_term = n * n * j * (j + 1.0) / 3.0;
  return {
      tr_g - n * j,
      (n - 1.0) * tr_g - n * (n - 1.0) * j + q_term - m.lambda_max,
      -tr_c + n * j * (n * j + 1.0) - q_term + m.lambda_min,
      -tr_c + n * j * (n * j + 1.0),
  };
}

/// C, gamma and X = (n - 1) gamma + C for a dichotomic triple, where n is
/// <N-hat> or the site count.
inline InvariantMatrices build_invariant_dichotomic(const MultiSpinState& state,
                                                    const ObservableTriple& triple,
                                                    XScale scale = XScale::mean_occupation) {
  if (triple.kind != TripleKind::dichotomic)
    throw InvalidArgument("build_invariant_dichotomic needs a dichotomic triple");
  InvariantMatrices m;
  detail::correlations(state, triple, m);
  const double n = scale == XScale::mean_occupation ? m.n_mean : static_cast<double>(triple.sites);
  m.X = (n - 1.0) * m.gamma + m.C;
  detail::finish_spectrum(m);
  return m;
}

/// Generalized frame-independent margins G1..G4. Only defined for
/// factor-1/2 dichotomic triples (alpha = 1/2).
inline std::array<double, 4> generalized_invariant_suite(const InvariantMatrices& m, double delta,
                                                         double n_mean,
                                                         InvariantForm form = InvariantForm::consistent) {
  if (std::abs(m.alpha - 0.5) > 1e-15)
    throw InvalidArgument("generalized invariant suite needs a factor-1/2 dichotomic triple (alpha = " +
                          std::to_string(m.alpha) + ")");
  const double n = n_mean;
  const double tr_c = m.C.trace();
  const double tr_g = m.gamma.trace();
  const double g1 = tr_g - n / 2.0;
  const double g4 = delta - tr_c + n * (n + 2.0) / 4.0;
  if (form == InvariantForm::as_printed)
    return {g1, delta + (n - 1.0) * tr_g - n * (n - 2.0) / 2.0 - m.lambda_max,
            delta - tr_c - n / 2.0 + m.lambda_min, g4};
  return {g1, delta + (n - 1.0) * tr_g - n * (n - 2.0) / 4.0 - m.lambda_max,
          delta - tr_c + n / 2.0 + m.lambda_min, g4};
}

/// Everything needed to report the generalized frame-independent suite.
struct InvariantReport {
  InvariantMatrices matrices;
  double delta = 0.0;
  double n_mean = 0.0;
  std::array<double, 4> margins{};
  std::array<double, 4> printed_margins{};
  InvariantForm form = InvariantForm::consistent;
  std::optional<Verdict> verdict;
};

struct InvariantOptions {
  InvariantForm form = InvariantForm::consistent;
  XScale x_scale = XScale::mean_occupation;
  double tolerance = kVerdictTolerance;
};

inline InvariantReport generalized_invariant_report(const MultiSpinState& state,
                                                    const ObservableTriple& triple,
                                                    const InvariantOptions& opts = {}) {
  InvariantReport r;
  r.form = opts.form;
  r.matrices = build_invariant_dichotomic(state, triple, opts.x_scale);
  const MomentSet ms = moments(state, triple);
  r.delta = delta(ms, triple.alpha);
  r.n_mean = ms.n_mean;
  r.margins = generalized_invariant_suite(r.matrices, r.delta, r.n_mean, opts.form);
  r.printed_margins = generalized_invariant_suite(r.matrices, r.delta, r.n_mean, InvariantForm::as_printed);
  double worst = r.margins[0];
  for (double v : r.margins) worst = std::min(worst, v);
  r.verdict = worst < -opts.tolerance ? Verdict::entangled_detected : Verdict::not_detected;
  return r;
}

}  // namespace squeezelab
