#pragma once

// Modified moments and the three families of spin-squeezing margins:
//
//   generalized  valid for any separable state, particle number may fluctuate
//   original     fixed particle number N (baseline)
//   naive        original with N replaced by <N-hat> and no delta term; not a
//                separability criterion, reported without a verdict
//
// Every margin is LHS - RHS of an inequality written as LHS >= RHS, so a
// negative margin is a violation.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "squeezelab/hilbert.hpp"
#include "squeezelab/observables.hpp"

namespace squeezelab {

inline constexpr double kVerdictTolerance = 1e-9;

/// Subset of the three observable indices {1, 2, 3}.
class Subset {
 public:
  constexpr Subset() = default;

  static Subset from_mask(unsigned mask) {
    if (mask > 7u) throw InvalidArgument("subset mask must be in 0..7");
    return Subset(static_cast<std::uint8_t>(mask));
  }

  /// Members are 1-based.
  static Subset of(std::initializer_list<int> members) {
    unsigned mask = 0;
    for (int m : members) {
      if (m < 1 || m > 3) throw InvalidArgument("subset member " + std::to_string(m) + " outside 1..3");
      mask |= 1u << (m - 1);
    }
    return Subset(static_cast<std::uint8_t>(mask));
  }

  /// All eight subsets, by cardinality then lexicographically.
  static std::array<Subset, 8> all() {
    return {Subset(0), Subset(1), Subset(2), Subset(4), Subset(3), Subset(5), Subset(6), Subset(7)};
  }

  /// k is 0-based.
  constexpr bool contains(int k) const { return (mask_ >> k) & 1u; }
  int size() const { return std::popcount(static_cast<unsigned>(mask_)); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr unsigned mask() const { return mask_; }

  /// "I=" followed by the sorted 1-based members, e.g. "I=", "I=3", "I=12".
  std::string key() const {
    std::string s = "I=";
    for (int k = 0; k < 3; ++k)
      if (contains(k)) s += static_cast<char>('1' + k);
    return s;
  }

  friend constexpr bool operator==(Subset, Subset) = default;

 private:
  constexpr explicit Subset(std::uint8_t mask) : mask_(mask) {}
  std::uint8_t mask_ = 0;
};

/// First moments, modified second moments and local moments of a state
/// under an observable triple.
struct MomentSet {
  int sites = 0;
  std::array<double, 3> first{};         // <A_k>
  std::array<double, 3> second{};        // <A_k^2>
  std::array<double, 3> local_squares{}; // sum_i <(A_k^(i))^2>
  std::array<double, 3> mod_second{};    // <A~_k^2> = <A_k^2> - sum_i <(A_k^(i))^2>
  std::array<double, 3> mod_variance{};  // <A~_k^2> - <A_k>^2
  double n_mean = 0.0;                   // <N-hat>
  double n_second = 0.0;                 // <N-hat^2>
  Eigen::MatrixX3d local_first;          // row i: <A_k^(i)>
  RVector local_n;                       // <N^(i)>

  double n_variance() const { return n_second - n_mean * n_mean; }
};

inline MomentSet moments(const MultiSpinState& state, const ObservableTriple& triple) {
  if (state.sites() != triple.sites || state.local_dim() != triple.local_dim)
    throw InvalidArgument("moments: state has " + std::to_string(state.sites()) + " sites of dim " +
                          std::to_string(state.local_dim()) + ", triple expects " +
                          std::to_string(triple.sites) + " of dim " +
                          std::to_string(triple.local_dim));
  MomentSet ms;
  ms.sites = triple.sites;
  const CMatrix mm = moment_matrix(
      state, {&triple.collective[0], &triple.collective[1], &triple.collective[2], &triple.number});
  for (int k = 0; k < 3; ++k) {
    ms.first[k] = expect(state, triple.collective[k]);
    ms.second[k] = mm(k, k).real();
  }
  ms.n_mean = expect(state, triple.number);
  ms.n_second = mm(3, 3).real();

  std::array<CMatrix, 3> local_sq;
  for (int k = 0; k < 3; ++k) local_sq[k] = triple.local[k] * triple.local[k];
  ms.local_first.resize(triple.sites, 3);
  ms.local_n.resize(triple.sites);
  for (int i = 0; i < triple.sites; ++i) {
    const CMatrix r = reduced_density(state, i + 1);
    for (int k = 0; k < 3; ++k) {
      ms.local_first(i, k) = local_expect(r, triple.local[k]);
      ms.local_squares[k] += local_expect(r, local_sq[k]);
    }
    ms.local_n(i) = local_expect(r, triple.local_number);
  }
  for (int k = 0; k < 3; ++k) {
    ms.mod_second[k] = ms.second[k] - ms.local_squares[k];
    ms.mod_variance[k] = ms.mod_second[k] - ms.first[k] * ms.first[k];
  }
  return ms;
}

/// delta = sum_k modified variance + alpha^2 <N-hat>.
inline double delta(const MomentSet& ms, double alpha) {
  return ms.mod_variance[0] + ms.mod_variance[1] + ms.mod_variance[2] + alpha * alpha * ms.n_mean;
}

/// Product-state correction delta' (bounded above by delta):
/// alpha^2 <N> - sum_i |<A^(i)>|^2 + <N> sum_i (|<A^(i)>|^2 - alpha^2 <N^(i)>^2).
inline double delta_prime(const MomentSet& ms, double alpha) {
  const double a2 = alpha * alpha;
  double bloch = 0.0;
  double excess = 0.0;
  for (int i = 0; i < ms.sites; ++i) {
    const double b = ms.local_first.row(i).squaredNorm();
    bloch += b;
    excess += b - a2 * ms.local_n(i) * ms.local_n(i);
  }
  return a2 * ms.n_mean - bloch + ms.n_mean * excess;
}

namespace detail {
/// (n - 1) sum_{k not in I} dvar_k - sum_{k in I} <A~_k^2> + n (n - 1) alpha^2
inline double compact_margin(const MomentSet& ms, double alpha, double n, Subset subset) {
  double outside = 0.0;
  double inside = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (subset.contains(k))
      inside += ms.mod_second[k];
    else
      outside += ms.mod_variance[k];
  }
  return (n - 1.0) * outside - inside + n * (n - 1.0) * alpha * alpha;
}

/// First row of each family: sum_k dvar_k + n alpha^2.
inline double empty_subset_margin(const MomentSet& ms, double alpha, double n) {
  return ms.mod_variance[0] + ms.mod_variance[1] + ms.mod_variance[2] + n * alpha * alpha;
}
}  // namespace detail

/// Generalized margin for subset I. The empty subset gives delta itself
/// (the first inequality of the family is delta >= 0).
inline double generalized_lhs(const MomentSet& ms, double alpha, Subset subset) {
  const double d = delta(ms, alpha);
  if (subset.empty()) return d;
  return detail::compact_margin(ms, alpha, ms.n_mean, subset) + d;
}

enum class FixedNCheck { enforce, skip };

/// Fixed-particle-number margin. Unless `check` is skip, the state must have
/// <N-hat> = n_fixed with vanishing number variance.
inline double original_lhs(const MomentSet& ms, double alpha, int n_fixed, Subset subset,
                           FixedNCheck check = FixedNCheck::enforce) {
  if (check == FixedNCheck::enforce) {
    if (std::abs(ms.n_mean - n_fixed) > 1e-9)
      throw PreconditionError("original suite needs exactly " + std::to_string(n_fixed) +
                              " particles, <N> = " + std::to_string(ms.n_mean));
    if (ms.n_variance() > 1e-10)
      throw PreconditionError("original suite needs a fixed particle number, Var(N) = " +
                              std::to_string(ms.n_variance()));
  }
  const double n = n_fixed;
  if (subset.empty()) return detail::empty_subset_margin(ms, alpha, n);
  return detail::compact_margin(ms, alpha, n, subset);
}

/// Original margin with N replaced by <N-hat> and delta dropped.
inline double naive_lhs(const MomentSet& ms, double alpha, Subset subset) {
  if (subset.empty()) return detail::empty_subset_margin(ms, alpha, ms.n_mean);
  return detail::compact_margin(ms, alpha, ms.n_mean, subset);
}

enum class Suite { generalized, original, naive };
enum class Verdict { entangled_detected, not_detected };

inline std::string to_string(Suite s) {
  switch (s) {
    case Suite::generalized: return "generalized";
    case Suite::original: return "original";
    case Suite::naive: return "naive";
  }
  return "unknown";
}

inline std::string to_string(Verdict v) {
  return v == Verdict::entangled_detected ? "entangled-detected" : "not-detected";
}

struct WitnessReport {
  Suite suite = Suite::generalized;
  std::vector<std::pair<Subset, double>> margins;  // Subset::all() order
  double delta = 0.0;
  double n_mean = 0.0;
  std::optional<int> n_fixed;       // original suite only
  std::optional<Verdict> verdict;   // never set for the naive suite
  std::vector<std::string> warnings;

  double margin(Subset s) const {
    for (const auto& [sub, m] : margins)
      if (sub == s) return m;
    throw InvalidArgument("subset not in report");
  }
  double min_margin() const {
    double m = margins.front().second;
    for (const auto& [sub, v] : margins) m = std::min(m, v);
    return m;
  }
};

struct ReportOptions {
  double tolerance = kVerdictTolerance;
  /// Original suite: particle number to assume. Defaults to round(<N-hat>).
  std::optional<int> n_fixed;
  FixedNCheck fixed_n_check = FixedNCheck::enforce;
};

inline WitnessReport full_report(const MomentSet& ms, double alpha, Suite suite,
                                 const ReportOptions& opts = {}) {
  WitnessReport r;
  r.suite = suite;
  r.delta = delta(ms, alpha);
  r.n_mean = ms.n_mean;
  if (ms.n_mean < 1.0) r.warnings.emplace_back("n_mean < 1: inequalities evaluated as written");
  if (suite == Suite::original)
    r.n_fixed = opts.n_fixed.value_or(static_cast<int>(std::lround(ms.n_mean)));
  for (Subset s : Subset::all()) {
    double m = 0.0;
    switch (suite) {
      case Suite::generalized: m = generalized_lhs(ms, alpha, s); break;
      case Suite::original: m = original_lhs(ms, alpha, *r.n_fixed, s, opts.fixed_n_check); break;
      case Suite::naive: m = naive_lhs(ms, alpha, s); break;
    }
    r.margins.emplace_back(s, m);
  }
  if (suite != Suite::naive)
    r.verdict = r.min_margin() < -opts.tolerance ? Verdict::entangled_detected : Verdict::not_detected;
  else
    r.warnings.emplace_back("naive suite is not a separability criterion; no verdict");
  return r;
}

inline WitnessReport full_report(const MultiSpinState& state, const ObservableTriple& triple,
                                 Suite suite, const ReportOptions& opts = {}) {
  return full_report(moments(state, triple), triple.alpha, suite, opts);
}

}  // namespace squeezelab
