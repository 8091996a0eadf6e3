#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "squeezelab/dynamics.hpp"
#include "squeezelab/invariant.hpp"
#include "squeezelab/oracle.hpp"
#include "squeezelab/worked_examples.hpp"

namespace sl = squeezelab;

namespace {

Eigen::Vector3d random_axis(sl::Rng& rng) {
  return Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
}

}  // namespace

TEST(Correlations, MatchDenseDefinition) {
  const auto t = sl::example_dichotomic_triple(3);
  sl::Rng rng(1);
  const auto st = sl::MultiSpinState::density(3, 3, sl::random_density(27, 2, rng));
  const auto m = sl::build_invariant_dichotomic(st, t);
  const sl::CMatrix rho = st.to_density();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const sl::CMatrix aa = oracle::sum_embed(t.local[a], 3);
      const sl::CMatrix bb = oracle::sum_embed(t.local[b], 3);
      const double c = 0.5 * (rho * (aa * bb + bb * aa)).trace().real();
      const double g = c - (rho * aa).trace().real() * (rho * bb).trace().real();
      EXPECT_NEAR(m.C(a, b), c, 1e-12);
      EXPECT_NEAR(m.gamma(a, b), g, 1e-12);
    }
  const Eigen::Matrix3d x = (m.n_mean - 1.0) * m.gamma + m.C;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(x);
  EXPECT_NEAR(m.lambda_min, es.eigenvalues()(0), 1e-12);
  EXPECT_NEAR(m.lambda_max, es.eigenvalues()(2), 1e-12);
}

TEST(Correlations, SiteCountScale) {
  const auto t = sl::example_dichotomic_triple(2);
  const auto st = sl::example1_state(0.3);
  const auto m = sl::build_invariant_dichotomic(st, t, sl::XScale::site_count);
  EXPECT_LT((m.X - (m.gamma + m.C)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SpinSuite, ConstantAlongTwisting) {
  // F1 = N and F2 = F3 = F4 = N (N - 1) for spin 1 at every angle.
  const sl::Spin one = sl::Spin::from_twice(2);
  for (int n : {2, 3, 4}) {
    const sl::OneAxisTwisting oat(n, one);
    const auto t = sl::collective_spin(one, n);
    for (double theta : {0.0, 0.4, 1.3, 2.9, 5.0}) {
      const auto f = sl::original_invariant_suite(sl::build_invariant_spin(oat.state(theta), t), 1.0, n);
      EXPECT_NEAR(f[0], n, 1e-9);
      for (int k = 1; k < 4; ++k) EXPECT_NEAR(f[k], n * (n - 1.0), 1e-9) << n << " " << theta << " " << k;
    }
  }
}

TEST(SpinSuite, SeparableStatesSatisfyAll) {
  for (int tj : {1, 2}) {
    const sl::Spin s = sl::Spin::from_twice(tj);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const int n = 2 + static_cast<int>(seed % 2);
      const auto t = sl::collective_spin(s, n);
      const auto st = sl::sample_separable({n, s.dim(), 1 + int(seed % 4), seed});
      const auto f = sl::original_invariant_suite(sl::build_invariant_spin(st, t), s.value(), n);
      for (double v : f) EXPECT_GE(v, -1e-9);
    }
  }
}

TEST(GeneralizedSuite, NeedsHalfFactor) {
  const auto t = sl::dichotomic_from_levels(sl::Spin::from_twice(2), -1.0, 1.0, 1.0, 2);
  const auto m = sl::build_invariant_dichotomic(sl::example1_state(0.5), t);
  EXPECT_THROW(sl::generalized_invariant_suite(m, 0.0, 1.0), sl::InvalidArgument);
}

TEST(GeneralizedSuite, FirstEqualsDelta) {
  const auto t = sl::example_dichotomic_triple(2);
  for (double p : {0.0, 0.3, 0.8}) {
    const auto r = sl::generalized_invariant_report(sl::example1_state(p), t);
    EXPECT_NEAR(r.margins[0], r.delta, 1e-12);
  }
}

TEST(GeneralizedSuite, SeparableStatesSatisfyConsistentForm) {
  const sl::Spin one = sl::Spin::from_twice(2);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const auto t = sl::dichotomic_from_levels(one, -1.0 + double(seed % 2), 1.0, 0.5, n);
    const auto r = sl::generalized_invariant_report(sl::sample_separable({n, 3, 1 + int(seed % 5), seed}), t);
    for (double v : r.margins) EXPECT_GE(v, -1e-9) << seed;
  }
}

// The frame-independent margins are lower bounds of the frame-dependent
// generalized margins over every rotated frame.
TEST(GeneralizedSuite, BoundsEveryFrame) {
  const auto t = sl::example_dichotomic_triple(3);
  sl::Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto st = sl::MultiSpinState::density(3, 3, sl::random_density(27, 2, rng));
    const auto r = sl::generalized_invariant_report(st, t);
    const double floor = *std::min_element(r.margins.begin(), r.margins.end());
    for (int rot = 0; rot < 20; ++rot) {
      const auto rt = sl::rotate_triple(t, random_axis(rng), 2.0 * std::numbers::pi * rng.uniform());
      const auto w = sl::full_report(st, rt, sl::Suite::generalized);
      EXPECT_GE(w.min_margin(), floor - 1e-9);
    }
  }
}

TEST(GeneralizedSuite, PrintedCoefficientsFlagProductStates) {
  // |-1>^N is a product state; the printed third margin gives -N there.
  const sl::Spin one = sl::Spin::from_twice(2);
  for (int n : {2, 3}) {
    const std::vector<double> levels(static_cast<std::size_t>(n), -1.0);
    const auto st = sl::product_ket(one, levels);
    const auto t = sl::example_dichotomic_triple(n);
    sl::InvariantOptions printed;
    printed.form = sl::InvariantForm::as_printed;
    EXPECT_NEAR(sl::generalized_invariant_report(st, t, printed).margins[2], -n, 1e-12);
    const auto r = sl::generalized_invariant_report(st, t);
    for (double v : r.margins) EXPECT_GE(v, -1e-12);
    EXPECT_NEAR(r.printed_margins[2], -n, 1e-12);
  }
}

TEST(GeneralizedSuite, RotationInvariant) {
  const auto t = sl::example_dichotomic_triple(2);
  sl::Rng rng(3);
  const auto st = sl::MultiSpinState::density(2, 3, sl::random_density(9, 9, rng));
  const auto base = sl::generalized_invariant_report(st, t);
  for (int k = 0; k < 20; ++k) {
    const auto rt = sl::rotate_triple(t, random_axis(rng), 6.0 * rng.uniform());
    const auto r = sl::generalized_invariant_report(st, rt);
    EXPECT_NEAR(r.matrices.C.trace(), base.matrices.C.trace(), 1e-10);
    EXPECT_NEAR(r.matrices.gamma.trace(), base.matrices.gamma.trace(), 1e-10);
    EXPECT_NEAR(r.delta, base.delta, 1e-10);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.margins[i], base.margins[i], 1e-10);
  }
}
