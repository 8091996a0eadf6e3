#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "squeezelab/hilbert.hpp"
#include "squeezelab/random.hpp"

namespace sl = squeezelab;

namespace {

struct CapGuard {
  std::size_t saved = sl::dimension_cap();
  ~CapGuard() { sl::set_dimension_cap(saved); }
};

}  // namespace

TEST(Kron, MatchesIndexFormula) {
  std::mt19937_64 gen(1);
  const auto a = oracle::random_matrix(2, 3, gen);
  const auto b = oracle::random_matrix(3, 2, gen);
  EXPECT_LT(sl::max_abs(sl::kron(a, b) - oracle::kron(a, b)), 1e-15);
}

TEST(Kron, Associative) {
  std::mt19937_64 gen(2);
  const auto a = oracle::random_matrix(2, 2, gen);
  const auto b = oracle::random_matrix(3, 3, gen);
  const auto c = oracle::random_matrix(2, 2, gen);
  EXPECT_LT(sl::max_abs(sl::kron(sl::kron(a, b), c) - sl::kron(a, sl::kron(b, c))), 1e-13);
}

TEST(Kron, VectorAgreesWithMatrix) {
  std::mt19937_64 gen(3);
  const sl::CVector u = oracle::random_unit(3, gen);
  const sl::CVector v = oracle::random_unit(2, gen);
  const sl::CMatrix um = u;
  const sl::CMatrix vm = v;
  EXPECT_LT(sl::max_abs(sl::CMatrix(sl::kron(u, v)) - sl::kron(um, vm)), 1e-15);
}

TEST(Embed, MatchesIdentityChain) {
  std::mt19937_64 gen(4);
  const auto op = oracle::random_hermitian(3, gen);
  for (int site = 1; site <= 3; ++site)
    EXPECT_LT(sl::max_abs(sl::embed_local(op, site, 3, 3) - oracle::embed(op, site, 3)), 1e-15) << site;
  EXPECT_LT(sl::max_abs(sl::collective(op, 3, 3) - oracle::sum_embed(op, 3)), 1e-14);
}

TEST(Embed, RejectsBadSite) {
  const sl::CMatrix op = sl::identity(2);
  EXPECT_THROW(sl::embed_local(op, 0, 2, 2), sl::InvalidArgument);
  EXPECT_THROW(sl::embed_local(op, 3, 2, 2), sl::InvalidArgument);
}

TEST(DimensionCap, EnforcedAndConfigurable) {
  CapGuard guard;
  EXPECT_EQ(sl::checked_dimension(3, 5), 243u);
  EXPECT_THROW(sl::checked_dimension(3, 8), sl::DimensionCapError);  // 6561 > 4096
  sl::set_dimension_cap(80);
  EXPECT_THROW(sl::checked_dimension(3, 4), sl::DimensionCapError);
  EXPECT_EQ(sl::checked_dimension(3, 3), 27u);
  EXPECT_THROW(sl::set_dimension_cap(0), sl::InvalidArgument);
}

TEST(DimensionCap, EnvironmentOverride) {
  CapGuard guard;
  ::setenv("SQUEEZELAB_DIM_CAP", "100", 1);
  sl::load_dimension_cap_from_env();
  EXPECT_EQ(sl::dimension_cap(), 100u);
  ::setenv("SQUEEZELAB_DIM_CAP", "abc", 1);
  EXPECT_THROW(sl::load_dimension_cap_from_env(), sl::InvalidArgument);
  ::unsetenv("SQUEEZELAB_DIM_CAP");
}

TEST(HermEig, AgreesWithLapackStyleSolver) {
  std::mt19937_64 gen(5);
  for (int n : {1, 2, 3, 9, 27, 81}) {
    const auto m = oracle::random_hermitian(n, gen);
    const auto e = sl::herm_eig(m);
    Eigen::SelfAdjointEigenSolver<sl::CMatrix> ref(m);
    EXPECT_LT((e.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, m.norm())) << n;
    const sl::CMatrix recon = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
    EXPECT_LT(sl::max_abs(recon - m), 1e-10 * std::max(1.0, m.norm())) << n;
    EXPECT_LT(sl::max_abs(e.vectors.adjoint() * e.vectors - sl::identity(n)), 1e-10) << n;
    for (Eigen::Index k = 1; k < n; ++k) EXPECT_LE(e.values(k - 1), e.values(k));
  }
}

TEST(HermEig, ReconstructsAtLargestExampleDimension) {
  std::mt19937_64 gen(6);
  const auto m = oracle::random_hermitian(243, gen);
  const auto e = sl::herm_eig(m);
  const sl::CMatrix recon = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
  EXPECT_LT(sl::max_abs(recon - m), 1e-9 * m.norm());
}

TEST(HermEig, DegenerateAndDiagonal) {
  sl::CMatrix m = sl::CMatrix::Zero(4, 4);
  m.diagonal() << 2.0, -1.0, 2.0, 0.5;
  const auto e = sl::herm_eig(m);
  EXPECT_DOUBLE_EQ(e.values(0), -1.0);
  EXPECT_DOUBLE_EQ(e.values(1), 0.5);
  EXPECT_DOUBLE_EQ(e.values(2), 2.0);
  EXPECT_DOUBLE_EQ(e.values(3), 2.0);
}

TEST(HermEig, RejectsNonHermitian) {
  sl::CMatrix m = sl::CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(sl::herm_eig(m), sl::InvalidArgument);
}

TEST(HermExpm, MatchesTaylorAndIsUnitary) {
  std::mt19937_64 gen(7);
  for (int n : {2, 3, 9}) {
    const auto h = oracle::random_hermitian(n, gen);
    const sl::CMatrix u = sl::herm_expm(h, sl::cplx(0.0, -0.7));
    EXPECT_LT(sl::max_abs(u - oracle::expm_taylor(sl::cplx(0.0, -0.7) * h)), 1e-11) << n;
    EXPECT_LT(sl::max_abs(u.adjoint() * u - sl::identity(n)), 1e-12) << n;
  }
}

TEST(State, ValidatesInvariants) {
  sl::CVector k = sl::CVector::Zero(4);
  k(0) = 1.0;
  EXPECT_NO_THROW(sl::MultiSpinState::pure(2, 2, k));
  EXPECT_THROW(sl::MultiSpinState::pure(2, 2, 2.0 * k), sl::InvariantViolation);
  EXPECT_THROW(sl::MultiSpinState::pure(2, 2, sl::CVector::Zero(3)), sl::InvalidArgument);
  EXPECT_THROW(sl::MultiSpinState::normalized(2, 2, sl::CVector::Zero(4)), sl::InvariantViolation);

  sl::CMatrix rho = sl::CMatrix::Identity(4, 4) / 4.0;
  EXPECT_NO_THROW(sl::MultiSpinState::density(2, 2, rho));
  EXPECT_THROW(sl::MultiSpinState::density(2, 2, 2.0 * rho), sl::InvariantViolation);
  sl::CMatrix bad = rho;
  bad(0, 1) = 0.1;
  EXPECT_THROW(sl::MultiSpinState::density(2, 2, bad), sl::InvariantViolation);
  sl::CMatrix negative = sl::CMatrix::Zero(4, 4);
  negative.diagonal() << 1.2, -0.2, 0.0, 0.0;
  EXPECT_THROW(sl::MultiSpinState::density(2, 2, negative), sl::InvariantViolation);
}

TEST(Expect, PureAndDensityAgreeAndAreLinear) {
  std::mt19937_64 gen(8);
  const sl::CVector psi = oracle::random_unit(9, gen);
  const auto pure = sl::MultiSpinState::pure(2, 3, psi);
  const auto mixed = pure.as_density();
  const auto a = oracle::random_hermitian(9, gen);
  const auto b = oracle::random_hermitian(9, gen);
  const double ea = sl::expect(pure, a), eb = sl::expect(pure, b);
  EXPECT_NEAR(sl::expect(mixed, a), ea, 1e-12);
  EXPECT_NEAR(sl::expect(pure, 2.0 * a - 3.0 * b), 2.0 * ea - 3.0 * eb, 1e-11);
  EXPECT_NEAR(ea, psi.dot(a * psi).real(), 1e-12);
}

TEST(Expect, MomentMatrixIsSecondMoment) {
  std::mt19937_64 gen(9);
  const auto st = sl::MultiSpinState::pure(2, 3, oracle::random_unit(9, gen));
  const auto a = oracle::random_hermitian(9, gen);
  const auto b = oracle::random_hermitian(9, gen);
  const sl::CMatrix mm = sl::moment_matrix(st, {&a, &b});
  const sl::CMatrix rho = st.to_density();
  EXPECT_LT(std::abs(mm(0, 1) - (rho * a * b).trace()), 1e-12);
  EXPECT_LT(std::abs(mm(1, 1) - (rho * b * b).trace()), 1e-12);
  const sl::CMatrix mm2 = sl::moment_matrix(st.as_density(), {&a, &b});
  EXPECT_LT(sl::max_abs(mm - mm2), 1e-11);
}

TEST(ReducedDensity, MatchesExplicitPartialTrace) {
  sl::Rng rng(10);
  const sl::CMatrix rho = sl::random_density(27, 4, rng);
  const auto st = sl::MultiSpinState::density(3, 3, rho);
  for (int s = 1; s <= 3; ++s) {
    const sl::CMatrix r = sl::reduced_density(st, s);
    EXPECT_LT(sl::max_abs(r - oracle::reduce(rho, s, 3, 3)), 1e-13) << s;
  }
  std::mt19937_64 gen(10);
  const auto pure = sl::MultiSpinState::pure(3, 2, oracle::random_unit(8, gen));
  for (int s = 1; s <= 3; ++s)
    EXPECT_LT(sl::max_abs(sl::reduced_density(pure, s) - oracle::reduce(pure.to_density(), s, 3, 2)), 1e-13);
}

TEST(ReducedDensity, ProductStateFactorizes) {
  std::mt19937_64 gen(11);
  const sl::CVector a = oracle::random_unit(3, gen);
  const sl::CVector b = oracle::random_unit(3, gen);
  const auto st = sl::MultiSpinState::pure(2, 3, sl::kron(a, b));
  EXPECT_LT(sl::max_abs(sl::reduced_density(st, 1) - a * a.adjoint()), 1e-14);
  EXPECT_LT(sl::max_abs(sl::reduced_density(st, 2) - b * b.adjoint()), 1e-14);
}

TEST(Random, StreamsAreDeterministicAndDistinct) {
  sl::Rng a = sl::Rng::stream(42, 3), b = sl::Rng::stream(42, 3), c = sl::Rng::stream(42, 4);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  sl::Rng r(1);
  const auto w = sl::random_simplex(5, r);
  double total = 0.0;
  for (double v : w) {
    EXPECT_GE(v, 0.0);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
}
