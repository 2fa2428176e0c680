#include <gtest/gtest.h>

#include "rusgate/cubic.hpp"
#include "support/oracles.hpp"

using namespace rusgate;

TEST(Cubic, FactorCoefficients) {
  for (double g : {0.03, 0.1, 1.0}) {
    for (int N : {1, 3, 7}) {
      const auto d = gamma_factors(g, N);
      const double mag = std::cbrt(g / N);
      for (int l = 0; l < 3; ++l) {
        EXPECT_NEAR(std::abs(d.gamma_l[l]), mag, 1e-15);
        EXPECT_NEAR(std::arg(d.gamma_l[l]), std::remainder(M_PI * (4 * l + 1) / 6.0, 2 * M_PI), 1e-14);
      }
      // elementary symmetric polynomials: (1 + g0 x)(1 + g1 x)(1 + g2 x) = 1 + i (g/N) x^3
      const auto& y = d.gamma_l;
      EXPECT_NEAR(std::abs(y[0] + y[1] + y[2]), 0.0, 1e-15);
      EXPECT_NEAR(std::abs(y[0] * y[1] + y[1] * y[2] + y[0] * y[2]), 0.0, 1e-15);
      EXPECT_NEAR(std::abs(y[0] * y[1] * y[2] - Complex(0, g / N)), 0.0, 1e-15);
    }
  }
  EXPECT_THROW(gamma_factors(0.0, 1), InvalidArgument);
  EXPECT_THROW(gamma_factors(0.1, 0), InvalidArgument);
}

TEST(Cubic, FactorProductIsUnitCubic) {
  const int c = 30;
  const auto d = gamma_factors(0.1, 3);
  const Matrix prod = factor_operator(d.gamma_l[2], c).matrix() *
                      factor_operator(d.gamma_l[1], c).matrix() *
                      factor_operator(d.gamma_l[0], c).matrix();
  const Matrix x = oracle::position(c);
  const Matrix ref = Matrix::Identity(c, c) + Complex(0, 0.1 / 3) * x * x * x;
  EXPECT_LT((prod - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cubic, UnOperatorMatchesRepeatedProduct) {
  const int c = 20;
  const Matrix x = oracle::position(c);
  const Matrix step = Matrix::Identity(c, c) + Complex(0, 0.03 / 5) * x * x * x;
  Matrix ref = Matrix::Identity(c, c);
  for (int k = 0; k < 5; ++k) ref = step * ref;
  EXPECT_LT((u_n_operator(0.03, 5, c).matrix() - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cubic, IdealGateMatchesSpectralOracle) {
  const int c = 30;
  const Matrix ref = oracle::of_position(c, [](double x) { return std::polar(1.0, 0.05 * x * x * x); });
  EXPECT_LT((ideal_cubic_gate(0.05, c).matrix() - ref).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Cubic, ApproximationImprovesWithN) {
  double prev = 1e9;
  for (int N : {1, 2, 4, 8}) {
    const double e = approximation_error(0.03, N, 40, 10);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_THROW(approximation_error(0.03, 1, 40, 41), InvalidArgument);
}

TEST(Cubic, GroupCommutatorOfCanonicalPairIsExact) {
  const int c = 40;
  const double r = commutator_approx_residual(quadrature_x(c), quadrature_p(c), 0.2);
  EXPECT_LT(r, 1e-12);
}

TEST(Cubic, GroupCommutatorResidualIsThirdOrder) {
  const int c = 40;
  const FockOperator x = quadrature_x(c);
  const FockOperator p2(quadrature_p(c).matrix() * quadrature_p(c).matrix(), {c}, true);
  const double r1 = commutator_approx_residual(x, p2, 0.02);
  const double r2 = commutator_approx_residual(x, p2, 0.01);
  EXPECT_NEAR(r1 / r2, 8.0, 0.5);
  EXPECT_THROW(commutator_approx_residual(x, FockOperator(annihilation(c).matrix(), {c}), 0.1),
               InvalidArgument);
}

TEST(Cubic, MonomialIdentityConstant) {
  for (int m : {4, 5, 6}) {
    const IdentityReport r = monomial_identity_report(m, 40);
    EXPECT_NEAR(r.constant.real(), 4.0, 1e-8) << m;
    EXPECT_NEAR(r.constant.imag(), 0.0, 1e-8);
    EXPECT_LT(r.residual, 1e-6);
    EXPECT_EQ(r.cutoff, 40);
  }
  EXPECT_THROW(monomial_identity_report(3, 40), InvalidArgument);
}

TEST(Cubic, PolynomialIdentityConstant) {
  for (auto [m, n] : {std::pair{1, 1}, {2, 1}, {1, 2}}) {
    const IdentityReport r = polynomial_identity_report(m, n, 40);
    EXPECT_NEAR(r.constant.real(), 2.0, 1e-8) << m << "," << n;
    EXPECT_LT(r.residual, 1e-6);
  }
  // higher orders are not proportional; the report still fits a constant
  EXPECT_GT(polynomial_identity_report(2, 2, 40).residual, 1e-2);
}

TEST(Cubic, IdentityReportsBuildFromOracleOperators) {
  const int c = 30;
  const IdentityReport r = monomial_identity_report(4, c);
  const Matrix x = oracle::position(c);
  Matrix x4 = x * x * x * x;
  EXPECT_LT((r.lhs - x4).cwiseAbs().maxCoeff(), 1e-10);
}
