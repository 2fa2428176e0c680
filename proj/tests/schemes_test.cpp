#include <gtest/gtest.h>

#include "rusgate/gaussian.hpp"
#include "rusgate/schemes.hpp"
#include "support/oracles.hpp"

using namespace rusgate;

TEST(Gkp, PhaseCoefficients) {
  GkpStateSpec s{12, 20.0, {-1.0, 0.0, 2.0}};
  const GkpPhaseRecord r = gkp_cubic_state(s);
  EXPECT_DOUBLE_EQ(r.energy, 12.5);
  EXPECT_NEAR(r.cubic_coeff, 1.0 / (6.0 * 5.0), 1e-15);
  EXPECT_NEAR(r.linear_coeff, -(5.0 - 20.0), 1e-15);
  ASSERT_EQ(r.phase.size(), 3u);
  EXPECT_NEAR(r.phase[2], 8.0 / 30.0 + 30.0, 1e-13);
  EXPECT_FALSE(r.small_alpha);
  EXPECT_TRUE(gkp_cubic_state({0, 5.0, {}}).small_alpha);
  EXPECT_THROW(gkp_cubic_state({-1, 20.0, {}}), InvalidArgument);
}

TEST(Gkp, CubicCoefficientScalesAsInverseRootN) {
  const double c1 = gkp_cubic_state({100, 20.0, {}}).cubic_coeff;
  const double c4 = gkp_cubic_state({400, 20.0, {}}).cubic_coeff;
  EXPECT_NEAR(c1 / c4, std::sqrt(400.5 / 100.5), 1e-12);
}

TEST(Gkp, LikelihoodWindow) {
  const GkpLikelihood l = gkp_mode_likelihood(200, 20.0, 0.5, 0.5);
  EXPECT_NEAR(l.lower, 0.5 * 18 * 18 + 2.0, 1e-12);
  EXPECT_NEAR(l.upper, 0.5 * 22 * 22 + 2.0, 1e-12);
  EXPECT_TRUE(l.inside);
  EXPECT_FALSE(gkp_mode_likelihood(10, 20.0, 0.5, 0.5).inside);
  EXPECT_THROW(gkp_mode_likelihood(1, 20.0, 1.5, 0.5), InvalidArgument);
}

TEST(Marek, ResourceSupportAndRatio) {
  const MarekResource m = marek_resource_state(2.0, 0.03, 60);
  EXPECT_NEAR(m.gamma_prime, 0.03 * std::pow(2.0, 1.5), 1e-15);
  const Vector& v = m.squeezed_frame;
  ASSERT_EQ(v.size(), 6);
  EXPECT_LT(std::abs(v(2)), 1e-8);
  EXPECT_LT(std::abs(v(4)), 1e-8);
  EXPECT_LT(std::abs(v(5)), 1e-8);
  EXPECT_NEAR(std::abs(v(3) / v(1)), std::sqrt(6.0) / 3.0, 1e-6);
}

TEST(Marek, SqueezedFrameMatchesDirectConstruction) {
  const int c = 12;
  const double r = 3.0, g = 0.05;
  const Matrix x = oracle::position(c);
  Vector vac = Vector::Zero(c);
  vac(0) = 1.0;
  const Vector ref = vac + Complex(0, g * std::pow(r, 1.5)) * (x * x * x * vac);
  const FockState s = marek_resource_squeezed_frame(r, g, c);
  EXPECT_GT(oracle::overlap2(s.amplitudes(), ref), 1 - 1e-14);
  EXPECT_LT((s.amplitudes() - oracle::normalized(ref)).cwiseAbs().maxCoeff(), 1e-14);

  const MarekResource lab = marek_resource_state(r, g, 80);
  EXPECT_LT((lab.squeezed_frame - s.amplitudes().head(6)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Marek, FeedForwardMatchesOracle) {
  const int c = 20;
  const double g = 0.04, q = 0.7;
  const Matrix ref = oracle::of_position(c, [&](double x) {
    return std::polar(1.0, -g * q * q * q - 3 * g * (x + q) * x * q);
  });
  EXPECT_LT((marek_feed_forward(g, q, c).matrix() - ref).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Marek, ForcedZeroOutcomeImprovesWithSqueezing) {
  const int c = 30;
  const FockState psi = coherent(0.3, c);
  const Matrix x = oracle::position(c);
  const Vector target = psi.amplitudes() + Complex(0, 0.03) * (x * x * x * psi.amplitudes());
  double prev = 0.0;
  for (double r : {4.0, 16.0, 64.0}) {
    Rng rng(1);
    const MarekOutcome o = marek_gate(psi, r, 0.03, rng, 41, 0.0);
    EXPECT_EQ(o.q, 0.0);
    EXPECT_FALSE(o.feed_forward_applied);
    EXPECT_GT(o.probability, 0.0);
    const double f = oracle::overlap2(o.state.amplitudes(), target);
    EXPECT_GT(f, prev);
    prev = f;
  }
  EXPECT_GT(prev, 0.999);
}

TEST(Marek, SampledOutcomesAreReproducible) {
  const FockState psi = coherent(0.2, 20);
  Rng a(4), b(4);
  for (int k = 0; k < 5; ++k) {
    const MarekOutcome oa = marek_gate(psi, 4.0, 0.03, a);
    const MarekOutcome ob = marek_gate(psi, 4.0, 0.03, b);
    EXPECT_EQ(oa.q, ob.q);
    EXPECT_EQ(oa.feed_forward_applied, oa.q != 0.0);
    EXPECT_NEAR(oa.state.norm(), 1.0, 1e-12);
  }
}

TEST(Runtime, ClosedForms) {
  const RuntimeModels m = runtime_models(0.2, 3);
  EXPECT_DOUBLE_EQ(m.ours_per_factor, 5.0);
  EXPECT_DOUBLE_EQ(m.ours_full_gate, 45.0);
  EXPECT_NEAR(m.marek_asymptotic, 125.0, 1e-12);
  EXPECT_NEAR(m.marek_restart, 1.24 / 0.008, 1e-9);
  EXPECT_FALSE(m.gkp_applicable);
  EXPECT_THROW(runtime_models(0.0), InvalidArgument);
  EXPECT_THROW(runtime_models(0.5, 0), InvalidArgument);
}

TEST(Runtime, RestartMonteCarlo) {
  Rng rng(17);
  EXPECT_DOUBLE_EQ(marek_restart_monte_carlo(1.0, 10, rng), 3.0);
  const double mc = marek_restart_monte_carlo(0.3, 20000, rng);
  const double exact = runtime_models(0.3).marek_restart;
  EXPECT_NEAR(mc / exact, 1.0, 0.03);
}
