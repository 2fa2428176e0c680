#include <array>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "rusgate/gaussian.hpp"
#include "rusgate/protocol.hpp"
#include "support/oracles.hpp"

using namespace rusgate;

namespace {

// sum_j |psi_j|^2-weighted joint state sum_j psi_j |x_j> |alpha1 + beta x_j>.
Vector coupled_oracle(const FockState& sys, double alpha1, Complex gamma_l, int cr) {
  const int cs = sys.cutoffs()[0];
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::position(cs));
  const Vector proj = es.eigenvectors().adjoint() * sys.amplitudes();
  Vector out = Vector::Zero(cs * cr);
  for (int j = 0; j < cs; ++j) {
    const Complex z = alpha1 + gamma_l * alpha1 * es.eigenvalues()(j);
    const Vector res = oracle::coherent_series(z, cr);
    const Vector s = proj(j) * es.eigenvectors().col(j);
    for (int a = 0; a < cs; ++a) out.segment(a * cr, cr) += s(a) * res;
  }
  return out;
}

DetectorModel noisy() { return {0.9, 100.0, 1e-10}; }

}  // namespace

TEST(Detector, PovmDiagonal) {
  const DetectorModel d{0.8, 2e3, 1e-6};
  const DetectorPovm povm = detector_povm(d, 6);
  for (int m = 0; m < 6; ++m) {
    EXPECT_EQ(povm.no_click.matrix()(m, m).real(), std::exp(-d.nu()) * std::pow(1.0 - d.eta, m));
  }
  EXPECT_EQ((povm.no_click.matrix() + povm.click.matrix() - Matrix::Identity(6, 6)).norm(), 0.0);
  EXPECT_EQ(no_click_weights(DetectorModel::ideal(), 3)(0), 1.0);
  EXPECT_EQ(no_click_weights(DetectorModel::ideal(), 3)(2), 0.0);
  EXPECT_THROW((DetectorModel{1.5, 0, 1e-10}).validate(), InvalidArgument);
  EXPECT_THROW((DetectorModel{1.0, -1, 1e-10}).validate(), InvalidArgument);
}

TEST(ProtocolConfig, Validation) {
  ProtocolConfig c;
  EXPECT_NO_THROW(c.validate());
  c.transmittance = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.gamma = -0.1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.sampling = Sampling::heralded;
  c.detector = noisy();
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.system_cutoff = 1;
  EXPECT_THROW(c.validate(), InvalidDimension);
}

TEST(ProtocolConfig, WeakSubtractionWarning) {
  ProtocolConfig c;
  const double g = std::cbrt(0.03);
  EXPECT_NEAR(weak_subtraction_parameter(c, 2.0), 0.01 * 0.04 * (1 + 2 * g) * (1 + 2 * g), 1e-15);
  EXPECT_TRUE(config_warnings(c).empty());
  c.alpha1 = 8.0;
  EXPECT_EQ(config_warnings(c).size(), 1u);
}

TEST(Attempt, ClickProbabilityOfCoherentResource) {
  const Complex a(0.9, 0.4);
  const double T = 0.95;
  const FockState s = tensor(fock_state(0, 3), coherent(a, 30));
  const double ideal = -std::expm1(-(1 - T) * std::norm(a));
  EXPECT_NEAR(click_probability(s, 1, T, DetectorModel::ideal()), ideal, 1e-13);
  const DetectorModel d{0.6, 1e6, 1e-7};
  const double noisy_ref = 1.0 - std::exp(-d.nu()) * std::exp(-0.6 * (1 - T) * std::norm(a));
  EXPECT_NEAR(click_probability(s, 1, T, d), noisy_ref, 1e-13);
}

TEST(Attempt, CoherentResourceKeepsItsShape) {
  const Complex a(1.1, -0.2);
  const double T = 0.9;
  const FockState s = tensor(coherent(0.3, 10), coherent(a, 30));
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const AttemptResult r = subtraction_attempt_kraus(s, 1, T, noisy(), rng);
    // a|alpha> is proportional to |alpha>, so either outcome leaves |sqrt(T) alpha>
    const FockState ref = tensor(coherent(0.3, 10), coherent(std::sqrt(T) * a, 30));
    EXPECT_GT(fidelity(r.state, ref), 1 - 1e-12);
    EXPECT_NEAR(r.p_click + r.p_no_click, 1.0, 1e-14);
  }
}

TEST(Attempt, LiteralAndKrausRoutesAgree) {
  const auto d = gamma_factors(0.03, 1);
  const FockState joint = couple_resource(coherent(0.3, 16), 1.0, d.gamma_l[1], 25);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r1(seed), r2(seed);
    const DetectorModel det{0.7, 1e7, 1e-8};
    const AttemptResult a = subtraction_attempt(joint, 1, 0.8, det, r1, 14);
    const AttemptResult b = subtraction_attempt_kraus(joint, 1, 0.8, det, r2);
    EXPECT_EQ(a.outcome, b.outcome);
    EXPECT_EQ(a.ancilla_photons, b.ancilla_photons);
    EXPECT_NEAR(a.p_click, b.p_click, 1e-12);
    EXPECT_LT((a.state.amplitudes() - b.state.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(a.branch_purity, b.branch_purity, 1e-10);
    EXPECT_EQ(r1(), r2());
  }
}

TEST(Attempt, BranchPurityIsOneForIdealNoClick) {
  const FockState joint = couple_resource(coherent(0.3, 12), 0.5, gamma_factors(0.03, 1).gamma_l[0], 20);
  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    const AttemptResult r = subtraction_attempt_kraus(joint, 1, 0.99, DetectorModel::ideal(), rng);
    if (r.outcome == Outcome::no_click) {
      EXPECT_EQ(r.ancilla_photons, 0);
      EXPECT_EQ(r.branch_purity, 1.0);
    }
  }
}

TEST(Coupling, MatchesOracle) {
  const auto d = gamma_factors(0.05, 1);
  const FockState sys = coherent(Complex(0.3, 0.1), 20);
  for (int l = 0; l < 3; ++l) {
    const FockState j = couple_resource(sys, 1.5, d.gamma_l[l], 40);
    const Vector ref = coupled_oracle(sys, 1.5, d.gamma_l[l], 40);
    EXPECT_LT((j.amplitudes() - ref / ref.norm()).cwiseAbs().maxCoeff(), 1e-12) << l;
  }
  EXPECT_THROW(couple_resource(sys, 4.0, d.gamma_l[0], 12), CutoffTooSmall);
}

TEST(Coupling, IdealProjectionGivesFactor) {
  const auto d = gamma_factors(0.03, 1);
  const int cs = 30;
  const FockState psi = coherent(0.3, cs);
  const double alpha1 = 0.05;
  for (int l = 0; l < 3; ++l) {
    const FockState j = couple_resource(psi, alpha1, d.gamma_l[l], 20);
    const Projection p = ideal_project(j, 1);
    // resource-vacuum weight: sum_j |psi_j|^2 exp(-|alpha1 (1 + g x_j)|^2)
    Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::position(cs));
    const Vector w = es.eigenvectors().adjoint() * psi.amplitudes();
    double vac = 0.0;
    for (int k = 0; k < cs; ++k) {
      vac += std::norm(w(k)) * std::exp(-std::norm(alpha1 * (1.0 + d.gamma_l[l] * es.eigenvalues()(k))));
    }
    EXPECT_NEAR(p.probability, 1 - vac, 1e-12);
  }
}

TEST(RusFactor, HeraldedIdealDetectorAppliesFactor) {
  ProtocolConfig c;
  c.sampling = Sampling::heralded;
  const auto d = gamma_factors(c.gamma, 1);
  const FockState psi = coherent(0.3, c.system_cutoff);
  for (int l = 0; l < 3; ++l) {
    Rng rng(10 + l);
    const FactorResult f = rus_factor(psi, d.gamma_l[l], c, rng);
    const Vector target =
        (Matrix::Identity(c.system_cutoff, c.system_cutoff) + d.gamma_l[l] * oracle::position(c.system_cutoff)) *
        psi.amplitudes();
    EXPECT_GT(oracle::overlap2(f.state.amplitudes(), target), 0.99);
    EXPECT_TRUE(f.record.success);
    EXPECT_TRUE(f.record.clicked);
    EXPECT_GE(f.record.attempts, 1);
    EXPECT_NEAR(f.record.attenuation, std::pow(c.transmittance, 0.5 * f.record.attempts), 1e-15);
    EXPECT_GT(f.record.success_probability, 0.0);
    EXPECT_LT(f.record.success_probability, 1.0);
  }
}

TEST(RusFactor, HeraldedSuccessProbabilityMatchesSurvival) {
  ProtocolConfig c;
  c.sampling = Sampling::heralded;
  c.max_attempts = 50;
  c.system_cutoff = 20;
  const auto d = gamma_factors(c.gamma, 1);
  const FockState psi = coherent(0.3, c.system_cutoff);
  Rng rng(3);
  const FactorResult f = rus_factor(psi, d.gamma_l[0], c, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::position(c.system_cutoff));
  const Vector w = es.eigenvectors().adjoint() * psi.amplitudes();
  const double shrink = 1.0 - std::pow(c.transmittance, c.max_attempts);
  double survive = 0.0;
  for (int k = 0; k < c.system_cutoff; ++k) {
    const double z2 = std::norm(c.alpha1 * (1.0 + d.gamma_l[0] * es.eigenvalues()(k)));
    survive += std::norm(w(k)) * std::exp(-z2 * shrink);
  }
  EXPECT_NEAR(f.record.success_probability, 1 - survive, 1e-12);
  EXPECT_LE(f.record.attempts, c.max_attempts);
}

TEST(RusFactor, DarkCountsOnlyGiveGeometricAttempts) {
  // eta = 0: only dark counts click, so every attempt succeeds with 1 - e^{-nu}
  ProtocolConfig c;
  c.system_cutoff = 8;
  c.resource_cutoff = 12;
  c.alpha1 = 0.3;
  c.detector = {0.0, 2e9, 1e-10};
  const double p = -std::expm1(-c.detector.nu());
  const auto d = gamma_factors(c.gamma, 1);
  const FockState psi = coherent(0.2, c.system_cutoff);
  Rng rng(2024);
  const int bins = 8, samples = 3000;
  std::vector<int> counts(bins + 1, 0);
  for (int i = 0; i < samples; ++i) {
    const int m = rus_factor(psi, d.gamma_l[0], c, rng).record.attempts;
    counts[std::min(m, bins + 1) - 1]++;
  }
  double chi2 = 0.0;
  for (int k = 0; k <= bins; ++k) {
    const double prob = k < bins ? p * std::pow(1 - p, k) : std::pow(1 - p, bins);
    const double expected = samples * prob;
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  const boost::math::chi_squared dist(bins);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 1e-3) << chi2;
}

TEST(RusFactor, FailureAfterMaxAttempts) {
  ProtocolConfig c;
  c.system_cutoff = 8;
  c.resource_cutoff = 12;
  c.alpha1 = 0.01;
  c.max_attempts = 3;
  Rng rng(1);
  try {
    rus_factor(coherent(0.1, 8), gamma_factors(0.03, 1).gamma_l[0], c, rng);
    FAIL() << "expected FactorFailure";
  } catch (const FactorFailure& e) {
    EXPECT_EQ(e.record().attempts, 3);
    EXPECT_FALSE(e.record().success);
    EXPECT_EQ(e.state().modes(), 2);
  }
}

TEST(FullGate, ZeroGammaIsIdentity) {
  ProtocolConfig c;
  c.gamma = 0.0;
  Rng rng(0);
  const FockState psi = coherent(0.3, c.system_cutoff);
  const GateResult g = full_gate(psi, c, rng);
  EXPECT_TRUE(g.log.factors.empty());
  EXPECT_EQ(g.log.total_attempts, 0);
  EXPECT_GT(fidelity(g.state, psi), 1 - 1e-15);
}

TEST(FullGate, LogsThreeFactorsPerRepetition) {
  ProtocolConfig c;
  c.N = 2;
  c.sampling = Sampling::heralded;
  c.system_cutoff = 20;
  Rng rng(7);
  const GateResult g = full_gate(coherent(0.3, 20), c, rng);
  ASSERT_EQ(g.log.factors.size(), 6u);
  long long total = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(g.log.factors[i].repetition, static_cast<int>(i / 3));
    EXPECT_EQ(g.log.factors[i].l, 2 - static_cast<int>(i % 3));
    total += g.log.factors[i].attempts;
  }
  EXPECT_EQ(g.log.total_attempts, total);
  EXPECT_TRUE(g.log.success());
  EXPECT_DOUBLE_EQ(g.log.model_time(), double(total));

  const Vector target = u_n_operator(0.03, 2, 20).matrix() * coherent(0.3, 20).amplitudes();
  EXPECT_GT(oracle::overlap2(g.state.amplitudes(), target), 0.98);
}

TEST(FullGate, FailureCarriesPartialLog) {
  ProtocolConfig c;
  c.system_cutoff = 8;
  c.resource_cutoff = 12;
  c.alpha1 = 0.01;
  c.max_attempts = 2;
  Rng rng(1);
  try {
    full_gate(coherent(0.1, 8), c, rng);
    FAIL() << "expected GateFailure";
  } catch (const GateFailure& e) {
    ASSERT_FALSE(e.log().factors.empty());
    const FactorRecord& last = e.log().factors.back();
    EXPECT_FALSE(last.success);
    EXPECT_EQ(last.l, 3 - static_cast<int>(e.log().factors.size()));
    EXPECT_FALSE(e.log().success());
  }
}

TEST(FullGate, SameSeedSameResult) {
  ProtocolConfig c;
  c.system_cutoff = 16;
  c.alpha1 = 2.0;
  c.resource_cutoff = 40;
  c.detector = noisy();
  Rng a(99), b(99);
  const GateResult ga = full_gate(coherent(0.2, 16), c, a);
  const GateResult gb = full_gate(coherent(0.2, 16), c, b);
  EXPECT_EQ(ga.log.total_attempts, gb.log.total_attempts);
  EXPECT_EQ((ga.state.amplitudes() - gb.state.amplitudes()).norm(), 0.0);
}

TEST(NoClick, SystemStateUnchangedByFailedAttempt) {
  const auto d = gamma_factors(0.03, 1);
  const FockState joint = couple_resource(coherent(0.3, 30), 0.2, d.gamma_l[2], 25);
  const std::array<int, 1> keep{0};
  const DensityMatrix before = partial_trace(joint, keep);
  Rng rng(11);
  AttemptResult r = subtraction_attempt_kraus(joint, 1, 0.99, DetectorModel::ideal(), rng);
  while (r.outcome != Outcome::no_click) r = subtraction_attempt_kraus(joint, 1, 0.99, DetectorModel::ideal(), rng);
  const DensityMatrix after = partial_trace(r.state, keep);
  EXPECT_GT(fidelity(before, after), 1 - 1e-6);
}
