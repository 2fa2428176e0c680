#include "rusgate/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "rusgate/gaussian.hpp"

namespace rusgate {
namespace {

constexpr double kLeakTolerance = 1e-8;
constexpr double kPurityTolerance = 1e-6;

std::vector<Eigen::Index> strides_of(const Cutoffs& cut) {
  std::vector<Eigen::Index> s(cut.size(), 1);
  for (int m = static_cast<int>(cut.size()) - 2; m >= 0; --m) s[m] = s[m + 1] * cut[m + 1];
  return s;
}

// Unnormalized photon-number distribution of one mode.
RealVector mode_distribution(const FockState& state, int mode) {
  const Cutoffs& cut = state.cutoffs();
  const auto stride = strides_of(cut);
  RealVector w = RealVector::Zero(cut[mode]);
  const Vector& a = state.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) w((i / stride[mode]) % cut[mode]) += std::norm(a(i));
  return w;
}

// Maps level n of `mode` to n - m with weight coeff(n).
FockState lower_mode(const FockState& state, int mode, int m, const RealVector& coeff) {
  const Cutoffs& cut = state.cutoffs();
  const auto stride = strides_of(cut);
  const Vector& a = state.amplitudes();
  Vector out = Vector::Zero(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const int n = static_cast<int>((i / stride[mode]) % cut[mode]);
    if (n < m) continue;
    out(i - m * stride[mode]) = coeff(n) * a(i);
  }
  return FockState(std::move(out), cut, false);
}

double log_binomial_pmf(int n, int m, double transmittance) {
  if (m == 0) return n * std::log(transmittance);
  if (transmittance >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) +
         m * std::log1p(-transmittance) + (n - m) * std::log(transmittance);
}

// K_m |psi>, unnormalized.
FockState apply_kraus(const FockState& state, int mode, int m, double transmittance) {
  const int c = state.cutoffs()[mode];
  const double sign = (m % 2) ? -1.0 : 1.0;
  RealVector coeff = RealVector::Zero(c);
  for (int n = m; n < c; ++n) coeff(n) = sign * std::exp(0.5 * log_binomial_pmf(n, m, transmittance));
  return lower_mode(state, mode, m, coeff);
}

// Weights ||K_m psi||^2 = sum_n w_n Binomial(m; n, 1-T) for m in [0, cutoff).
RealVector kraus_weights(const RealVector& w, double transmittance) {
  const int c = static_cast<int>(w.size());
  RealVector b = RealVector::Zero(c);
  const double odds = (1.0 - transmittance) / transmittance;
  for (int n = 0; n < c; ++n) {
    if (w(n) == 0.0) continue;
    double pmf = std::exp(log_binomial_pmf(n, 0, transmittance));
    if (pmf < 1e-280 || transmittance >= 1.0) {
      for (int m = 0; m <= n; ++m) b(m) += w(n) * std::exp(log_binomial_pmf(n, m, transmittance));
      continue;
    }
    const double mean = n * (1.0 - transmittance);
    for (int m = 0; m <= n; ++m) {
      b(m) += w(n) * pmf;
      if (m > mean && pmf < 1e-300) break;
      pmf *= odds * (n - m) / (m + 1.0);
    }
  }
  return b;
}

void check_transmittance(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw InvalidArgument("transmittance must lie in (0, 1]");
}

int sample_index(const RealVector& weights, double total, Rng& rng) {
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  int last = -1;
  for (int m = 0; m < weights.size(); ++m) {
    if (weights(m) <= 0.0) continue;
    acc += weights(m);
    last = m;
    if (u < acc) return m;
  }
  return last;
}

double branch_purity(const std::vector<FockState>& branches, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double purity = 0.0;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    for (std::size_t j = 0; j < branches.size(); ++j) {
      const Complex ov = branches[i].amplitudes().dot(branches[j].amplitudes());
      purity += weights[i] * weights[j] / (total * total) * std::norm(ov);
    }
  }
  return purity;
}

struct BranchTable {
  RealVector raw;  // ||K_m psi||^2 (or ancilla projections)
  RealVector no_click;
  RealVector click;
};

BranchTable branch_table(RealVector raw, const DetectorModel& detector) {
  const RealVector q = no_click_weights(detector, static_cast<int>(raw.size()));
  BranchTable t;
  t.no_click = q.cwiseProduct(raw);
  t.click = (RealVector::Ones(raw.size()) - q).cwiseProduct(raw);
  t.raw = std::move(raw);
  return t;
}

enum class Force { none, click };

template <typename Branch>
AttemptResult finish_attempt(const BranchTable& table, Force force, Rng& rng, Branch&& branch) {
  const double p_no = table.no_click.sum();
  const double p_click = table.click.sum();
  const double total = p_no + p_click;
  if (!(total > 0.0)) throw DegenerateOutcome("attempt on a zero state");
  AttemptResult r{branch(0), Outcome::no_click, p_click / total, p_no / total, 0, 1.0};
  if (force == Force::click || uniform01(rng) < r.p_click) r.outcome = Outcome::click;
  const RealVector& weights = r.outcome == Outcome::click ? table.click : table.no_click;
  const double branch_total = weights.sum();
  if (!(branch_total > 0.0)) throw DegenerateOutcome("sampled a zero-probability detector outcome");
  r.ancilla_photons = sample_index(weights, branch_total, rng);
  r.state = branch(r.ancilla_photons).normalize();

  std::vector<FockState> kept;
  std::vector<double> w;
  for (int m = 0; m < weights.size(); ++m) {
    if (weights(m) > branch_total * 1e-16) {
      kept.push_back(m == r.ancilla_photons ? r.state : branch(m).normalize());
      w.push_back(weights(m));
    }
  }
  r.branch_purity = kept.size() <= 1 ? 1.0 : branch_purity(kept, w);
  return r;
}

AttemptResult kraus_attempt(const FockState& state, int mode, double transmittance,
                            const DetectorModel& detector, Rng& rng, Force force) {
  check_transmittance(transmittance);
  detector.validate();
  if (mode < 0 || mode >= state.modes()) throw InvalidArgument("resource mode out of range");
  const RealVector w = mode_distribution(state, mode);
  const BranchTable table = branch_table(kraus_weights(w, transmittance), detector);
  return finish_attempt(table, force, rng, [&](int m) {
    return apply_kraus(state, mode, m, transmittance);
  });
}

}  // namespace

// ---- detector -----------------------------------------------------------------------

void DetectorModel::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in [0, 1]");
  if (!(dark_rate_hz >= 0.0) || !std::isfinite(dark_rate_hz)) {
    throw InvalidArgument("dark_rate_hz must be >= 0");
  }
  if (!(window_s > 0.0) || !std::isfinite(window_s)) throw InvalidArgument("window_s must be > 0");
}

RealVector no_click_weights(const DetectorModel& detector, int cutoff) {
  detector.validate();
  RealVector q(cutoff);
  const double base = std::exp(-detector.nu());
  for (int m = 0; m < cutoff; ++m) q(m) = base * std::pow(1.0 - detector.eta, m);
  return q;
}

DetectorPovm detector_povm(const DetectorModel& detector, int cutoff) {
  checked_dimension({cutoff});
  const RealVector q = no_click_weights(detector, cutoff);
  Matrix pi0 = Matrix::Zero(cutoff, cutoff);
  Matrix pi1 = Matrix::Zero(cutoff, cutoff);
  for (int m = 0; m < cutoff; ++m) {
    pi0(m, m) = q(m);
    pi1(m, m) = 1.0 - q(m);
  }
  return {FockOperator(std::move(pi0), {cutoff}, true), FockOperator(std::move(pi1), {cutoff}, true)};
}

// ---- configuration --------------------------------------------------------------------

void ProtocolConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (!(alpha1 > 0.0) || !std::isfinite(alpha1)) throw InvalidArgument("alpha1 must be > 0");
  if (!(transmittance > 0.0 && transmittance < 1.0)) {
    throw InvalidArgument("transmittance must lie in (0, 1)");
  }
  if (max_attempts < 1) throw InvalidArgument("max_attempts must be at least 1");
  checked_dimension({system_cutoff, resource_cutoff, ancilla_cutoff});
  detector.validate();
  if (sampling == Sampling::heralded && detector.eta != 1.0) {
    throw InvalidArgument("heralded sampling needs eta = 1");
  }
}

double weak_subtraction_parameter(const ProtocolConfig& config, double x_support) {
  const double g = config.gamma > 0.0 ? std::cbrt(config.gamma / config.N) : 0.0;
  const double s = 1.0 + g * x_support;
  return (1.0 - config.transmittance) * config.alpha1 * config.alpha1 * s * s;
}

std::vector<std::string> config_warnings(const ProtocolConfig& config, double x_support) {
  std::vector<std::string> out;
  const double w = weak_subtraction_parameter(config, x_support);
  if (w > 0.1) {
    std::ostringstream os;
    os << "weak-subtraction parameter (1-T) alpha1^2 (1+|gamma_l| x)^2 = " << w
       << " exceeds 0.1";
    out.push_back(os.str());
  }
  return out;
}

// ---- attempts -------------------------------------------------------------------------

AttemptResult subtraction_attempt_kraus(const FockState& state, int resource_mode,
                                        double transmittance,
                                        const DetectorModel& detector, Rng& rng) {
  return kraus_attempt(state, resource_mode, transmittance, detector, rng, Force::none);
}

AttemptResult subtraction_attempt(const FockState& state, int resource_mode,
                                  double transmittance, const DetectorModel& detector,
                                  Rng& rng, int ancilla_cutoff) {
  check_transmittance(transmittance);
  detector.validate();
  if (resource_mode < 0 || resource_mode >= state.modes()) {
    throw InvalidArgument("resource mode out of range");
  }
  const int ancilla = state.modes();
  const FockState widened = append_vacuum_mode(state, ancilla_cutoff);
  const FockOperator bs = beamsplitter_gate(
      transmittance, {state.cutoffs()[resource_mode], ancilla_cutoff}, {0, 1});
  const std::array<int, 2> pair{resource_mode, ancilla};
  const FockState mixed = apply(bs, widened, pair);

  const std::array<int, 1> anc{ancilla};
  auto branch = [&](int m) {
    const std::array<int, 1> level{m};
    return project_modes(mixed, anc, level);
  };
  RealVector raw(ancilla_cutoff);
  for (int m = 0; m < ancilla_cutoff; ++m) raw(m) = branch(m).norm() * branch(m).norm();
  return finish_attempt(branch_table(std::move(raw), detector), Force::none, rng, branch);
}

double click_probability(const FockState& state, int resource_mode, double transmittance,
                         const DetectorModel& detector) {
  check_transmittance(transmittance);
  const BranchTable t =
      branch_table(kraus_weights(mode_distribution(state, resource_mode), transmittance), detector);
  return t.click.sum() / (t.click.sum() + t.no_click.sum());
}

// ---- coupling and projection -------------------------------------------------------------

FockState couple_resource(const FockState& system, double alpha1, Complex gamma_l,
                          int resource_cutoff) {
  if (system.modes() != 1) throw InvalidArgument("couple_resource expects a single-mode system");
  checked_dimension({system.cutoffs()[0], resource_cutoff});
  const Complex beta = gamma_l * alpha1;
  const double c = qnd_phase_compensation(beta, alpha1);
  // Per eigenvalue x_j of the truncated x_S the resource goes to
  // D(beta x_j)|alpha1> = e^{i x_j Im(beta alpha1^*)} |alpha1 + beta x_j>,
  // and the compensation exp(-i c x_S) removes that phase. Coherent
  // amplitudes are written out directly (unnormalized, so truncation shows up
  // as lost norm).
  const int cs = system.cutoffs()[0];
  const QuadratureSpectrum spec = position_spectrum(cs);
  const Vector in_x = spec.vectors.transpose().cast<Complex>() * system.normalize().amplitudes();
  Matrix joint(resource_cutoff, cs);  // column j: resource state for x_j
  for (int j = 0; j < cs; ++j) {
    const double x = spec.values(j);
    const Complex z = Complex(alpha1) + beta * x;
    const double phase = x * (beta * alpha1).imag() - c * x;
    Complex amp = std::polar(std::exp(-0.5 * std::norm(z)), phase) * in_x(j);
    for (int n = 0; n < resource_cutoff; ++n) {
      joint(n, j) = amp;
      amp *= z / std::sqrt(double(n + 1));
    }
  }
  // Back to Fock basis on the system; flat index is s * resource_cutoff + n.
  const Matrix fock = joint * spec.vectors.transpose().cast<Complex>();
  Vector amps(static_cast<Eigen::Index>(cs) * resource_cutoff);
  for (int s = 0; s < cs; ++s) amps.segment(static_cast<Eigen::Index>(s) * resource_cutoff, resource_cutoff) = fock.col(s);
  FockState out(std::move(amps), {cs, resource_cutoff}, false);
  const double leak = 1.0 - out.norm() * out.norm();
  if (leak > kLeakTolerance) {
    throw CutoffTooSmall("coupled resource leaks " + show(leak) +
                         " of the norm at resource cutoff " + std::to_string(resource_cutoff));
  }
  return out.normalize();
}

Projection ideal_project(const FockState& state, int resource_mode) {
  if (resource_mode < 0 || resource_mode >= state.modes()) {
    throw InvalidArgument("resource mode out of range");
  }
  const auto stride = strides_of(state.cutoffs());
  const int c = state.cutoffs()[resource_mode];
  Vector a = state.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if ((i / stride[resource_mode]) % c == 0) a(i) = 0.0;
  }
  const double total = state.norm() * state.norm();
  const double p = a.squaredNorm() / total;
  if (!(p > 0.0)) throw DegenerateOutcome("resource has no weight outside vacuum");
  return {FockState(std::move(a), state.cutoffs(), false).normalize(), p};
}

// ---- repeat until success -------------------------------------------------------------------

bool TrialLog::success() const {
  return std::all_of(factors.begin(), factors.end(), [](const FactorRecord& r) { return r.success; });
}

FactorResult rus_factor(const FockState& system, Complex gamma_l, const ProtocolConfig& config,
                        Rng& rng) {
  config.validate();
  const double T = config.transmittance;
  const DetectorModel& det = config.detector;
  FactorRecord rec;
  if (gamma_l == Complex{}) {
    rec.success = true;
    return {system.normalize(), rec};
  }

  FockState joint = couple_resource(system, config.alpha1, gamma_l, config.resource_cutoff);
  rec.first_attempt_click_probability = click_probability(joint, 1, T, det);

  if (config.sampling == Sampling::heralded) {
    const RealVector w = mode_distribution(joint, 1);
    const double total = w.sum();
    auto survival = [&](long long k) {
      double s = 0.0;
      for (int n = 0; n < w.size(); ++n) s += w(n) * std::pow(T, double(k) * n);
      return std::exp(-double(k) * det.nu()) * s / total;
    };
    rec.success_probability = 1.0 - survival(config.max_attempts);
    if (!(rec.success_probability > 0.0)) {
      rec.attempts = config.max_attempts;
      throw FactorFailure("no click possible within max_attempts", joint, rec);
    }
    const double u = uniform01(rng) * rec.success_probability;
    int M = config.max_attempts;
    for (int k = 1; k <= config.max_attempts; ++k) {
      if (1.0 - survival(k) >= u) {
        M = k;
        break;
      }
    }
    if (M > 1) {
      const double f = std::exp(-0.5 * (M - 1) * det.nu());
      RealVector coeff(config.resource_cutoff);
      for (int n = 0; n < coeff.size(); ++n) coeff(n) = f * std::pow(T, 0.5 * (M - 1) * n);
      joint = lower_mode(joint, 1, 0, coeff).normalize();
    }
    const AttemptResult last = kraus_attempt(joint, 1, T, det, rng, Force::click);
    joint = last.state;
    rec.attempts = M;
    rec.ancilla_photons = last.ancilla_photons;
    rec.clicked = true;
  } else {
    bool clicked = false;
    for (int k = 1; k <= config.max_attempts; ++k) {
      AttemptResult a = config.route == AttemptRoute::kraus
                            ? subtraction_attempt_kraus(joint, 1, T, det, rng)
                            : subtraction_attempt(joint, 1, T, det, rng, config.ancilla_cutoff);
      joint = std::move(a.state);
      rec.attempts = k;
      if (a.outcome == Outcome::click) {
        clicked = true;
        rec.ancilla_photons = a.ancilla_photons;
        break;
      }
    }
    rec.clicked = clicked;
    if (!clicked) {
      rec.attenuation = std::pow(T, 0.5 * rec.attempts);
      throw FactorFailure("no click after " + std::to_string(rec.attempts) + " attempts", joint,
                          rec);
    }
  }

  rec.attenuation = std::pow(T, 0.5 * rec.attempts);
  rec.success = true;
  const double amp = rec.attenuation * config.alpha1;
  const Complex beta = -amp * gamma_l;
  joint = apply_qnd(joint, beta, 0, 1, qnd_phase_compensation(beta, amp));

  const std::array<int, 1> keep{0};
  const DensityMatrix rho = partial_trace(joint, keep);
  const double purity = rho.purity() / (rho.trace() * rho.trace());
  if (purity < 1.0 - kPurityTolerance) {
    throw NumericalDegradation("system not pure after decoupling (purity " +
                               show(purity) + ")");
  }
  return {rho.dominant_state(), rec};
}

GateResult full_gate(const FockState& system, const ProtocolConfig& config, Rng& rng) {
  config.validate();
  GateResult out{system.normalize(), {}};
  if (config.gamma == 0.0) return out;
  const CubicDecomposition d = gamma_factors(config.gamma, config.N);
  for (int k = 0; k < config.N; ++k) {
    for (int l = 2; l >= 0; --l) {
      FactorResult f = [&] {
        try {
          return rus_factor(out.state, d.gamma_l[l], config, rng);
        } catch (const FactorFailure& e) {
          FactorRecord rec = e.record();
          rec.repetition = k;
          rec.l = l;
          out.log.total_attempts += rec.attempts;
          out.log.factors.push_back(rec);
          throw GateFailure(e.what(), out.log);
        }
      }();
      f.record.repetition = k;
      f.record.l = l;
      out.log.total_attempts += f.record.attempts;
      out.log.factors.push_back(f.record);
      out.state = std::move(f.state);
    }
  }
  return out;
}

}  // namespace rusgate
