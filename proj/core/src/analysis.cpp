#include "rusgate/analysis.hpp"

#include <array>
#include <cmath>

#include "rusgate/parallel.hpp"

namespace rusgate {

// ---- error operator ensemble ----------------------------------------------------

void ErrorEnsembleSpec::validate() const {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
  if (N < 1) throw InvalidArgument("N must be at least 1");
  detector.validate();
  if (!(alpha1 > 0.0)) throw InvalidArgument("alpha1 must be > 0");
  if (!(transmittance > 0.0 && transmittance < 1.0)) {
    throw InvalidArgument("transmittance must lie in (0, 1)");
  }
  if (samples < 1) throw InvalidArgument("samples must be at least 1");
  for (double x : x_grid) {
    if (!std::isfinite(x)) throw InvalidArgument("x grid must be finite");
  }
}

FactorEventProbabilities factor_event_probabilities(const ErrorEnsembleSpec& spec,
                                                    Complex gamma_l, double x) {
  const DetectorModel& d = spec.detector;
  const double z2 = spec.alpha1 * spec.alpha1 * std::norm(1.0 + gamma_l * x);
  const double p_click =
      -std::expm1(-d.nu() - d.eta * (1.0 - spec.transmittance) * z2);
  FactorEventProbabilities p;
  p.dark = p_click > 0.0 ? -std::expm1(-d.nu() / p_click) : 0.0;
  p.missed = 1.0 - d.eta;
  p.correct = 1.0 - p.dark - p.missed;
  if (p.correct < 0.0) {
    // Overwhelming dark counts: scale the two error channels to fit.
    const double s = p.dark + p.missed;
    p.dark /= s;
    p.missed /= s;
    p.correct = 0.0;
  }
  return p;
}

std::vector<ErrorStatsRow> error_operator_stats(const ErrorEnsembleSpec& spec) {
  spec.validate();
  const CubicDecomposition d = gamma_factors(spec.gamma, spec.N);
  const int factors = 3 * spec.N;
  const bool exact = factors <= spec.max_exact_factors;
  std::vector<ErrorStatsRow> rows;
  rows.reserve(spec.x_grid.size());
  Rng rng(derive_seed(spec.seed, 0));

  for (double x : spec.x_grid) {
    // Event values and probabilities per factor, in application order.
    std::vector<std::array<Complex, 3>> value(factors);
    std::vector<std::array<double, 3>> prob(factors);
    for (int f = 0; f < factors; ++f) {
      const Complex g = d.gamma_l[2 - f % 3];
      const FactorEventProbabilities p = factor_event_probabilities(spec, g, x);
      const Complex u = 1.0 + g * x;
      value[f] = {u, Complex(1.0), u * u};
      prob[f] = {p.correct, p.dark, p.missed};
    }
    const Complex ideal = std::polar(1.0, spec.gamma * x * x * x);
    ErrorStatsRow row;
    row.x = x;
    row.exact = exact;
    Complex mean{};
    double second = 0.0;
    if (exact) {
      // Walk all 3^factors event strings as a base-3 counter.
      std::vector<int> digit(factors, 0);
      for (;;) {
        double p = 1.0;
        Complex a = 1.0;
        for (int f = 0; f < factors; ++f) {
          p *= prob[f][digit[f]];
          a *= value[f][digit[f]];
        }
        a -= ideal;
        mean += p * a;
        second += p * std::norm(a);
        int f = 0;
        while (f < factors && ++digit[f] == 3) digit[f++] = 0;
        if (f == factors) break;
      }
    } else {
      for (int s = 0; s < spec.samples; ++s) {
        Complex a = 1.0;
        for (int f = 0; f < factors; ++f) {
          const double u = uniform01(rng);
          const int e = u < prob[f][0] ? 0 : (u < prob[f][0] + prob[f][1] ? 1 : 2);
          a *= value[f][e];
        }
        a -= ideal;
        mean += a;
        second += std::norm(a);
      }
      mean /= double(spec.samples);
      second /= double(spec.samples);
    }
    row.mean = mean;
    row.stddev = std::sqrt(std::max(0.0, second - std::norm(mean)));
    if (!exact) row.standard_error = row.stddev / std::sqrt(double(spec.samples));
    rows.push_back(row);
  }
  return rows;
}

// ---- momentum variance sweep -----------------------------------------------------------

void MomentSweepSpec::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
  if (N_list.empty()) throw InvalidArgument("N list must not be empty");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 1) throw InvalidArgument("every N must be at least 1");
    if (i > 0 && N_list[i] <= N_list[i - 1]) throw InvalidArgument("N list must be ascending");
  }
  checked_dimension({cutoff});
}

double momentum_variance(const FockState& state) {
  const int c = state.cutoffs().at(0);
  const Matrix p = quadrature_p(c).matrix();
  const double m = expectation(p, state).real();
  return expectation(Matrix(p * p), state).real() - m * m;
}

namespace {

Matrix power_of_step(double gamma, int N, const Matrix& x3) {
  const Matrix step = identity_matrix(x3.rows()) + Complex(0.0, gamma / N) * x3;
  Matrix out = identity_matrix(x3.rows());
  for (int k = 0; k < N; ++k) out = step * out;
  return out;
}

}  // namespace

std::vector<MomentRow> variance_sweep(const MomentSweepSpec& spec) {
  spec.validate();
  const int c = spec.cutoff;
  const Matrix x = quadrature_x(c).matrix();
  const Matrix p = quadrature_p(c).matrix();
  const Matrix x3 = x * x * x;
  const Matrix ideal = ideal_cubic_gate(spec.gamma, c).matrix();
  std::vector<Matrix> approx;
  for (int n : spec.N_list) approx.push_back(power_of_step(spec.gamma, n, x3));

  std::vector<MomentRow> rows;
  for (double re : spec.re_alpha) {
    const FockState in = coherent(Complex(re, spec.im_alpha), c);
    MomentRow row;
    row.re_alpha = re;
    const FockState out = FockState(ideal * in.amplitudes(), {c}).normalize();
    row.ideal_variance = momentum_variance(out);
    row.ideal_mean_x = expectation(x, out).real();
    row.ideal_mean_p = expectation(p, out).real();
    for (const Matrix& u : approx) {
      const FockState o = FockState(u * in.amplitudes(), {c}).normalize();
      row.variance.push_back(momentum_variance(o));
      row.mean_x.push_back(expectation(x, o).real());
      row.mean_p.push_back(expectation(p, o).real());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- gate fidelity -----------------------------------------------------------------------

std::vector<FockState> default_inputs(int cutoff) {
  std::vector<FockState> out;
  for (double re : {0.0, 0.3, 0.6}) {
    for (double im : {0.0, 0.25}) out.push_back(coherent(Complex(re, im), cutoff));
  }
  return out;
}

FidelityReport gate_fidelity_report(const ProtocolConfig& config, int ensemble_size,
                                    const std::vector<FockState>& inputs_in) {
  config.validate();
  if (ensemble_size < 1) throw InvalidArgument("ensemble size must be at least 1");
  const int c = config.system_cutoff;
  const std::vector<FockState> inputs = inputs_in.empty() ? default_inputs(c) : inputs_in;
  for (const FockState& s : inputs) {
    if (s.cutoffs() != Cutoffs{c}) throw DimensionMismatch("input cutoff differs from system cutoff");
  }
  const Matrix target_op =
      config.gamma > 0.0 ? u_n_operator(config.gamma, config.N, c).matrix() : identity_matrix(c);
  const Matrix ideal_op = ideal_cubic_gate(config.gamma, c).matrix();

  FidelityReport report;
  report.runs = parallel_map(static_cast<std::size_t>(ensemble_size), [&](std::size_t i) {
    RunRecord r;
    r.run = static_cast<int>(i);
    r.seed = derive_seed(config.seed, i);
    Rng rng(r.seed);
    const FockState& in = inputs[i % inputs.size()];
    try {
      GateResult g = full_gate(in, config, rng);
      const FockState target = FockState(target_op * in.normalize().amplitudes(), {c}).normalize();
      const FockState ideal = FockState(ideal_op * in.normalize().amplitudes(), {c}).normalize();
      r.success = true;
      r.fidelity_target = fidelity(g.state, target);
      r.fidelity_ideal = fidelity(g.state, ideal);
      r.log = std::move(g.log);
    } catch (const GateFailure& f) {
      r.success = false;
      r.log = f.log();
    }
    for (const FactorRecord& f : r.log.factors) {
      r.total_attempts += f.attempts;
      if (f.first_attempt_click_probability > 0.0) {
        r.expected_attempts += 1.0 / f.first_attempt_click_probability;
      }
    }
    r.log.total_attempts = r.total_attempts;
    return r;
  });

  double mp = 0.0;
  long long factors = 0;
  for (const RunRecord& r : report.runs) {
    report.mean_total_attempts += double(r.total_attempts);
    report.mean_expected_attempts += r.expected_attempts;
    for (const FactorRecord& f : r.log.factors) {
      mp += f.attempts * f.first_attempt_click_probability;
      ++factors;
    }
    if (!r.success) continue;
    ++report.successes;
    report.mean_fidelity_target += r.fidelity_target;
    report.mean_fidelity_ideal += r.fidelity_ideal;
  }
  const double n = double(report.runs.size());
  report.mean_total_attempts /= n;
  report.mean_expected_attempts /= n;
  if (factors > 0) report.attempts_times_p = mp / double(factors);
  if (report.successes > 0) {
    report.mean_fidelity_target /= report.successes;
    report.mean_fidelity_ideal /= report.successes;
  }
  return report;
}

}  // namespace rusgate
