#pragma once

// Ensemble-level analyses: the detector-error operator A(x) = U_N - e^{i g x^3}
// evaluated as a random scalar per position x, the momentum-variance sweep
// over coherent inputs, and gate-fidelity reports over protocol runs.

#include <cstdint>
#include <vector>

#include "rusgate/protocol.hpp"

namespace rusgate {

// ---- error operator ensemble ---------------------------------------------------

struct ErrorEnsembleSpec {
  double gamma = 0.03;
  int N = 1;
  DetectorModel detector{0.9, 100.0, 1e-10};
  // The per-attempt click probability that sets E[M] depends on the
  // resource and beamsplitter.
  double alpha1 = 0.2;
  double transmittance = 0.99;
  std::vector<double> x_grid;
  // Exact enumeration over 3^{3N} events up to this many factors; beyond it
  // Monte Carlo with `samples` draws.
  int max_exact_factors = 12;
  int samples = 20000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Outcome of one factor under detector errors.
struct FactorEventProbabilities {
  double correct = 0.0;  // applies (1 + gamma_l x)
  double dark = 0.0;     // false positive, applies 1
  double missed = 0.0;   // missed click, applies (1 + gamma_l x)^2
};

// p_dark = 1 - exp(-nu E[M]), E[M] = 1/p_click(x),
// p_click(x) = 1 - e^{-nu} exp(-eta (1-T) alpha1^2 |1 + gamma_l x|^2),
// p_miss = 1 - eta, p_correct = 1 - p_dark - p_miss.
FactorEventProbabilities factor_event_probabilities(const ErrorEnsembleSpec& spec,
                                                    Complex gamma_l, double x);

struct ErrorStatsRow {
  double x = 0.0;
  Complex mean;
  double stddev = 0.0;
  // standard error of the mean; 0 for exact enumeration
  double standard_error = 0.0;
  bool exact = true;
};

std::vector<ErrorStatsRow> error_operator_stats(const ErrorEnsembleSpec& spec);

// ---- momentum variance sweep ------------------------------------------------------

struct MomentSweepSpec {
  double gamma = 0.03;
  std::vector<int> N_list{1, 3, 5, 7};
  double im_alpha = 0.25;
  std::vector<double> re_alpha;
  int cutoff = 40;

  void validate() const;
};

struct MomentRow {
  double re_alpha = 0.0;
  double ideal_variance = 0.0;
  std::vector<double> variance;  // aligned with N_list
  double ideal_mean_x = 0.0, ideal_mean_p = 0.0;
  std::vector<double> mean_x, mean_p;
};

std::vector<MomentRow> variance_sweep(const MomentSweepSpec& spec);

// sigma_p^2 = <p^2> - <p>^2
double momentum_variance(const FockState& state);

// ---- gate fidelity ------------------------------------------------------------------

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  bool success = false;
  long long total_attempts = 0;
  // sum over factors of 1 / (first-attempt click probability)
  double expected_attempts = 0.0;
  double fidelity_target = 0.0;  // to normalized U_N(gamma)|psi>
  double fidelity_ideal = 0.0;   // to exp(i gamma x^3)|psi>
  TrialLog log;
};

struct FidelityReport {
  std::vector<RunRecord> runs;
  int successes = 0;
  double mean_fidelity_target = 0.0;
  double mean_fidelity_ideal = 0.0;
  double mean_total_attempts = 0.0;
  double mean_expected_attempts = 0.0;
  // pooled mean of M * p_first over factor instances (1 for geometric M)
  double attempts_times_p = 0.0;
};

// Default input ensemble: coherent states on a small grid of real and
// imaginary amplitudes.
std::vector<FockState> default_inputs(int cutoff);

// Runs full_gate `ensemble_size` times; run i uses inputs[i % inputs.size()]
// and seed derive_seed(config.seed, i). Failed runs are kept in `runs` and
// excluded from the fidelity means.
FidelityReport gate_fidelity_report(const ProtocolConfig& config, int ensemble_size,
                                    const std::vector<FockState>& inputs = {});

}  // namespace rusgate
