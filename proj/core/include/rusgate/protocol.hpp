#pragma once

// Repeat-until-success engine for one factor (1 + gamma_l x) and for the
// full gate U_N(gamma) = prod over N repetitions of U_2 U_1 U_0 (applied U_2
// first).
//
// One attempt taps the resource with a beamsplitter of transmittance T into
// a vacuum ancilla and reads the ancilla with a click/no-click detector.
// Two equivalent routes are provided:
//   * beamsplitter: literal three-mode simulation, ancilla projected on the
//     sampled photon number;
//   * kraus: the same map written on the resource alone,
//       K_m = (-sqrt(1-T))^m / sqrt(m!) T^{n/2} a^m,
//     with ancilla photon number m.
// Within the observed branch the ancilla photon number is sampled, so the
// system+resource state stays pure; branch_purity reports the purity the
// traced-out state would have had.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rusgate/cubic.hpp"
#include "rusgate/hilbert.hpp"
#include "rusgate/random.hpp"

namespace rusgate {

struct DetectorModel {
  double eta = 1.0;
  double dark_rate_hz = 0.0;
  double window_s = 1e-10;

  double nu() const { return dark_rate_hz * window_s; }
  void validate() const;

  static DetectorModel ideal() { return {1.0, 0.0, 1e-10}; }
};

struct DetectorPovm {
  FockOperator no_click;
  FockOperator click;
};

// Pi_0 = sum_m e^{-nu} (1-eta)^m |m><m|, Pi_click = I - Pi_0.
DetectorPovm detector_povm(const DetectorModel& detector, int cutoff);
// Diagonal of Pi_0.
RealVector no_click_weights(const DetectorModel& detector, int cutoff);

enum class AttemptRoute { kraus, beamsplitter };
enum class Sampling {
  // every attempt is sampled independently
  unconditioned,
  // M is drawn from its exact distribution given a click within
  // max_attempts; requires eta = 1
  heralded,
};

struct ProtocolConfig {
  double gamma = 0.03;
  int N = 1;
  double alpha1 = 0.2;
  double transmittance = 0.99;
  int system_cutoff = 30;
  int resource_cutoff = 25;
  int ancilla_cutoff = 4;
  int max_attempts = 10000;
  DetectorModel detector{};
  std::uint64_t seed = 0;
  AttemptRoute route = AttemptRoute::kraus;
  Sampling sampling = Sampling::unconditioned;

  void validate() const;
};

// (1-T) alpha1^2 (1 + |gamma_l| x_support)^2; the subtraction is weak when
// this is small.
double weak_subtraction_parameter(const ProtocolConfig& config, double x_support = 1.0);
// Human-readable warnings (weak-subtraction parameter above 0.1, ...).
std::vector<std::string> config_warnings(const ProtocolConfig& config,
                                         double x_support = 1.0);

enum class Outcome { no_click, click };

struct AttemptResult {
  FockState state;
  Outcome outcome = Outcome::no_click;
  double p_click = 0.0;
  double p_no_click = 0.0;
  int ancilla_photons = 0;
  double branch_purity = 1.0;
};

// One subtraction attempt on mode `resource_mode` of `state`.
AttemptResult subtraction_attempt(const FockState& state, int resource_mode,
                                  double transmittance, const DetectorModel& detector,
                                  Rng& rng, int ancilla_cutoff = 4);
AttemptResult subtraction_attempt_kraus(const FockState& state, int resource_mode,
                                        double transmittance,
                                        const DetectorModel& detector, Rng& rng);

// Exact click probability of the next attempt without sampling.
double click_probability(const FockState& state, int resource_mode, double transmittance,
                         const DetectorModel& detector);

// Appends a resource mode in |alpha1>, then applies exp(-i c x_S) U_2(gamma_l alpha1)
// with c = alpha1^2 Im(gamma_l). Throws CutoffTooSmall if the coupled resource
// leaks more than 1e-8 of the norm.
FockState couple_resource(const FockState& system, double alpha1, Complex gamma_l,
                          int resource_cutoff);

struct Projection {
  FockState state;
  double probability = 0.0;
};
// (I - |0><0|) on the resource; state is normalized.
Projection ideal_project(const FockState& state, int resource_mode);

struct FactorRecord {
  int repetition = 0;
  int l = 0;
  int attempts = 0;
  bool success = false;
  // outcome of the last attempt
  bool clicked = false;
  // T^{M/2}
  double attenuation = 1.0;
  double first_attempt_click_probability = 0.0;
  // probability of a click within max_attempts (heralded sampling only)
  double success_probability = std::numeric_limits<double>::quiet_NaN();
  int ancilla_photons = 0;
};

struct TrialLog {
  std::vector<FactorRecord> factors;
  long long total_attempts = 0;
  // unit cost per attempt
  double model_time() const { return static_cast<double>(total_attempts); }
  bool success() const;
};

class FactorFailure : public Error {
 public:
  FactorFailure(const std::string& what, FockState state, FactorRecord record)
      : Error(what), state_(std::move(state)), record_(record) {}
  const FockState& state() const { return state_; }
  const FactorRecord& record() const { return record_; }

 private:
  FockState state_;
  FactorRecord record_;
};

struct FactorResult {
  FockState state;
  FactorRecord record;
};

// Implements (1 + gamma_l x) on the single-mode `system` by repeat until
// success. Throws FactorFailure after max_attempts without a click.
FactorResult rus_factor(const FockState& system, Complex gamma_l,
                        const ProtocolConfig& config, Rng& rng);

struct GateResult {
  FockState state;
  TrialLog log;
};

// Thrown by full_gate when a factor fails; carries the log up to and
// including the failed factor.
class GateFailure : public Error {
 public:
  GateFailure(const std::string& what, TrialLog log) : Error(what), log_(std::move(log)) {}
  const TrialLog& log() const { return log_; }

 private:
  TrialLog log_;
};

// Throws GateFailure if any factor fails.
GateResult full_gate(const FockState& system, const ProtocolConfig& config, Rng& rng);

}  // namespace rusgate
