#pragma once

// Comparison schemes for the cubic phase gate:
//   * the cubic phase state obtained by photon counting on one half of a
//     displaced two-mode squeezed state (analytic WKB phase function only);
//   * the squeezed resource (1 + i gamma x^3) S(r)|0> consumed by a QND
//     coupling, homodyne detection and a Gaussian feed-forward;
//   * running-time models.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rusgate/hilbert.hpp"
#include "rusgate/random.hpp"

namespace rusgate {

// ---- photon-counting cubic phase state --------------------------------------------------

struct GkpStateSpec {
  int n = 0;            // detected photon number
  double alpha = 20.0;  // displacement
  std::vector<double> domain;
};

struct GkpPhaseRecord {
  double energy = 0.0;        // n + 1/2
  double cubic_coeff = 0.0;   // 1 / (6 sqrt(2E))
  double linear_coeff = 0.0;  // -(sqrt(2E) - alpha)
  std::vector<double> phase;  // cubic_coeff x^3 + linear_coeff x on the domain
  bool small_alpha = false;   // alpha < 10: outside the large-alpha regime
};

GkpPhaseRecord gkp_cubic_state(const GkpStateSpec& spec);

struct GkpLikelihood {
  bool inside = false;
  double lower = 0.0;
  double upper = 0.0;
};

// Likely range of n + 1/2: (alpha -+ 1/sigma_x)^2 / 2 + 1 / (2 sigma_p^2).
GkpLikelihood gkp_mode_likelihood(int n, double alpha, double sigma_x, double sigma_p);

// ---- squeezed resource with homodyne feed-forward -----------------------------------------

struct MarekResource {
  double r_width = 1.0;
  double gamma = 0.0;
  // effective strength in the squeezed frame, gamma r^{3/2}
  double gamma_prime = 0.0;
  FockState lab_state;
  // S(r)^dag applied to lab_state, first min(cutoff, 6) coefficients
  Vector squeezed_frame;
};

// normalize((I + i gamma x^3) S(r)|0>) on one mode.
MarekResource marek_resource_state(double r_width, double gamma, int cutoff);

// The same resource written directly in the squeezed frame:
// normalize((I + i gamma r^{3/2} x^3)|0>).
FockState marek_resource_squeezed_frame(double r_width, double gamma, int cutoff);

struct MarekOutcome {
  FockState state;
  double q = 0.0;  // homodyne outcome on x_R
  double probability = 0.0;
  bool feed_forward_applied = false;
};

// U_FF(q) = exp[-i gamma q^3 - 3 i gamma (x + q) x q] as a function of x.
FockOperator marek_feed_forward(double gamma, double q, int cutoff);

// Couples the system to the resource with exp(i x_S p_R), measures x_R and
// applies U_FF(q). The resource is simulated in its squeezed frame so that
// large r fits a modest resource cutoff; the odd resource cutoff used
// internally keeps q = 0 among the outcomes. With forced_q the outcome is the
// eigenvalue nearest to it instead of a sample.
MarekOutcome marek_gate(const FockState& input, double r_width, double gamma, Rng& rng,
                        int resource_cutoff = 41, std::optional<double> forced_q = {});

// ---- running-time models ------------------------------------------------------------------

struct RuntimeModels {
  double p = 0.0;
  double ours_per_factor = 0.0;  // 1/p
  double ours_full_gate = 0.0;   // 3N/p
  double marek_asymptotic = 0.0; // 1/p^3
  double marek_restart = 0.0;    // (1 + p + p^2) / p^3
  bool gkp_applicable = false;
};

RuntimeModels runtime_models(double p, int N = 1);

// Mean number of trials until three consecutive successes, restarting on
// every failure.
double marek_restart_monte_carlo(double p, int runs, Rng& rng);

}  // namespace rusgate
