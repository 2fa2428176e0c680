#pragma once

// Gaussian gates on truncated Fock spaces.
//
// Dense constructors (`*_gate`) exponentiate the truncated generator and
// return a FockOperator. The `apply_*` functions act on a state through the
// spectral decomposition of the truncated position operator, which is exact
// for generators of the form f(x_S) (x) G_R and avoids building
// (cutoff_S * cutoff_R)^2 matrices.
//
// Squeezing is parameterized by the Gaussian width r_width of the image of
// vacuum, S|0> ~ integral dx exp(-x^2 / 2 r_width) |x>, i.e. <x^2> = r_width/2.
// r_width = 1 is the identity; r_width > 1 widens x.

#include <functional>
#include <utility>
#include <variant>

#include "rusgate/hilbert.hpp"

namespace rusgate {

// ---- gate descriptions -------------------------------------------------------

struct Displacement {
  Complex alpha;
  int mode = 0;
};
struct Squeeze {
  double r_width = 1.0;
  int mode = 0;
};
struct Beamsplitter {
  double transmittance = 1.0;
  std::pair<int, int> modes{0, 1};
};
// exp[(beta a_R^dag - beta^* a_R) x_S]
struct Qnd {
  Complex beta;
  int system_mode = 0;
  int resource_mode = 1;
};
// exp[i s p_S x_R]
struct QndPrime {
  int system_mode = 0;
  int resource_mode = 1;
  double strength = 1.0;
};
using GateSpec = std::variant<Displacement, Squeeze, Beamsplitter, Qnd, QndPrime>;

// Validates the parameters (T in (0,1], r_width > 0, distinct modes).
void validate(const GateSpec& spec, const Cutoffs& cutoffs);

// Dense full-space operator for `spec` on a register with `cutoffs`.
FockOperator build_gate(const GateSpec& spec, const Cutoffs& cutoffs);

// ---- dense constructors --------------------------------------------------------

FockOperator displacement_gate(Complex alpha, int cutoff, double max_loss = 1e-8);

double squeeze_log_parameter(double r_width);
// Probability of the squeezed vacuum S(r)|0> on levels >= cutoff.
double squeezed_vacuum_truncation_loss(double r_width, int cutoff);
FockOperator squeeze_gate(double r_width, int cutoff, double max_loss = 1e-8);

// Maps |z>|0> to |sqrt(T) z>|-sqrt(1-T) z> for modes (first, second); the
// remaining freedom is the standard real orthogonal mixing. Built per
// photon-number block, so retained matrix elements are exact.
FockOperator beamsplitter_gate(double transmittance, const Cutoffs& cutoffs,
                               std::pair<int, int> mode_pair = {0, 1});

FockOperator qnd_gate(Complex beta, const Cutoffs& cutoffs, int system_mode = 0,
                      int resource_mode = 1);
FockOperator qnd_prime_gate(const Cutoffs& cutoffs, int system_mode = 0,
                            int resource_mode = 1, double strength = 1.0);

// exp(-i c x)
FockOperator momentum_kick_gate(double c, int cutoff);

// D(beta x)|a + ...> picks up exp(i x Im(beta a^*)); this returns
// c = Im(beta conj(a)) so that momentum_kick_gate(c) removes it.
double qnd_phase_compensation(Complex beta, Complex resource_amplitude);

// ---- exact elements and spectral application --------------------------------------

// <m|D(alpha)|n> for m, n < cutoff. Exact matrix elements of the untruncated
// operator, unaffected by the cutoff.
Matrix displacement_elements(Complex alpha, int cutoff);

// For every eigenpair (x_j, v_j) of the truncated x on `position_mode`,
// applies D(displacement(x_j)) to `target_mode` and the phase
// exp(i phase(x_j)). Equals exp of the corresponding generator exactly.
FockState apply_conditional_displacement(
    const FockState& state, int position_mode, int target_mode,
    const std::function<Complex(double)>& displacement,
    const std::function<double(double)>& phase = {});

// QND coupling of resource to system position with the momentum-kick
// compensation c folded in: exp(-i c x_S) U_2(beta).
FockState apply_qnd(const FockState& state, Complex beta, int system_mode,
                    int resource_mode, double compensation = 0.0);

// f(x) on one mode.
FockState apply_position_function(const FockState& state, int mode,
                                  const std::function<Complex(double)>& f);

}  // namespace rusgate
