#pragma once

// Decomposition of the cubic phase gate exp(i gamma x^3) into the
// approximant (1 + i (gamma/N) x^3)^N and its linear factors
// 1 + gamma_l x, plus numerical checks of the commutator identities used to
// build polynomial Hamiltonians.

#include <array>

#include "rusgate/hilbert.hpp"

namespace rusgate {

struct CubicDecomposition {
  double gamma = 0.0;
  int N = 1;
  // gamma_l = exp(i pi (4l + 1) / 6) (gamma/N)^{1/3}
  std::array<Complex, 3> gamma_l{};
};

CubicDecomposition gamma_factors(double gamma, int N);

// I + gamma_l x
FockOperator factor_operator(Complex gamma_l, int cutoff);
// (I + i (gamma/N) x^3)^N
FockOperator u_n_operator(double gamma, int N, int cutoff);
// exp(i gamma x^3)
FockOperator ideal_cubic_gate(double gamma, int cutoff);

// Max-abs entry, on the block of Fock levels below `block`, of
// U_N(gamma) - exp(i gamma x^3).
double approximation_error(double gamma, int N, int cutoff, int block);

// || e^{iAt} e^{iBt} e^{-iAt} e^{-iBt} - e^{-[A,B] t^2} ||_max restricted to
// Fock levels below cutoff - window. A and B must be Hermitian single-mode
// operators on the same cutoff. window < 0 picks cutoff / 2.
double commutator_approx_residual(const FockOperator& a, const FockOperator& b,
                                  double t, int window = -1);

struct IdentityReport {
  Matrix lhs;
  Matrix rhs;
  // c minimizing ||c lhs - rhs||_F on the interior block.
  Complex constant;
  // max-abs entry of c lhs - rhs on the interior block.
  double residual = 0.0;
  int cutoff = 0;
  int window = 0;
};

// lhs = x^m, rhs = -2/(3(m-1)) [x^{m-1}, [x^3, p^2]].
IdentityReport monomial_identity_report(int m, int cutoff);

// lhs = x^m p^n + p^n x^m,
// rhs = -4i/((n+1)(m+1)) [x^{m+1}, p^{n+1}]
//       - 1/(n+1) sum_{k=1}^{n-1} [p^{n-k}, [x^m, p^k]].
IdentityReport polynomial_identity_report(int m, int n, int cutoff);

}  // namespace rusgate
