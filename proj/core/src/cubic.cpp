#include "rusgate/cubic.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rusgate {
namespace {

Matrix power(const Matrix& m, int k) {
  Matrix out = identity_matrix(m.rows());
  Matrix base = m;
  while (k > 0) {
    if (k & 1) out = out * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return out;
}

bool is_hermitian(const Matrix& m, double tol = 1e-12) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

IdentityReport fit(Matrix lhs, Matrix rhs, int cutoff, int window) {
  const Cutoffs cut{cutoff};
  const auto idx = interior_indices(cut, window);
  Complex num{}, den{};
  for (auto i : idx) {
    for (auto j : idx) {
      num += std::conj(lhs(i, j)) * rhs(i, j);
      den += std::norm(lhs(i, j));
    }
  }
  IdentityReport r;
  r.constant = den == Complex{} ? Complex{} : num / den;
  r.residual = interior_max_norm(r.constant * lhs - rhs, cut, window);
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  r.cutoff = cutoff;
  r.window = window;
  return r;
}

}  // namespace

CubicDecomposition gamma_factors(double gamma, int N) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("cubic strength gamma must be positive");
  }
  if (N < 1) throw InvalidArgument("N must be at least 1");
  CubicDecomposition d;
  d.gamma = gamma;
  d.N = N;
  const double mag = std::cbrt(gamma / N);
  for (int l = 0; l < 3; ++l) {
    d.gamma_l[l] = std::polar(mag, std::numbers::pi * (4.0 * l + 1.0) / 6.0);
  }
  return d;
}

FockOperator factor_operator(Complex gamma_l, int cutoff) {
  const Matrix x = quadrature_x(cutoff).matrix();
  return FockOperator(identity_matrix(cutoff) + gamma_l * x, {cutoff});
}

FockOperator u_n_operator(double gamma, int N, int cutoff) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  const Matrix x = quadrature_x(cutoff).matrix();
  const Matrix step = identity_matrix(cutoff) + Complex(0.0, gamma / N) * (x * x * x);
  return FockOperator(power(step, N), {cutoff});
}

FockOperator ideal_cubic_gate(double gamma, int cutoff) {
  if (!std::isfinite(gamma)) throw InvalidArgument("gamma must be finite");
  const Matrix x = quadrature_x(cutoff).matrix();
  return FockOperator(matrix_exp(Complex(0.0, gamma) * (x * x * x)), {cutoff}, false, true);
}

double approximation_error(double gamma, int N, int cutoff, int block) {
  if (block < 1 || block > cutoff) throw InvalidArgument("block must lie in [1, cutoff]");
  const Matrix diff = u_n_operator(gamma, N, cutoff).matrix() - ideal_cubic_gate(gamma, cutoff).matrix();
  return diff.topLeftCorner(block, block).cwiseAbs().maxCoeff();
}

double commutator_approx_residual(const FockOperator& a, const FockOperator& b,
                                  double t, int window) {
  if (a.cutoffs() != b.cutoffs() || a.cutoffs().size() != 1) {
    throw DimensionMismatch("commutator check needs two single-mode operators on one cutoff");
  }
  if (!is_hermitian(a.matrix()) || !is_hermitian(b.matrix())) {
    throw InvalidArgument("commutator check needs Hermitian operators");
  }
  const int cutoff = a.cutoffs()[0];
  if (window < 0) window = cutoff / 2;
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  const Matrix ea = matrix_exp(Complex(0.0, t) * A);
  const Matrix eb = matrix_exp(Complex(0.0, t) * B);
  const Matrix lhs = ea * eb * ea.adjoint() * eb.adjoint();
  const Matrix rhs = matrix_exp(-(t * t) * commutator(A, B));
  return interior_max_norm(lhs - rhs, a.cutoffs(), window);
}

IdentityReport monomial_identity_report(int m, int cutoff) {
  if (m < 4) throw InvalidArgument("monomial identity needs m >= 4");
  const Matrix x = quadrature_x(cutoff).matrix();
  const Matrix p = quadrature_p(cutoff).matrix();
  const Matrix lhs = power(x, m);
  const Matrix inner = commutator(power(x, 3), p * p);
  const Matrix rhs = (-2.0 / (3.0 * (m - 1))) * commutator(power(x, m - 1), inner);
  const int degree = m + 4;
  return fit(lhs, rhs, cutoff, std::max(5, degree + 2));
}

IdentityReport polynomial_identity_report(int m, int n, int cutoff) {
  if (m < 1 || n < 1) throw InvalidArgument("polynomial identity needs m, n >= 1");
  const Matrix x = quadrature_x(cutoff).matrix();
  const Matrix p = quadrature_p(cutoff).matrix();
  const Matrix xm = power(x, m);
  const Matrix pn = power(p, n);
  const Matrix lhs = xm * pn + pn * xm;
  Matrix rhs = Complex(0.0, -4.0 / ((n + 1.0) * (m + 1.0))) *
               commutator(power(x, m + 1), power(p, n + 1));
  for (int k = 1; k <= n - 1; ++k) {
    rhs -= (1.0 / (n + 1.0)) * commutator(power(p, n - k), commutator(xm, power(p, k)));
  }
  const int degree = m + n + 2;
  return fit(lhs, rhs, cutoff, std::max(5, degree + 2));
}

}  // namespace rusgate
