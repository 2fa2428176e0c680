#pragma once

// Truncated multimode Fock space: states, operators, density matrices and the
// handful of linear-algebra utilities every other module builds on.
//
// Index order: mode 0 is the slowest-varying index, so the flat index of
// |n_0, n_1, ..., n_{k-1}> is sum_m n_m * stride_m with stride_{k-1} = 1.
//
// Quadrature convention (fixed throughout the library):
//   x = (a + a^dag) / sqrt(2),  p = (a - a^dag) / (i sqrt(2)),  [x, p] = i.
// Readers who prefer x = (a + a^dag)/2 should rescale x and p by 1/sqrt(2).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rusgate/errors.hpp"

namespace rusgate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Cutoffs = std::vector<int>;

inline constexpr Complex kI{0.0, 1.0};

// Dimension guards: states up to 2^20 amplitudes, dense operators up to
// 4096 x 4096.
inline constexpr std::size_t kMaxStateDimension = std::size_t{1} << 20;
inline constexpr std::size_t kMaxOperatorDimension = 4096;

// Product of cutoffs; throws InvalidDimension for any cutoff < 2 or when the
// product exceeds `limit`.
std::size_t checked_dimension(const Cutoffs& cutoffs,
                              std::size_t limit = kMaxStateDimension);

class FockState {
 public:
  FockState(Vector amplitudes, Cutoffs cutoffs, bool normalized = false);

  const Vector& amplitudes() const { return amplitudes_; }
  const Cutoffs& cutoffs() const { return cutoffs_; }
  bool normalized() const { return normalized_; }
  int modes() const { return static_cast<int>(cutoffs_.size()); }
  Eigen::Index dimension() const { return amplitudes_.size(); }

  double norm() const { return amplitudes_.norm(); }
  // Unit-norm copy; throws DegenerateOutcome for a zero vector.
  FockState normalize() const;

  Complex amplitude(std::span<const int> levels) const;

 private:
  Vector amplitudes_;
  Cutoffs cutoffs_;
  bool normalized_;
};

class FockOperator {
 public:
  FockOperator(Matrix matrix, Cutoffs cutoffs, bool hermitian_hint = false,
               bool unitary_hint = false);

  const Matrix& matrix() const { return matrix_; }
  const Cutoffs& cutoffs() const { return cutoffs_; }
  bool hermitian_hint() const { return hermitian_hint_; }
  bool unitary_hint() const { return unitary_hint_; }
  Eigen::Index dimension() const { return matrix_.rows(); }

  FockOperator adjoint() const;

 private:
  Matrix matrix_;
  Cutoffs cutoffs_;
  bool hermitian_hint_;
  bool unitary_hint_;
};

class DensityMatrix {
 public:
  DensityMatrix(Matrix matrix, Cutoffs cutoffs);
  static DensityMatrix from_state(const FockState& state);

  const Matrix& matrix() const { return matrix_; }
  const Cutoffs& cutoffs() const { return cutoffs_; }
  Eigen::Index dimension() const { return matrix_.rows(); }

  double trace() const { return matrix_.trace().real(); }
  double purity() const;
  // Ascending eigenvalues of the Hermitian part.
  RealVector eigenvalues() const;
  // Eigenvector of the largest eigenvalue, as a unit-norm state.
  FockState dominant_state() const;

 private:
  Matrix matrix_;
  Cutoffs cutoffs_;
};

// ---- single-mode building blocks -----------------------------------------

Matrix identity_matrix(Eigen::Index dimension);
FockOperator identity(const Cutoffs& cutoffs);
FockOperator annihilation(int cutoff);
FockOperator creation(int cutoff);
FockOperator number_operator(int cutoff);
FockOperator quadrature_x(int cutoff);
FockOperator quadrature_p(int cutoff);

// ---- states ----------------------------------------------------------------

FockState vacuum(const Cutoffs& cutoffs);
FockState fock_state(int n, int cutoff);

// Probability mass of |alpha> on levels >= cutoff:
// e^{-|alpha|^2} sum_{n >= cutoff} |alpha|^{2n} / n!.
double coherent_truncation_loss(Complex alpha, int cutoff);

// Coherent state with amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!),
// renormalized after truncation. Throws CutoffTooSmall when the discarded
// tail exceeds `max_loss`.
FockState coherent(Complex alpha, int cutoff, double max_loss = 1e-8);

// ---- composition -----------------------------------------------------------

FockState tensor(const FockState& a, const FockState& b);
FockOperator tensor(const FockOperator& a, const FockOperator& b);

// Lifts an operator acting on `modes` (in that order) to the full space with
// the given cutoffs, padding the other modes with identities.
FockOperator embed(const FockOperator& op, const Cutoffs& cutoffs,
                   std::span<const int> modes);

// Applies `op` to the listed modes of `state` without building the
// full-space matrix. The operator's own cutoffs must match those modes.
FockState apply(const FockOperator& op, const FockState& state,
                std::span<const int> modes);
FockState apply(const Matrix& op, const FockState& state,
                std::span<const int> modes);
FockState apply(const FockOperator& op, const FockState& state);

// Appends a fresh mode in |0> (slowest index unchanged, new mode last).
FockState append_vacuum_mode(const FockState& state, int cutoff);

// Amplitudes <levels|_modes psi> on the remaining modes, unnormalized.
FockState project_modes(const FockState& state, std::span<const int> modes,
                        std::span<const int> levels);

DensityMatrix partial_trace(const FockState& state,
                            std::span<const int> keep_modes);
DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const int> keep_modes);

// ---- scalar diagnostics -----------------------------------------------------

// |<a|b>|^2; both states must be normalized and share cutoffs.
double fidelity(const FockState& a, const FockState& b);
// <psi|rho|psi>.
double fidelity(const DensityMatrix& rho, const FockState& psi);
// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// <s|O|s> / <s|s>.
Complex expectation(const FockOperator& op, const FockState& state);
Complex expectation(const Matrix& op, const FockState& state);

// ---- matrix utilities ------------------------------------------------------

Matrix commutator(const Matrix& a, const Matrix& b);

// Padé scaling-and-squaring exponential.
Matrix matrix_exp(const Matrix& generator);

// Spectral decomposition of the truncated position operator: eigenvalues
// ascending, eigenvectors as columns (real orthogonal).
struct QuadratureSpectrum {
  RealVector values;
  Eigen::MatrixXd vectors;
};
QuadratureSpectrum position_spectrum(int cutoff);

// f(x) for a scalar function of the truncated position operator.
template <typename F>
Matrix function_of_position(int cutoff, F&& f) {
  const QuadratureSpectrum spec = position_spectrum(cutoff);
  Vector diag(cutoff);
  for (int j = 0; j < cutoff; ++j) diag(j) = f(spec.values(j));
  const Matrix v = spec.vectors.cast<Complex>();
  return v * diag.asDiagonal() * v.adjoint();
}

// Mask of "interior" flat indices: every mode's level below cutoff - window.
std::vector<Eigen::Index> interior_indices(const Cutoffs& cutoffs, int window);

// Max-abs entry of m restricted to interior rows and columns.
double interior_max_norm(const Matrix& m, const Cutoffs& cutoffs, int window);

// max |(U^dag U - I)_{ij}| on the interior block.
double unitarity_defect(const FockOperator& u, int window = 2);

}  // namespace rusgate
