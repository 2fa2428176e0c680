#include "rusgate/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace rusgate {
namespace {

std::vector<Eigen::Index> strides_of(const Cutoffs& cutoffs) {
  std::vector<Eigen::Index> strides(cutoffs.size(), 1);
  for (int m = static_cast<int>(cutoffs.size()) - 2; m >= 0; --m) {
    strides[m] = strides[m + 1] * cutoffs[m + 1];
  }
  return strides;
}

void check_modes(const Cutoffs& cutoffs, std::span<const int> modes) {
  std::vector<bool> seen(cutoffs.size(), false);
  for (int m : modes) {
    if (m < 0 || m >= static_cast<int>(cutoffs.size())) {
      throw InvalidArgument("mode index " + std::to_string(m) +
                            " out of range");
    }
    if (seen[m]) throw InvalidArgument("duplicate mode index");
    seen[m] = true;
  }
}

std::vector<int> complement(int total, std::span<const int> modes) {
  std::vector<int> rest;
  for (int m = 0; m < total; ++m) {
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) {
      rest.push_back(m);
    }
  }
  return rest;
}

// Flat offsets (in the full space) of every multi-index over `modes`, ordered
// with the first listed mode slowest.
std::vector<Eigen::Index> offsets_over(const Cutoffs& cutoffs,
                                       std::span<const int> modes) {
  const auto strides = strides_of(cutoffs);
  std::vector<Eigen::Index> out{0};
  for (int m : modes) {
    std::vector<Eigen::Index> next;
    next.reserve(out.size() * cutoffs[m]);
    for (Eigen::Index base : out) {
      for (int n = 0; n < cutoffs[m]; ++n) next.push_back(base + n * strides[m]);
    }
    out = std::move(next);
  }
  return out;
}

Cutoffs select(const Cutoffs& cutoffs, std::span<const int> modes) {
  Cutoffs out;
  for (int m : modes) out.push_back(cutoffs[m]);
  return out;
}

void require_finite(const Vector& v) {
  if (!v.allFinite()) throw InvalidArgument("state has non-finite amplitudes");
}

}  // namespace

std::size_t checked_dimension(const Cutoffs& cutoffs, std::size_t limit) {
  if (cutoffs.empty()) throw InvalidDimension("at least one mode is required");
  std::size_t dim = 1;
  for (int c : cutoffs) {
    if (c < 2) {
      throw InvalidDimension("cutoff " + std::to_string(c) + " is below 2");
    }
    if (dim > limit / static_cast<std::size_t>(c)) {
      throw InvalidDimension("product of cutoffs exceeds " +
                             std::to_string(limit));
    }
    dim *= static_cast<std::size_t>(c);
  }
  return dim;
}

// ---- FockState ---------------------------------------------------------------

FockState::FockState(Vector amplitudes, Cutoffs cutoffs, bool normalized)
    : amplitudes_(std::move(amplitudes)),
      cutoffs_(std::move(cutoffs)),
      normalized_(normalized) {
  const auto dim = checked_dimension(cutoffs_);
  if (static_cast<std::size_t>(amplitudes_.size()) != dim) {
    throw DimensionMismatch("amplitude count " +
                            std::to_string(amplitudes_.size()) +
                            " does not match cutoffs product " +
                            std::to_string(dim));
  }
  require_finite(amplitudes_);
  if (normalized_ && std::abs(amplitudes_.norm() - 1.0) >= 1e-10) {
    throw InvalidArgument("state flagged normalized has norm " +
                          show(amplitudes_.norm()));
  }
}

FockState FockState::normalize() const {
  const double n = norm();
  if (!(n > 0.0)) throw DegenerateOutcome("cannot normalize a zero state");
  return FockState(amplitudes_ / n, cutoffs_, true);
}

Complex FockState::amplitude(std::span<const int> levels) const {
  if (levels.size() != cutoffs_.size()) {
    throw DimensionMismatch("level count does not match mode count");
  }
  const auto strides = strides_of(cutoffs_);
  Eigen::Index idx = 0;
  for (std::size_t m = 0; m < levels.size(); ++m) {
    if (levels[m] < 0 || levels[m] >= cutoffs_[m]) {
      throw InvalidArgument("Fock level out of range");
    }
    idx += levels[m] * strides[m];
  }
  return amplitudes_(idx);
}

// ---- FockOperator ------------------------------------------------------------

FockOperator::FockOperator(Matrix matrix, Cutoffs cutoffs, bool hermitian_hint,
                           bool unitary_hint)
    : matrix_(std::move(matrix)),
      cutoffs_(std::move(cutoffs)),
      hermitian_hint_(hermitian_hint),
      unitary_hint_(unitary_hint) {
  const auto dim = checked_dimension(cutoffs_, kMaxOperatorDimension);
  if (matrix_.rows() != matrix_.cols() ||
      static_cast<std::size_t>(matrix_.rows()) != dim) {
    throw DimensionMismatch("operator matrix does not match cutoffs");
  }
}

FockOperator FockOperator::adjoint() const {
  return FockOperator(matrix_.adjoint(), cutoffs_, hermitian_hint_,
                      unitary_hint_);
}

// ---- DensityMatrix -----------------------------------------------------------

DensityMatrix::DensityMatrix(Matrix matrix, Cutoffs cutoffs)
    : matrix_(std::move(matrix)), cutoffs_(std::move(cutoffs)) {
  const auto dim = checked_dimension(cutoffs_, kMaxOperatorDimension);
  if (matrix_.rows() != matrix_.cols() ||
      static_cast<std::size_t>(matrix_.rows()) != dim) {
    throw DimensionMismatch("density matrix does not match cutoffs");
  }
}

DensityMatrix DensityMatrix::from_state(const FockState& state) {
  const Vector& v = state.amplitudes();
  return DensityMatrix(v * v.adjoint(), state.cutoffs());
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return matrix_.cwiseAbs2().sum();
}

RealVector DensityMatrix::eigenvalues() const {
  const Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

FockState DensityMatrix::dominant_state() const {
  const Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  Vector v = solver.eigenvectors().col(h.rows() - 1);
  // Fix the global phase: largest-magnitude amplitude real and positive.
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  v *= std::conj(v(k)) / std::abs(v(k));
  return FockState(v.normalized(), cutoffs_, true);
}

// ---- single-mode operators ----------------------------------------------------

Matrix identity_matrix(Eigen::Index dimension) {
  return Matrix::Identity(dimension, dimension);
}

FockOperator identity(const Cutoffs& cutoffs) {
  const auto dim = checked_dimension(cutoffs, kMaxOperatorDimension);
  return FockOperator(identity_matrix(static_cast<Eigen::Index>(dim)), cutoffs,
                      true, true);
}

FockOperator annihilation(int cutoff) {
  checked_dimension({cutoff});
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
  return FockOperator(std::move(a), {cutoff});
}

FockOperator creation(int cutoff) { return annihilation(cutoff).adjoint(); }

FockOperator number_operator(int cutoff) {
  checked_dimension({cutoff});
  Matrix n = Matrix::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) n(k, k) = double(k);
  return FockOperator(std::move(n), {cutoff}, true);
}

FockOperator quadrature_x(int cutoff) {
  const Matrix a = annihilation(cutoff).matrix();
  Matrix x = (a + a.adjoint()) / std::sqrt(2.0);
  return FockOperator(std::move(x), {cutoff}, true);
}

FockOperator quadrature_p(int cutoff) {
  const Matrix a = annihilation(cutoff).matrix();
  Matrix p = (a - a.adjoint()) / (kI * std::sqrt(2.0));
  // Entries are exactly +-i sqrt(n/2); force exact Hermiticity.
  p = 0.5 * (p + Matrix(p.adjoint()));
  return FockOperator(std::move(p), {cutoff}, true);
}

// ---- states --------------------------------------------------------------------

FockState vacuum(const Cutoffs& cutoffs) {
  const auto dim = checked_dimension(cutoffs);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(0) = 1.0;
  return FockState(std::move(v), cutoffs, true);
}

FockState fock_state(int n, int cutoff) {
  checked_dimension({cutoff});
  if (n < 0 || n >= cutoff) throw InvalidArgument("Fock level out of range");
  Vector v = Vector::Zero(cutoff);
  v(n) = 1.0;
  return FockState(std::move(v), {cutoff}, true);
}

double coherent_truncation_loss(Complex alpha, int cutoff) {
  checked_dimension({cutoff});
  const double mean = std::norm(alpha);
  if (mean == 0.0) return 0.0;
  // Sum the retained Poisson mass in log space, then take the complement;
  // also sum the tail directly so tiny losses keep relative precision.
  double kept = 0.0;
  for (int n = 0; n < cutoff; ++n) {
    kept += std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
  }
  double tail = 0.0;
  for (int n = cutoff; n < cutoff + 2000; ++n) {
    const double term = std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
    tail += term;
    if (n > mean && term < 1e-300) break;
  }
  return std::min(tail, std::max(0.0, 1.0 - kept));
}

FockState coherent(Complex alpha, int cutoff, double max_loss) {
  const double loss = coherent_truncation_loss(alpha, cutoff);
  if (loss > max_loss) {
    throw CutoffTooSmall("cutoff " + std::to_string(cutoff) +
                         " drops probability " + show(loss) +
                         " of coherent amplitude " +
                         show(std::abs(alpha)));
  }
  Vector v(cutoff);
  const double mean = std::norm(alpha);
  v(0) = std::exp(-0.5 * mean);
  for (int n = 1; n < cutoff; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
  v.normalize();
  return FockState(std::move(v), {cutoff}, true);
}

// ---- composition ----------------------------------------------------------------

FockState tensor(const FockState& a, const FockState& b) {
  Cutoffs cut = a.cutoffs();
  cut.insert(cut.end(), b.cutoffs().begin(), b.cutoffs().end());
  checked_dimension(cut);
  const Vector& va = a.amplitudes();
  const Vector& vb = b.amplitudes();
  Vector out(va.size() * vb.size());
  for (Eigen::Index i = 0; i < va.size(); ++i) {
    out.segment(i * vb.size(), vb.size()) = va(i) * vb;
  }
  return FockState(std::move(out), std::move(cut),
                   a.normalized() && b.normalized());
}

FockOperator tensor(const FockOperator& a, const FockOperator& b) {
  Cutoffs cut = a.cutoffs();
  cut.insert(cut.end(), b.cutoffs().begin(), b.cutoffs().end());
  checked_dimension(cut, kMaxOperatorDimension);
  const Matrix& ma = a.matrix();
  const Matrix& mb = b.matrix();
  const Eigen::Index nb = mb.rows();
  Matrix out(ma.rows() * nb, ma.cols() * nb);
  for (Eigen::Index i = 0; i < ma.rows(); ++i) {
    for (Eigen::Index j = 0; j < ma.cols(); ++j) {
      out.block(i * nb, j * nb, nb, nb) = ma(i, j) * mb;
    }
  }
  return FockOperator(std::move(out), std::move(cut),
                      a.hermitian_hint() && b.hermitian_hint(),
                      a.unitary_hint() && b.unitary_hint());
}

FockOperator embed(const FockOperator& op, const Cutoffs& cutoffs,
                   std::span<const int> modes) {
  check_modes(cutoffs, modes);
  if (select(cutoffs, modes) != op.cutoffs()) {
    throw DimensionMismatch("operator cutoffs do not match target modes");
  }
  const auto dim = checked_dimension(cutoffs, kMaxOperatorDimension);
  const auto local = offsets_over(cutoffs, modes);
  const auto rest_modes = complement(static_cast<int>(cutoffs.size()), modes);
  const auto rest = offsets_over(cutoffs, rest_modes);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim),
                            static_cast<Eigen::Index>(dim));
  const Matrix& m = op.matrix();
  for (Eigen::Index base : rest) {
    for (std::size_t i = 0; i < local.size(); ++i) {
      for (std::size_t j = 0; j < local.size(); ++j) {
        out(base + local[i], base + local[j]) = m(i, j);
      }
    }
  }
  return FockOperator(std::move(out), cutoffs, op.hermitian_hint(),
                      op.unitary_hint());
}

FockState apply(const Matrix& op, const FockState& state,
                std::span<const int> modes) {
  const Cutoffs& cut = state.cutoffs();
  check_modes(cut, modes);
  const auto local = offsets_over(cut, modes);
  if (op.rows() != static_cast<Eigen::Index>(local.size()) ||
      op.cols() != op.rows()) {
    throw DimensionMismatch("operator dimension does not match target modes");
  }
  const auto rest = offsets_over(cut, complement(state.modes(), modes));
  const Vector& v = state.amplitudes();
  const auto nl = static_cast<Eigen::Index>(local.size());
  const auto nr = static_cast<Eigen::Index>(rest.size());
  Matrix gathered(nl, nr);
  for (Eigen::Index r = 0; r < nr; ++r) {
    for (Eigen::Index l = 0; l < nl; ++l) gathered(l, r) = v(rest[r] + local[l]);
  }
  const Matrix result = op * gathered;
  Vector out(v.size());
  for (Eigen::Index r = 0; r < nr; ++r) {
    for (Eigen::Index l = 0; l < nl; ++l) out(rest[r] + local[l]) = result(l, r);
  }
  return FockState(std::move(out), cut, false);
}

FockState apply(const FockOperator& op, const FockState& state,
                std::span<const int> modes) {
  if (select(state.cutoffs(), modes) != op.cutoffs()) {
    throw DimensionMismatch("operator cutoffs do not match target modes");
  }
  return apply(op.matrix(), state, modes);
}

FockState apply(const FockOperator& op, const FockState& state) {
  if (op.cutoffs() != state.cutoffs()) {
    throw DimensionMismatch("operator and state cutoffs differ");
  }
  return FockState(op.matrix() * state.amplitudes(), state.cutoffs(), false);
}

FockState append_vacuum_mode(const FockState& state, int cutoff) {
  return tensor(state, vacuum({cutoff}));
}

FockState project_modes(const FockState& state, std::span<const int> modes,
                        std::span<const int> levels) {
  const Cutoffs& cut = state.cutoffs();
  check_modes(cut, modes);
  if (modes.size() != levels.size()) {
    throw DimensionMismatch("one level per projected mode is required");
  }
  if (modes.size() == cut.size()) {
    throw InvalidArgument("cannot project out every mode");
  }
  const auto strides = strides_of(cut);
  Eigen::Index shift = 0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (levels[i] < 0 || levels[i] >= cut[modes[i]]) {
      throw InvalidArgument("projected level out of range");
    }
    shift += levels[i] * strides[modes[i]];
  }
  const auto rest_modes = complement(state.modes(), modes);
  const auto rest = offsets_over(cut, rest_modes);
  Vector out(static_cast<Eigen::Index>(rest.size()));
  for (std::size_t r = 0; r < rest.size(); ++r) {
    out(static_cast<Eigen::Index>(r)) = state.amplitudes()(rest[r] + shift);
  }
  return FockState(std::move(out), select(cut, rest_modes), false);
}

DensityMatrix partial_trace(const FockState& state,
                            std::span<const int> keep_modes) {
  if (keep_modes.empty()) throw InvalidArgument("keep set must be non-empty");
  const Cutoffs& cut = state.cutoffs();
  check_modes(cut, keep_modes);
  const auto keep = offsets_over(cut, keep_modes);
  const auto traced = offsets_over(cut, complement(state.modes(), keep_modes));
  const Vector& v = state.amplitudes();
  Matrix psi(static_cast<Eigen::Index>(keep.size()),
             static_cast<Eigen::Index>(traced.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    for (std::size_t t = 0; t < traced.size(); ++t) {
      psi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
          v(keep[k] + traced[t]);
    }
  }
  return DensityMatrix(psi * psi.adjoint(), select(cut, keep_modes));
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const int> keep_modes) {
  if (keep_modes.empty()) throw InvalidArgument("keep set must be non-empty");
  const Cutoffs& cut = rho.cutoffs();
  check_modes(cut, keep_modes);
  const auto keep = offsets_over(cut, keep_modes);
  const auto traced = offsets_over(
      cut, complement(static_cast<int>(cut.size()), keep_modes));
  const auto nk = static_cast<Eigen::Index>(keep.size());
  Matrix out = Matrix::Zero(nk, nk);
  const Matrix& m = rho.matrix();
  for (Eigen::Index t : traced) {
    for (Eigen::Index i = 0; i < nk; ++i) {
      for (Eigen::Index j = 0; j < nk; ++j) out(i, j) += m(keep[i] + t, keep[j] + t);
    }
  }
  return DensityMatrix(std::move(out), select(cut, keep_modes));
}

// ---- scalar diagnostics ---------------------------------------------------------

double fidelity(const FockState& a, const FockState& b) {
  if (a.cutoffs() != b.cutoffs()) throw DimensionMismatch("fidelity: cutoffs differ");
  if (!a.normalized() || !b.normalized()) {
    throw InvalidArgument("fidelity requires normalized states");
  }
  const double f = std::norm(a.amplitudes().dot(b.amplitudes()));
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const FockState& psi) {
  if (rho.cutoffs() != psi.cutoffs()) throw DimensionMismatch("fidelity: cutoffs differ");
  const Vector& v = psi.amplitudes();
  const double f = v.dot(rho.matrix() * v).real() / v.squaredNorm();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.cutoffs() != sigma.cutoffs()) throw DimensionMismatch("fidelity: cutoffs differ");
  const Matrix h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_rho = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  Matrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
  inner = 0.5 * (inner + Matrix(inner.adjoint()));
  Eigen::SelfAdjointEigenSolver<Matrix> es2(inner, Eigen::EigenvaluesOnly);
  const double root = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root * root, 0.0, 1.0);
}

Complex expectation(const Matrix& op, const FockState& state) {
  const Vector& v = state.amplitudes();
  if (op.rows() != v.size()) throw DimensionMismatch("expectation: dimension mismatch");
  const double n2 = v.squaredNorm();
  if (!(n2 > 0.0)) throw DegenerateOutcome("expectation in a zero state");
  return v.dot(op * v) / n2;
}

Complex expectation(const FockOperator& op, const FockState& state) {
  if (op.cutoffs() != state.cutoffs()) {
    throw DimensionMismatch("expectation: cutoffs differ");
  }
  return expectation(op.matrix(), state);
}

// ---- matrix utilities -------------------------------------------------------------

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix matrix_exp(const Matrix& generator) {
  if (generator.rows() != generator.cols()) {
    throw DimensionMismatch("matrix_exp needs a square matrix");
  }
  return generator.exp();
}

QuadratureSpectrum position_spectrum(int cutoff) {
  checked_dimension({cutoff});
  // x is already tridiagonal: zero diagonal, off-diagonal sqrt(n/2).
  RealVector diag = RealVector::Zero(cutoff);
  RealVector sub(cutoff - 1);
  for (int n = 1; n < cutoff; ++n) sub(n - 1) = std::sqrt(n / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

std::vector<Eigen::Index> interior_indices(const Cutoffs& cutoffs, int window) {
  const auto dim = checked_dimension(cutoffs);
  std::vector<Eigen::Index> out;
  const auto strides = strides_of(cutoffs);
  for (std::size_t flat = 0; flat < dim; ++flat) {
    bool inside = true;
    for (std::size_t m = 0; m < cutoffs.size() && inside; ++m) {
      const auto level = (static_cast<Eigen::Index>(flat) / strides[m]) % cutoffs[m];
      inside = level < cutoffs[m] - window;
    }
    if (inside) out.push_back(static_cast<Eigen::Index>(flat));
  }
  return out;
}

double interior_max_norm(const Matrix& m, const Cutoffs& cutoffs, int window) {
  const auto idx = interior_indices(cutoffs, window);
  double best = 0.0;
  for (Eigen::Index i : idx) {
    for (Eigen::Index j : idx) best = std::max(best, std::abs(m(i, j)));
  }
  return best;
}

double unitarity_defect(const FockOperator& u, int window) {
  const Matrix& m = u.matrix();
  return interior_max_norm(m.adjoint() * m - identity_matrix(m.rows()),
                           u.cutoffs(), window);
}

}  // namespace rusgate
