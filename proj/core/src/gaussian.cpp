#include "rusgate/gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace rusgate {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_mode(const Cutoffs& cutoffs, int mode) {
  if (mode < 0 || mode >= static_cast<int>(cutoffs.size())) {
    throw InvalidArgument("mode " + std::to_string(mode) + " out of range");
  }
}

void require_pair(const Cutoffs& cutoffs, int a, int b) {
  require_mode(cutoffs, a);
  require_mode(cutoffs, b);
  if (a == b) throw InvalidArgument("two-mode gate needs distinct modes");
}

Matrix two_mode_generator(const Cutoffs& cutoffs, int mode_a, const Matrix& a,
                          int mode_b, const Matrix& b) {
  const std::array<int, 1> ma{mode_a};
  const std::array<int, 1> mb{mode_b};
  const Matrix ea = embed(FockOperator(a, {cutoffs[mode_a]}), cutoffs, ma).matrix();
  const Matrix eb = embed(FockOperator(b, {cutoffs[mode_b]}), cutoffs, mb).matrix();
  return ea * eb;
}

}  // namespace

// ---- gate descriptions -----------------------------------------------------------

void validate(const GateSpec& spec, const Cutoffs& cutoffs) {
  checked_dimension(cutoffs);
  std::visit(
      Overloaded{
          [&](const Displacement& g) { require_mode(cutoffs, g.mode); },
          [&](const Squeeze& g) {
            require_mode(cutoffs, g.mode);
            if (!(g.r_width > 0.0)) throw InvalidArgument("squeeze r_width must be > 0");
          },
          [&](const Beamsplitter& g) {
            require_pair(cutoffs, g.modes.first, g.modes.second);
            if (!(g.transmittance > 0.0 && g.transmittance <= 1.0)) {
              throw InvalidArgument("beamsplitter transmittance must lie in (0, 1]");
            }
          },
          [&](const Qnd& g) { require_pair(cutoffs, g.system_mode, g.resource_mode); },
          [&](const QndPrime& g) {
            require_pair(cutoffs, g.system_mode, g.resource_mode);
          },
      },
      spec);
}

FockOperator build_gate(const GateSpec& spec, const Cutoffs& cutoffs) {
  validate(spec, cutoffs);
  return std::visit(
      Overloaded{
          [&](const Displacement& g) {
            const std::array<int, 1> m{g.mode};
            return embed(displacement_gate(g.alpha, cutoffs[g.mode]), cutoffs, m);
          },
          [&](const Squeeze& g) {
            const std::array<int, 1> m{g.mode};
            return embed(squeeze_gate(g.r_width, cutoffs[g.mode]), cutoffs, m);
          },
          [&](const Beamsplitter& g) {
            return beamsplitter_gate(g.transmittance, cutoffs, g.modes);
          },
          [&](const Qnd& g) {
            return qnd_gate(g.beta, cutoffs, g.system_mode, g.resource_mode);
          },
          [&](const QndPrime& g) {
            return qnd_prime_gate(cutoffs, g.system_mode, g.resource_mode, g.strength);
          },
      },
      spec);
}

// ---- dense constructors ------------------------------------------------------------

FockOperator displacement_gate(Complex alpha, int cutoff, double max_loss) {
  const double loss = coherent_truncation_loss(alpha, cutoff);
  if (loss > max_loss) {
    throw CutoffTooSmall("displacement " + show(std::abs(alpha)) +
                         " needs a cutoff above " + std::to_string(cutoff));
  }
  const Matrix a = annihilation(cutoff).matrix();
  const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return FockOperator(matrix_exp(gen), {cutoff}, false, true);
}

double squeeze_log_parameter(double r_width) {
  if (!(r_width > 0.0)) throw InvalidArgument("squeeze r_width must be > 0");
  return -0.5 * std::log(r_width);
}

double squeezed_vacuum_truncation_loss(double r_width, int cutoff) {
  checked_dimension({cutoff});
  const double s = std::abs(squeeze_log_parameter(r_width));
  if (s == 0.0) return 0.0;
  const double t2 = std::pow(std::tanh(s), 2);
  // P(2k) = (2k)! / (4^k (k!)^2) tanh^{2k}(s) / cosh(s)
  double term = 1.0 / std::cosh(s);
  int k = 0;
  for (; 2 * k < cutoff; ++k) term *= t2 * (2.0 * k + 1.0) / (2.0 * k + 2.0);
  double tail = 0.0;
  for (int it = 0; it < 10000000 && term > 0.0; ++it, ++k) {
    tail += term;
    if (term < tail * 1e-17) break;
    term *= t2 * (2.0 * k + 1.0) / (2.0 * k + 2.0);
  }
  return std::min(tail, 1.0);
}

FockOperator squeeze_gate(double r_width, int cutoff, double max_loss) {
  const double s = squeeze_log_parameter(r_width);
  const double loss = squeezed_vacuum_truncation_loss(r_width, cutoff);
  if (loss > max_loss) {
    throw CutoffTooSmall("squeeze r_width=" + show(r_width) +
                         " loses " + show(loss) + " at cutoff " +
                         std::to_string(cutoff));
  }
  const Matrix a = annihilation(cutoff).matrix();
  const Matrix a2 = a * a;
  const Matrix gen = (s / 2.0) * (a2 - Matrix(a2.adjoint()));
  return FockOperator(matrix_exp(gen), {cutoff}, false, true);
}

FockOperator beamsplitter_gate(double transmittance, const Cutoffs& cutoffs,
                               std::pair<int, int> mode_pair) {
  validate(Beamsplitter{transmittance, mode_pair}, cutoffs);
  const int c1 = cutoffs[mode_pair.first];
  const int c2 = cutoffs[mode_pair.second];
  const double theta = std::acos(std::sqrt(transmittance));
  Matrix local = Matrix::Zero(c1 * c2, c1 * c2);
  // Generator theta (a1^dag a2 - a1 a2^dag) conserves n1 + n2; exponentiate
  // each full block and keep the representable entries.
  for (int total = 0; total <= c1 + c2 - 2; ++total) {
    const int size = total + 1;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
    for (int k = 0; k < total; ++k) {
      // a1^dag a2 |k, total-k> = sqrt(k+1) sqrt(total-k) |k+1, total-k-1>
      const double v = theta * std::sqrt((k + 1.0) * (total - k));
      g(k + 1, k) += v;
      g(k, k + 1) -= v;
    }
    const Eigen::MatrixXd block = g.exp();
    for (int kin = 0; kin < size; ++kin) {
      if (kin >= c1 || total - kin >= c2) continue;
      for (int kout = 0; kout < size; ++kout) {
        if (kout >= c1 || total - kout >= c2) continue;
        local(kout * c2 + (total - kout), kin * c2 + (total - kin)) = block(kout, kin);
      }
    }
  }
  const std::array<int, 2> modes{mode_pair.first, mode_pair.second};
  return embed(FockOperator(std::move(local), {c1, c2}, false, true), cutoffs, modes);
}

FockOperator qnd_gate(Complex beta, const Cutoffs& cutoffs, int system_mode,
                      int resource_mode) {
  require_pair(cutoffs, system_mode, resource_mode);
  checked_dimension(cutoffs, kMaxOperatorDimension);
  const Matrix x = quadrature_x(cutoffs[system_mode]).matrix();
  const Matrix a = annihilation(cutoffs[resource_mode]).matrix();
  const Matrix g_r = beta * a.adjoint() - std::conj(beta) * a;
  const Matrix gen = two_mode_generator(cutoffs, system_mode, x, resource_mode, g_r);
  return FockOperator(matrix_exp(gen), cutoffs, false, true);
}

FockOperator qnd_prime_gate(const Cutoffs& cutoffs, int system_mode,
                            int resource_mode, double strength) {
  require_pair(cutoffs, system_mode, resource_mode);
  checked_dimension(cutoffs, kMaxOperatorDimension);
  const Matrix p = quadrature_p(cutoffs[system_mode]).matrix();
  const Matrix x = quadrature_x(cutoffs[resource_mode]).matrix();
  const Matrix gen =
      (kI * strength) * two_mode_generator(cutoffs, system_mode, p, resource_mode, x);
  return FockOperator(matrix_exp(gen), cutoffs, false, true);
}

FockOperator momentum_kick_gate(double c, int cutoff) {
  const Matrix x = quadrature_x(cutoff).matrix();
  return FockOperator(matrix_exp(Complex(0.0, -c) * x), {cutoff}, false, true);
}

double qnd_phase_compensation(Complex beta, Complex resource_amplitude) {
  return (beta * std::conj(resource_amplitude)).imag();
}

// ---- exact elements and spectral application ------------------------------------------

namespace {

// Padded size for displacements up to `magnitude` acting on levels below
// `cutoff`: beyond the classical reach (sqrt(cutoff) + |alpha|)^2 with margin,
// in steps of 64 so that the spectrum cache stays small.
int displacement_padding(double magnitude, int cutoff) {
  const double reach = std::sqrt(double(cutoff)) + magnitude + 6.0;
  const int p = std::max(static_cast<int>(std::ceil(reach * reach)) + 20, cutoff + 32);
  return (p + 63) / 64 * 64;
}

std::shared_ptr<const QuadratureSpectrum> cached_spectrum(int padded) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const QuadratureSpectrum>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[padded];
  if (!slot) slot = std::make_shared<const QuadratureSpectrum>(position_spectrum(padded));
  return slot;
}

// Replaces every column k of `cols` (levels below cols.rows()) by
// D(alpha_k) cols.col(k), using
//   D(alpha) = R(phi) exp(i sqrt2 |alpha| x) R(phi)^dag,
//   R(phi) = exp(i phi n),  phi = arg(alpha) - pi/2,
// with x truncated at a padded size where the columns never reach the edge.
void displace_columns(Matrix& cols, const std::vector<Complex>& alphas) {
  const int c = static_cast<int>(cols.rows());
  const Eigen::Index k = cols.cols();
  if (k == 0) return;
  double reach = 0.0;
  for (Complex a : alphas) reach = std::max(reach, std::abs(a));
  const auto spec = cached_spectrum(displacement_padding(reach, c));
  const auto basis = spec->vectors.topRows(c);
  const Eigen::Index p = spec->values.size();

  for (Eigen::Index j = 0; j < k; ++j) {
    const double phi = std::arg(alphas[j]) - std::numbers::pi / 2.0;
    for (int n = 0; n < c; ++n) cols(n, j) *= std::polar(1.0, -phi * n);
  }
  Eigen::MatrixXd parts(c, 2 * k);
  parts.leftCols(k) = cols.real();
  parts.rightCols(k) = cols.imag();
  Eigen::MatrixXd w = basis.transpose() * parts;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double kick = std::sqrt(2.0) * std::abs(alphas[j]);
    for (Eigen::Index i = 0; i < p; ++i) {
      const Complex z = std::polar(1.0, kick * spec->values(i)) * Complex(w(i, j), w(i, j + k));
      w(i, j) = z.real();
      w(i, j + k) = z.imag();
    }
  }
  parts.noalias() = basis * w;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double phi = std::arg(alphas[j]) - std::numbers::pi / 2.0;
    for (int n = 0; n < c; ++n) {
      cols(n, j) = std::polar(1.0, phi * n) * Complex(parts(n, j), parts(n, j + k));
    }
  }
}

}  // namespace

Matrix displacement_elements(Complex alpha, int cutoff) {
  checked_dimension({cutoff});
  Matrix out = identity_matrix(cutoff);
  displace_columns(out, std::vector<Complex>(cutoff, alpha));
  return out;
}

FockState apply_conditional_displacement(
    const FockState& state, int position_mode, int target_mode,
    const std::function<Complex(double)>& displacement,
    const std::function<double(double)>& phase) {
  const Cutoffs& cut = state.cutoffs();
  require_pair(cut, position_mode, target_mode);
  const int cs = cut[position_mode];
  const int ct = cut[target_mode];
  const QuadratureSpectrum spec = position_spectrum(cs);
  const Matrix v = spec.vectors.cast<Complex>();
  const std::array<int, 1> pos{position_mode};

  FockState rotated = apply(Matrix(v.adjoint()), state, pos);
  Vector amps = rotated.amplitudes();

  const int modes = static_cast<int>(cut.size());
  std::vector<Eigen::Index> stride(modes, 1);
  for (int m = modes - 2; m >= 0; --m) stride[m] = stride[m + 1] * cut[m + 1];
  std::vector<Eigen::Index> bases{0};
  for (int m = 0; m < modes; ++m) {
    if (m == position_mode || m == target_mode) continue;
    std::vector<Eigen::Index> next;
    next.reserve(bases.size() * cut[m]);
    for (Eigen::Index b : bases)
      for (int l = 0; l < cut[m]; ++l) next.push_back(b + l * stride[m]);
    bases = std::move(next);
  }

  // Slices carrying less than 1e-32 of the norm are left undisplaced; the
  // change is below rounding and keeps the padded space small.
  std::vector<double> slice_weight(cs, 0.0);
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    slice_weight[(i / stride[position_mode]) % cs] += std::norm(amps(i));
  }
  const double total_weight = amps.squaredNorm();

  std::vector<Eigen::Index> offsets;
  std::vector<Complex> shifts;
  for (int j = 0; j < cs; ++j) {
    const Complex ph = phase ? std::polar(1.0, phase(spec.values(j))) : Complex(1.0);
    const Complex shift = displacement && slice_weight[j] > 1e-32 * total_weight
                              ? displacement(spec.values(j))
                              : Complex{};
    for (Eigen::Index b : bases) {
      const Eigen::Index off = b + j * stride[position_mode];
      if (ph != Complex(1.0)) {
        for (int t = 0; t < ct; ++t) amps(off + t * stride[target_mode]) *= ph;
      }
      if (shift != Complex{}) {
        offsets.push_back(off);
        shifts.push_back(shift);
      }
    }
  }
  Matrix cols(ct, static_cast<Eigen::Index>(offsets.size()));
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    for (int t = 0; t < ct; ++t) cols(t, k) = amps(offsets[k] + t * stride[target_mode]);
  }
  displace_columns(cols, shifts);
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    for (int t = 0; t < ct; ++t) amps(offsets[k] + t * stride[target_mode]) = cols(t, k);
  }
  FockState back(std::move(amps), cut, false);
  return apply(v, back, pos);
}

FockState apply_qnd(const FockState& state, Complex beta, int system_mode,
                    int resource_mode, double compensation) {
  return apply_conditional_displacement(
      state, system_mode, resource_mode, [beta](double x) { return beta * x; },
      [compensation](double x) { return -compensation * x; });
}

FockState apply_position_function(const FockState& state, int mode,
                                  const std::function<Complex(double)>& f) {
  const int c = state.cutoffs().at(static_cast<std::size_t>(mode));
  const std::array<int, 1> m{mode};
  return apply(function_of_position(c, f), state, m);
}

}  // namespace rusgate
