#include "rusgate/schemes.hpp"

#include <array>
#include <cmath>

#include "rusgate/gaussian.hpp"

namespace rusgate {

GkpPhaseRecord gkp_cubic_state(const GkpStateSpec& spec) {
  if (spec.n < 0) throw InvalidArgument("photon number must be >= 0");
  if (!std::isfinite(spec.alpha)) throw InvalidArgument("alpha must be finite");
  GkpPhaseRecord r;
  r.energy = spec.n + 0.5;
  const double root = std::sqrt(2.0 * r.energy);
  r.cubic_coeff = 1.0 / (6.0 * root);
  r.linear_coeff = -(root - spec.alpha);
  r.small_alpha = spec.alpha < 10.0;
  r.phase.reserve(spec.domain.size());
  for (double x : spec.domain) r.phase.push_back(r.cubic_coeff * x * x * x + r.linear_coeff * x);
  return r;
}

GkpLikelihood gkp_mode_likelihood(int n, double alpha, double sigma_x, double sigma_p) {
  if (!(sigma_x > 0.0 && sigma_x < 1.0) || !(sigma_p > 0.0 && sigma_p < 1.0)) {
    throw InvalidArgument("sigma_x and sigma_p must lie in (0, 1)");
  }
  const double base = 0.5 / (sigma_p * sigma_p);
  const double a = 0.5 * std::pow(alpha - 1.0 / sigma_x, 2) + base;
  const double b = 0.5 * std::pow(alpha + 1.0 / sigma_x, 2) + base;
  GkpLikelihood l;
  l.lower = std::min(a, b);
  l.upper = std::max(a, b);
  const double e = n + 0.5;
  l.inside = e >= l.lower && e <= l.upper;
  return l;
}

MarekResource marek_resource_state(double r_width, double gamma, int cutoff) {
  if (!(r_width > 0.0)) throw InvalidArgument("r_width must be > 0");
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  const Matrix s = squeeze_gate(r_width, cutoff).matrix();
  const Matrix x = quadrature_x(cutoff).matrix();
  const Vector sq = s.col(0);
  const Vector lab = sq + Complex(0.0, gamma) * (x * (x * (x * sq)));
  MarekResource m{r_width, gamma, gamma * std::pow(r_width, 1.5),
                  FockState(lab, {cutoff}).normalize(), Vector()};
  const Vector back = s.adjoint() * m.lab_state.amplitudes();
  m.squeezed_frame = back.head(std::min(cutoff, 6));
  return m;
}

FockState marek_resource_squeezed_frame(double r_width, double gamma, int cutoff) {
  if (!(r_width > 0.0)) throw InvalidArgument("r_width must be > 0");
  checked_dimension({cutoff});
  if (cutoff < 4) throw CutoffTooSmall("resource needs at least 4 levels");
  const double g = gamma * std::pow(r_width, 1.5);
  // x^3|0> = (3|1> + sqrt6 |3>) / (2 sqrt2)
  Vector v = Vector::Zero(cutoff);
  v(0) = 1.0;
  v(1) = Complex(0.0, g * 3.0 / (2.0 * std::sqrt(2.0)));
  v(3) = Complex(0.0, g * std::sqrt(3.0) / 2.0);
  return FockState(std::move(v), {cutoff}).normalize();
}

FockOperator marek_feed_forward(double gamma, double q, int cutoff) {
  const Matrix m = function_of_position(cutoff, [&](double x) {
    return std::polar(1.0, -gamma * q * q * q - 3.0 * gamma * (x + q) * x * q);
  });
  return FockOperator(m, {cutoff}, false, true);
}

MarekOutcome marek_gate(const FockState& input, double r_width, double gamma, Rng& rng,
                        int resource_cutoff, std::optional<double> forced_q) {
  if (input.modes() != 1) throw InvalidArgument("marek_gate expects a single-mode input");
  if (!(r_width > 0.0)) throw InvalidArgument("r_width must be > 0");
  if (resource_cutoff % 2 == 0) ++resource_cutoff;
  const int cs = input.cutoffs()[0];
  const double root_r = std::sqrt(r_width);

  FockState joint = tensor(input.normalize(),
                           marek_resource_squeezed_frame(r_width, gamma, resource_cutoff));
  // exp(i x_S p_R) with p_R = p'/sqrt(r): exp(i a p') = D(-a/sqrt2).
  joint = apply_conditional_displacement(joint, 0, 1, [&](double x) {
    return Complex(-x / (std::sqrt(2.0) * root_r), 0.0);
  });

  // Homodyne on x' in the eigenbasis of the truncated x'.
  const QuadratureSpectrum spec = position_spectrum(resource_cutoff);
  const std::array<int, 1> res{1};
  const FockState rotated = apply(Matrix(spec.vectors.transpose().cast<Complex>()), joint, res);
  RealVector prob = RealVector::Zero(resource_cutoff);
  for (int s = 0; s < cs; ++s) {
    for (int k = 0; k < resource_cutoff; ++k) {
      prob(k) += std::norm(rotated.amplitudes()(static_cast<Eigen::Index>(s) * resource_cutoff + k));
    }
  }
  const double total = prob.sum();
  int k = 0;
  if (forced_q) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < resource_cutoff; ++j) {
      const double d = std::abs(root_r * spec.values(j) - *forced_q);
      if (d < best) {
        best = d;
        k = j;
      }
    }
  } else {
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    for (k = 0; k < resource_cutoff - 1; ++k) {
      acc += prob(k);
      if (u < acc) break;
    }
  }
  // The middle eigenvalue of an odd truncation is zero up to rounding.
  const double q = std::abs(spec.values(k)) < 1e-12 ? 0.0 : root_r * spec.values(k);
  MarekOutcome out{FockState(Vector::Zero(cs), {cs}), q, prob(k) / total, false};
  if (!(prob(k) > 0.0)) throw DegenerateOutcome("homodyne bin has zero probability");
  const std::array<int, 1> level{k};
  FockState collapsed = project_modes(rotated, res, level).normalize();
  if (out.q != 0.0) {
    collapsed = apply(marek_feed_forward(gamma, out.q, cs), collapsed).normalize();
    out.feed_forward_applied = true;
  }
  out.state = std::move(collapsed);
  return out;
}

RuntimeModels runtime_models(double p, int N) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
  if (N < 1) throw InvalidArgument("N must be at least 1");
  RuntimeModels m;
  m.p = p;
  m.ours_per_factor = 1.0 / p;
  m.ours_full_gate = 3.0 * N / p;
  m.marek_asymptotic = 1.0 / (p * p * p);
  m.marek_restart = (1.0 + p + p * p) / (p * p * p);
  return m;
}

double marek_restart_monte_carlo(double p, int runs, Rng& rng) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
  if (runs < 1) throw InvalidArgument("runs must be at least 1");
  double total = 0.0;
  for (int r = 0; r < runs; ++r) {
    long long trials = 0;
    for (int streak = 0; streak < 3;) {
      ++trials;
      streak = uniform01(rng) < p ? streak + 1 : 0;
    }
    total += double(trials);
  }
  return total / runs;
}

}  // namespace rusgate
