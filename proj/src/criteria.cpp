#include "qac/criteria.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qac/simd/kernels.hpp"
#include "qac/spectral.hpp"

namespace qac {

namespace bz {

namespace {

struct GaussLegendre {
  std::vector<double> nodes;    // on (0, 1)
  std::vector<double> weights;  // sum = 1
};

GaussLegendre gauss_legendre01(int n) {
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  std::vector<double> z(static_cast<std::size_t>(n) * n);
  lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, diag.data(), off.data(), z.data(), n);
  if (info != 0) fail_numeric("Gauss-Legendre node solve failed");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    gl.nodes[k] = 0.5 * (diag[k] + 1.0);
    const double v0 = z[static_cast<std::size_t>(k) * n];
    gl.weights[k] = v0 * v0;  // normalized to sum 1 on the unit interval
  }
  return gl;
}

double kernel_point(Kernel k, double e, double b) {
  if (k == Kernel::rsqrt) return 1.0 / std::sqrt(e);
  const double r = std::sqrt(e);
  const double y = b * r;
  const double coth = y > 19.0 ? 1.0 : 1.0 + 2.0 / (std::exp(2.0 * y) - 1.0);
  return coth / r;
}

double kernel_sum(Kernel k, const double* e, std::size_t n, double shift, double b) {
  const auto& kr = simd::active();
  if (k == Kernel::rsqrt) return kr.sum_rsqrt_shifted(e, n, shift);
  return kr.sum_coth_rsqrt(e, n, shift, b);
}

int face_points(int d) {
  if (d <= 4) return 16;
  if (d == 5) return 10;
  if (d <= 7) return 6;
  return 5;
}

}  // namespace

int default_axis_points(int d) {
  switch (d) {
    case 1:
    case 2:
    case 3: return 128;
    case 4: return 96;
    case 5: return 64;
    case 6: return 32;
    case 7: return 24;
    case 8: return 16;
    default: return 12;
  }
}

double midpoint_sum(int d, int n, int block_cells, Kernel k, double b) {
  if (n < 4 || n % 2 != 0) fail_validation("midpoint grid needs even n >= 4");
  const int half = n / 2;
  if (block_cells < 1 || block_cells > half)
    fail_validation("singular block must cover 1..n/2 cells per axis");
  const double h = 2.0 * M_PI / n;
  // orthant cell centers and their 1 - cos values
  std::vector<double> e(half);
  for (int i = 0; i < half; ++i) e[i] = 1.0 - std::cos((i + 0.5) * h);

  // recursive sweep over the leading d-1 axes; innermost axis vectorized,
  // split at the block boundary when every outer coordinate is inside it
  double total = 0.0;
  std::vector<int> idx(std::max(0, d - 1), 0);
  const int outer_axes = d - 1;
  while (true) {
    double shift = 0.0;
    bool prefix_in_block = true;
    for (int a = 0; a < outer_axes; ++a) {
      shift += e[idx[a]];
      if (idx[a] >= block_cells) prefix_in_block = false;
    }
    if (prefix_in_block)
      total += kernel_sum(k, e.data() + block_cells, half - block_cells, shift, b);
    else
      total += kernel_sum(k, e.data(), half, shift, b);

    int a = outer_axes - 1;
    for (; a >= 0; --a) {
      if (idx[a] + 1 < half) {
        ++idx[a];
        break;
      }
      idx[a] = 0;
    }
    if (a < 0) break;
  }
  return total * std::pow(2.0, d) * std::pow(h, d);
}

double cone_patch(int d, double s, Kernel k, double b) {
  // \int_{[-s,s]^d} F(E(p)) dp = \int_{boundary} dS(y) (y.n) \int_0^1
  // rho^{d-1} F(E(rho y)) drho; faces are equivalent under the coordinate
  // symmetries of E, so integrate one face over its positive orthant.
  const GaussLegendre radial = gauss_legendre01(32);
  if (d == 1) {
    // two boundary points y = +-s
    double acc = 0.0;
    for (std::size_t r = 0; r < radial.nodes.size(); ++r) {
      const double rho = radial.nodes[r];
      const double e = 1.0 - std::cos(rho * s);
      acc += radial.weights[r] * kernel_point(k, e, b);
    }
    return 2.0 * s * acc;
  }
  const GaussLegendre face = gauss_legendre01(face_points(d));
  const int nf = static_cast<int>(face.nodes.size());

  std::vector<int> idx(d - 1, 0);
  double face_acc = 0.0;
  while (true) {
    double wface = 1.0;
    double y[16];
    for (int a = 0; a < d - 1; ++a) {
      y[a] = s * face.nodes[idx[a]];
      wface *= face.weights[idx[a]];
    }
    y[d - 1] = s;

    double rad = 0.0;
    for (std::size_t r = 0; r < radial.nodes.size(); ++r) {
      const double rho = radial.nodes[r];
      double e = 0.0;
      for (int a = 0; a < d; ++a) e += 1.0 - std::cos(rho * y[a]);
      rad += radial.weights[r] * std::pow(rho, d - 1) * kernel_point(k, e, b);
    }
    face_acc += wface * rad;

    int a = d - 2;
    for (; a >= 0; --a) {
      if (idx[a] + 1 < nf) {
        ++idx[a];
        break;
      }
      idx[a] = 0;
    }
    if (a < 0) break;
  }
  // 2d faces, (y.n) = s, positive-orthant reduction 2^{d-1}, face measure s^{d-1}
  return 2.0 * d * s * std::pow(2.0, d - 1) * std::pow(s, d - 1) * face_acc;
}

double integral(int d, int n, Kernel k, double b, double* error_estimate) {
  if (d < 1) fail_validation("dimension must be >= 1");
  if (n <= 0) n = default_axis_points(d);
  if (n % 4 != 0) n += 4 - n % 4;  // coarse grid n/2 must stay even

  // block size ~0.5, snapped to the coarse grid so both resolutions excise
  // the identical region
  const double h_coarse = 2.0 * M_PI / (n / 2);
  int k_coarse = std::max(1, static_cast<int>(std::lround(0.5 / h_coarse)));
  if (k_coarse >= n / 4) k_coarse = n / 4;
  const double s = k_coarse * h_coarse;

  const double patch = cone_patch(d, s, k, b);
  const double coarse = midpoint_sum(d, n / 2, k_coarse, k, b) + patch;
  const double fine = midpoint_sum(d, n, 2 * k_coarse, k, b) + patch;
  const double extrap = fine + (fine - coarse) / 3.0;
  if (error_estimate) *error_estimate = std::abs(extrap - fine);
  return extrap;
}

}  // namespace bz

BzResult theta_d(int d, int points_per_axis) {
  if (d < 2) fail_validation("theta_d needs d >= 2");
  BzResult r;
  r.value = bz::integral(d, points_per_axis, bz::Kernel::rsqrt, 0.0, &r.error_estimate) /
            std::pow(2.0 * M_PI, d);
  r.error_estimate /= std::pow(2.0 * M_PI, d);
  return r;
}

BzResult infrared_integral(int d, double m, double j, double beta, int points_per_axis) {
  if (d < 3) fail_validation("infrared integral needs d >= 3");
  if (m <= 0.0 || j <= 0.0 || beta <= 0.0) fail_validation("m, J, beta must be positive");
  const double b = beta * std::sqrt(j / (2.0 * m));
  BzResult r;
  const double raw =
      bz::integral(d, points_per_axis, bz::Kernel::coth_rsqrt, b, &r.error_estimate);
  const double scale = 1.0 / (2.0 * std::pow(2.0 * M_PI, d) * std::sqrt(2.0 * m * j));
  r.value = raw * scale;
  r.error_estimate *= scale;
  return r;
}

double phi_series(std::span<const double> b_from_2, double t) {
  if (t < 0.0) fail_validation("Phi is defined for t >= 0");
  double coeff = 12.0;  // (2s)!/(2^{s-1}(s-1)!) at s = 2
  double pw = t;        // t^{s-1}
  double sum = 0.0;
  for (std::size_t i = 0; i < b_from_2.size(); ++i) {
    const double s = static_cast<double>(i) + 2.0;
    sum += coeff * b_from_2[i] * pw;
    coeff *= (2.0 * s + 2.0) * (2.0 * s + 1.0) / (2.0 * s);
    pw *= t;
  }
  return sum;
}

double t_star(double a, std::span<const double> b_coeffs) {
  if (b_coeffs.empty()) fail_validation("t_star needs potential coefficients");
  const double b1 = b_coeffs[0];
  if (!(2.0 * b1 < -a)) fail_validation("t_star requires 2 b1 < -a");
  bool any = false;
  for (std::size_t s = 1; s < b_coeffs.size(); ++s) {
    if (b_coeffs[s] < 0.0) fail_validation("t_star requires b_s >= 0 for s >= 2");
    if (b_coeffs[s] > 0.0) any = true;
  }
  if (!any) fail_validation("t_star requires a nonzero b_s, s >= 2");

  const std::span<const double> tail(b_coeffs.data() + 1, b_coeffs.size() - 1);
  const double target = -(a + 2.0 * b1);  // Phi(t*) = target > 0
  auto f = [&](double t) { return phi_series(tail, t) - target; };

  double lo = 0.0, hi = 1.0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e12) fail_numeric("t_star bracket expansion failed");
  }
  // bisection with a secant refinement pass
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16 * std::max(1.0, hi)) break;
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const double ft = f(t);
    if (std::abs(ft) < 1e-13 * std::max(1.0, target)) break;
    const double dftd = phi_series(tail, t * (1.0 + 1e-7)) - phi_series(tail, t);
    const double deriv = dftd / (t * 1e-7);
    if (deriv <= 0.0) break;
    t -= ft / deriv;
  }
  if (std::abs(f(t)) > 1e-12 * std::max(1.0, target))
    fail_numeric("t_star residual above tolerance");
  return t;
}

BetaStarResult beta_star(int d, double m, double j, double t_star_value, int points_per_axis) {
  if (d < 3) fail_validation("beta_star needs d >= 3");
  const double theta = theta_d(d, points_per_axis).value;
  const double limit = theta / std::sqrt(8.0 * m * j);  // RHS at beta -> infinity
  if (limit >= t_star_value)
    fail_validation("beta_star precondition fails: RHS(beta -> inf) >= t*, no root");

  auto rhs = [&](double beta) { return infrared_integral(d, m, j, beta, points_per_axis).value; };
  // RHS decreases in beta; RHS(0+) = +infinity
  double lo = 1.0;
  while (rhs(lo) < t_star_value) lo *= 0.5;
  double hi = std::max(2.0, 2.0 * lo);
  while (rhs(hi) > t_star_value) {
    hi *= 2.0;
    if (hi > 1e9) fail_numeric("beta_star bracket expansion failed");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rhs(mid) > t_star_value)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * hi) break;
  }
  BetaStarResult out;
  out.value = 0.5 * (lo + hi);
  out.residual = std::abs(rhs(out.value) - t_star_value);
  return out;
}

PhaseTransitionCheck check_phase_transition(int d, double m, double j, double a,
                                            std::span<const double> b_coeffs) {
  if (d < 3) fail_validation("the phase transition criterion needs d >= 3");
  PhaseTransitionCheck out;
  out.t_star = t_star(a, b_coeffs);
  out.theta_d = theta_d(d).value;
  out.threshold = out.theta_d * out.theta_d / (8.0 * m * out.t_star * out.t_star);
  out.predicted = j > out.threshold;
  if (out.predicted) out.beta_star = beta_star(d, m, j, out.t_star).value;
  return out;
}

StabilizationCheck check_quantum_stabilization(double m, double gap, double j_hat_zero) {
  StabilizationCheck out;
  out.m_delta_sq = m * gap * gap;
  out.j_hat_zero = j_hat_zero;
  out.stabilized = out.m_delta_sq > j_hat_zero;
  return out;
}

StabilizationCheck check_quantum_stabilization_nn(double m, double gap, double j_hat_zero,
                                                  int d, double j, double t_star_value) {
  StabilizationCheck out = check_quantum_stabilization(m, gap, j_hat_zero);
  out.nn_threshold = 1.0 / (8.0 * d * m * t_star_value * t_star_value);
  out.nn_condition = j < *out.nn_threshold;
  return out;
}

HighTCheck check_high_T_uniqueness(double a, const DecompositionSpec& dec, double beta,
                                   double j_hat_zero) {
  if (dec.b < -a) fail_validation("decomposition requires b >= -a");
  if (dec.delta < 0.0) fail_validation("decomposition requires delta >= 0");
  if (beta <= 0.0) fail_validation("beta must be positive");
  HighTCheck out;
  const double ratio = (a + dec.b) / std::max(j_hat_zero, 1e-300);
  if (j_hat_zero == 0.0) {
    out.unique = true;
    out.holds_all_beta = dec.delta == 0.0;
    return out;
  }
  out.unique = std::exp(beta * dec.delta) < ratio;
  out.holds_all_beta = dec.delta == 0.0 && j_hat_zero < a + dec.b;
  if (dec.delta > 0.0 && ratio > 1.0) out.beta_max = std::log(ratio) / dec.delta;
  return out;
}

std::optional<double> find_alpha_window(const ModelSpec& spec, WeightFamily family,
                                        double m_delta_sq) {
  const double j0 = j_hat_zero(spec);
  if (!(j0 < m_delta_sq)) return std::nullopt;
  const double start = family.kind == WeightFamily::Kind::exponential ? 1e-3 : 1.0 + 1e-3;
  for (double alpha = start; alpha < 64.0; alpha *= 2.0) {
    family.alpha = alpha;
    try {
      const double ja = j_hat_alpha(spec, family);
      if (j0 < ja && ja < m_delta_sq) return alpha;
      if (ja >= m_delta_sq) break;  // J_hat_alpha increases with alpha
    } catch (const Error&) {
      break;  // alpha left the convergence window
    }
  }
  return std::nullopt;
}

CriterionReport evaluate_criteria(const ModelSpec& spec,
                                  const std::optional<DecompositionSpec>& dec) {
  ValidationReport v = validate_model(spec);
  if (!v.passes) fail_validation("model validation failed: " + v.diagnostics.front());

  CriterionReport rep;
  rep.j_hat_zero = v.j_hat_zero;

  if (spec.d >= 2) {
    const BzResult th = theta_d(spec.d);
    rep.theta_d = th.value;
    rep.theta_d_error = th.error_estimate;
  }

  // spectral gap of the one-site operator (2) with v = even part of V
  SchrodingerProblem prob;
  prob.mass = spec.mass;
  prob.rigidity = spec.rigidity;
  prob.anharmonic = spec.potential;
  prob.anharmonic.field = 0.0;
  SpectralDecomposition sd = solve_schrodinger(prob);
  rep.delta_gap = spectral_gap(sd).value;
  rep.m_delta_sq = spec.mass * rep.delta_gap * rep.delta_gap;
  rep.quantum_stabilization = rep.m_delta_sq > rep.j_hat_zero;

  const auto& b = spec.potential.even_coeffs;
  const bool ub_form = !b.empty() && 2.0 * b[0] < -spec.rigidity &&
                       std::all_of(b.begin() + 1, b.end(), [](double c) { return c >= 0.0; }) &&
                       b.size() >= 2 && b.back() > 0.0;
  if (ub_form) {
    rep.t_star = t_star(spec.rigidity, b);
    if (spec.d >= 3 && spec.couplings.kind == DynamicalMatrix::Kind::nearest_neighbor &&
        spec.couplings.strength > 0.0) {
      PhaseTransitionCheck pt = check_phase_transition(spec.d, spec.mass,
                                                       spec.couplings.strength, spec.rigidity, b);
      rep.phase_transition_predicted = pt.predicted;
      rep.phase_transition_threshold = pt.threshold;
      if (pt.beta_star) {
        rep.beta_star = pt.beta_star;
        rep.beta_star_residual =
            beta_star(spec.d, spec.mass, spec.couplings.strength, *rep.t_star).residual;
      }
      StabilizationCheck st = check_quantum_stabilization_nn(
          spec.mass, rep.delta_gap, rep.j_hat_zero, spec.d, spec.couplings.strength, *rep.t_star);
      rep.nn_stabilization = st.nn_condition;
      rep.nn_threshold = st.nn_threshold;
    }
  }

  if (dec) {
    HighTCheck ht = check_high_T_uniqueness(spec.rigidity, *dec, spec.beta, rep.j_hat_zero);
    rep.high_T_unique = ht.unique;
    rep.high_T_beta_max = ht.beta_max;
  }

  WeightFamily wf;
  wf.kind = spec.couplings.kind == DynamicalMatrix::Kind::polynomial_decay
                ? WeightFamily::Kind::polynomial
                : WeightFamily::Kind::exponential;
  wf.d = spec.d;
  if (auto alpha = find_alpha_window(spec, wf, rep.m_delta_sq)) rep.alpha_window = alpha;
  return rep;
}

}  // namespace qac
