#include "qac/leeyang.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>

namespace qac {

double LaguerreCandidate::operator()(double t) const {
  double v = phi0 * std::exp(gamma0 * t);
  for (int k = 0; k < n; ++k) v *= t;
  for (double g : gammas) v *= 1.0 + g * t;
  return v;
}

namespace {

// derivative coefficients of u (u given from t^1 upward), constant first
std::vector<double> derivative_coeffs(std::span<const double> u) {
  std::vector<double> d(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) d[k] = (k + 1.0) * u[k];
  while (d.size() > 1 && d.back() == 0.0) d.pop_back();
  return d;
}

double eval_poly(std::span<const double> c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

std::vector<std::complex<double>> poly_roots(std::span<const double> c) {
  // strip leading zeros; constant polynomials have no roots
  std::size_t deg = c.size();
  while (deg > 0 && c[deg - 1] == 0.0) --deg;
  if (deg <= 1) return {};
  Eigen::VectorXd coeffs(deg);
  for (std::size_t k = 0; k < deg; ++k) coeffs[static_cast<int>(k)] = c[k];
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(coeffs);
  std::vector<std::complex<double>> roots;
  for (int k = 0; k < solver.roots().size(); ++k) roots.push_back(solver.roots()[k]);
  return roots;
}

struct Membership {
  bool ok = false;
  LaguerreCandidate witness;
  std::complex<double> offending;
};

// is q(t) = c + u'(t) in the Laguerre class (exact algebra through degree 2,
// companion roots above)
Membership laguerre_member(const std::vector<double>& uprime, double c) {
  std::vector<double> q = uprime;
  if (q.empty()) q.push_back(0.0);
  q[0] += c;
  std::size_t deg = q.size();
  while (deg > 1 && q[deg - 1] == 0.0) --deg;
  q.resize(deg);

  Membership m;
  if (deg == 1) {  // constant: needs phi0 > 0
    if (q[0] > 0.0) {
      m.ok = true;
      m.witness.phi0 = q[0];
    } else {
      m.offending = {q[0], 0.0};
    }
    return m;
  }
  const double lead = q.back();
  if (lead <= 0.0) {
    m.offending = {lead, 0.0};
    return m;
  }

  std::vector<double> real_roots;
  if (deg == 2) {  // linear: root -q0/q1
    real_roots.push_back(-q[0] / q[1]);
  } else if (deg == 3) {  // quadratic: exact discriminant
    const double A = q[2], B = q[1], C = q[0];
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) {
      m.offending = {-B / (2.0 * A), std::sqrt(-disc) / (2.0 * A)};
      return m;
    }
    const double sq = std::sqrt(disc);
    real_roots.push_back((-B - sq) / (2.0 * A));
    real_roots.push_back((-B + sq) / (2.0 * A));
  } else {
    if (deg > 9) fail_validation("Laguerre condition root-finding capped at degree 8");
    const auto roots = poly_roots(q);
    double scale = 0.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));
    for (const auto& r : roots) {
      if (std::abs(r.imag()) > 1e-9 * (1.0 + scale)) {
        m.offending = r;
        return m;
      }
      real_roots.push_back(r.real());
    }
  }

  std::sort(real_roots.begin(), real_roots.end());
  for (double r : real_roots) {
    if (r > 1e-12 * (1.0 + std::abs(real_roots.back()))) {
      m.offending = {r, 0.0};
      return m;
    }
  }
  // assemble phi0 t^n prod (1 + gamma_i t)
  m.ok = true;
  m.witness.phi0 = lead;
  for (double r : real_roots) {
    if (r >= -1e-300) {
      ++m.witness.n;  // root at the origin within tolerance
    } else {
      m.witness.gammas.push_back(-1.0 / r);
      m.witness.phi0 *= -r;
    }
  }
  std::sort(m.witness.gammas.rbegin(), m.witness.gammas.rend());
  return m;
}

}  // namespace

LaguerreCheck check_laguerre_condition(std::span<const double> u_coeffs_from_1, double b) {
  if (u_coeffs_from_1.size() > 8)
    fail_validation("Laguerre condition supports u up to degree 8");
  const std::vector<double> up = derivative_coeffs(u_coeffs_from_1);

  // candidate shifts: the boundary values where a root crosses 0 or where a
  // real-root pair collides (critical values of u'), clamped to >= b
  std::vector<double> candidates{b};
  if (!up.empty()) candidates.push_back(-up[0]);  // -u'(0)
  {
    std::vector<double> upp(up.size() > 1 ? up.size() - 1 : 0);
    for (std::size_t k = 1; k < up.size(); ++k) upp[k - 1] = static_cast<double>(k) * up[k];
    for (const auto& r : poly_roots(upp)) {
      if (std::abs(r.imag()) < 1e-10 * (1.0 + std::abs(r)))
        candidates.push_back(-eval_poly(up, r.real()));
    }
  }
  std::vector<double> points;
  for (double c : candidates)
    if (c >= b) points.push_back(c);
  points.push_back(b);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  // interval midpoints and one probe beyond the largest candidate
  const std::size_t base = points.size();
  for (std::size_t i = 0; i + 1 < base; ++i) points.push_back(0.5 * (points[i] + points[i + 1]));
  points.push_back(points[base - 1] + 1.0 + std::abs(points[base - 1]));
  std::sort(points.begin(), points.end());

  LaguerreCheck out;
  for (double c : points) {
    if (c < b) continue;
    Membership m = laguerre_member(up, c);
    if (m.ok) {
      out.member = true;
      out.shift = c;
      out.witness = m.witness;
      return out;
    }
    if (!out.offending_root) out.offending_root = m.offending;
  }
  return out;
}

PressureCurve pressure_curve(const ModelSpec& spec, const Box& box, int P,
                             std::span<const double> h_grid, const QuadratureScheme& quad,
                             const BoundaryConfig& xi) {
  PressureCurve curve;
  curve.P = P;
  curve.n_sites = box.n_sites();
  for (double h : h_grid) {
    ModelSpec s = spec;
    s.potential.field = h;
    const DiscreteAction act = build_action(s, box, P, xi);
    const double z = exact_partition(act, quad);
    if (!(z > 0.0)) fail_numeric("partition function must be positive");
    curve.h.push_back(h);
    curve.p.push_back(std::log(z) / curve.n_sites);
  }
  return curve;
}

double magnetization_per_site(const ModelSpec& spec, const Box& box, int P, double h,
                              const QuadratureScheme& quad) {
  ModelSpec s = spec;
  s.potential.field = h;
  const DiscreteAction act = build_action(s, box, P);
  const auto sm = exact_smoments(act, quad, 1);
  return sm[1] / box.n_sites();
}

ZeroClassification locate_partition_zeros(const ModelSpec& spec, const Box& box, int P,
                                          const QuadratureScheme& quad, int truncation) {
  if (truncation < 2) fail_validation("zero truncation order must be >= 2");
  if (spec.potential.field != 0.0) fail_validation("partition zeros need an even potential");
  const DiscreteAction act = build_action(spec, box, P);
  const double z0 = exact_partition(act, quad);
  const auto sm = exact_smoments(act, quad, 2 * truncation);

  ZeroClassification out;
  out.truncation_order = truncation;
  // phi_N(t) = sum_{n<=N} mu_{2n} t^n / (2n)!; odd moments vanish by symmetry
  std::vector<double> coeff(truncation + 1);
  double fact = 1.0;  // (2n)!
  for (int n = 0; n <= truncation; ++n) {
    if (n > 0) fact *= (2.0 * n - 1.0) * (2.0 * n);
    out.moments.push_back(sm[2 * n] * z0);
    coeff[n] = sm[2 * n] * z0 / fact;
  }

  // trust radius: half the r where orders N-1 and N disagree by 1e-6
  // relative on the positive axis, where all terms are positive
  auto rel_gap = [&](double r) {
    double lo = 0.0, hi = 0.0, pw = 1.0;
    for (int n = 0; n <= truncation; ++n) {
      hi += coeff[n] * pw;
      if (n <= truncation - 1) lo += coeff[n] * pw;
      pw *= r;
    }
    return (hi - lo) / hi;
  };
  double r_lo = 1e-8, r_hi = 1e-8;
  while (rel_gap(r_hi) < 1e-6 && r_hi < 1e12) r_hi *= 2.0;
  r_lo = r_hi / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(r_lo * r_hi);
    (rel_gap(mid) < 1e-6 ? r_lo : r_hi) = mid;
  }
  out.trust_radius = 0.5 * r_lo;

  // roots of the truncation, solved in the rescaled variable t = trust * s
  std::vector<double> scaled(truncation + 1);
  double pw = 1.0;
  for (int n = 0; n <= truncation; ++n) {
    scaled[n] = coeff[n] * pw;
    pw *= out.trust_radius;
  }
  for (const auto& s : poly_roots(scaled)) {
    const std::complex<double> root = s * out.trust_radius;
    out.roots.push_back(root);
    if (std::abs(root) <= out.trust_radius) out.roots_in_trust.push_back(root);
  }

  if (out.roots_in_trust.empty()) {
    out.verdict = ZeroClassification::Verdict::vacuous;
    return out;
  }
  bool ok = true;
  for (const auto& r : out.roots_in_trust) {
    const bool real_neg = std::abs(r.imag()) <= 1e-7 * (1.0 + std::abs(r)) && r.real() < 0.0;
    if (!real_neg) ok = false;
  }
  out.verdict = ok ? ZeroClassification::Verdict::consistent
                   : ZeroClassification::Verdict::violation;
  return out;
}

VanHoveReport van_hove_pressure_check(const ModelSpec& spec, std::span<const Box> boxes, int P,
                                      const QuadratureScheme& quad) {
  if (!spec.translation_invariant()) fail_validation("van Hove check needs translation invariance");
  if (!spec.couplings.ferromagnetic()) fail_validation("van Hove check needs ferromagnetic J");
  VanHoveReport rep;
  const double h_grid[1] = {spec.potential.field};
  for (const Box& box : boxes) {
    VanHoveEntry e;
    e.n_sites = box.n_sites();
    e.p = pressure_curve(spec, box, P, h_grid, quad).p[0];
    ModelSpec decoupled = spec;
    decoupled.couplings = DynamicalMatrix::nearest_neighbor(0.0);
    e.p_decoupled = pressure_curve(decoupled, box, P, h_grid, quad).p[0];
    // f'(1) = |box|^{-1} sum_pairs J eps sum_t <x_l x_l'>
    const DiscreteAction act = build_action(spec, box, P);
    double deriv = 0.0;
    for (const auto& pr : act.pairs) {
      for (int t = 0; t < P; ++t) {
        const MomentFactor fs[2] = {{pr.s1, t, 1}, {pr.s2, t, 1}};
        deriv += pr.j * act.eps * exact_moment(act, quad, fs);
      }
    }
    e.coupling_bound = deriv / e.n_sites;
    constexpr double tol = 1e-9;
    e.monotone_ok =
        e.p >= e.p_decoupled - tol && e.p <= e.p_decoupled + e.coupling_bound + tol;
    rep.entries.push_back(e);
  }
  rep.pressures_nondecreasing = true;
  for (std::size_t i = 1; i < rep.entries.size(); ++i)
    if (rep.entries[i].p < rep.entries[i - 1].p - 1e-9) rep.pressures_nondecreasing = false;
  return rep;
}

}  // namespace qac
