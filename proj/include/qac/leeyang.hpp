#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "qac/oracle.hpp"

namespace qac {

// Laguerre-class polynomial phi(t) = phi0 e^{gamma0 t} t^n prod (1 + gamma_i t)
// with phi0 > 0, gamma_i >= 0 (gamma0 = 0 for polynomials).
struct LaguerreCandidate {
  double phi0 = 1.0;
  double gamma0 = 0.0;
  int n = 0;
  std::vector<double> gammas;  // nonincreasing

  double operator()(double t) const;
};

struct LaguerreCheck {
  bool member = false;
  std::optional<double> shift;  // chosen c >= b with c + u' in the class
  std::optional<LaguerreCandidate> witness;
  std::optional<std::complex<double>> offending_root;
};

// Decides whether some shift c >= b makes c + u'(t) a Laguerre-class
// polynomial (positive leading coefficient, all roots real and <= 0).
// u is given by its coefficients from t^1 upward (u(0) = 0); degree <= 8.
LaguerreCheck check_laguerre_condition(std::span<const double> u_coeffs_from_1, double b);

struct PressureCurve {
  std::vector<double> h;
  std::vector<double> p;  // p_Lambda(h) = |box|^{-1} log Z(h)
  int n_sites = 0;
  int P = 0;
};

// finite-volume pressure over an external-field grid; zero boundary unless
// xi is provided (the conditional variant p_Lambda(h, xi))
PressureCurve pressure_curve(const ModelSpec& spec, const Box& box, int P,
                             std::span<const double> h_grid, const QuadratureScheme& quad,
                             const BoundaryConfig& xi = {});

// |box|^{-1} <S> at the given field; the derivative of the pressure in h
double magnetization_per_site(const ModelSpec& spec, const Box& box, int P, double h,
                              const QuadratureScheme& quad);

struct ZeroClassification {
  enum class Verdict { consistent, violation, vacuous };
  Verdict verdict = Verdict::vacuous;
  double trust_radius = 0.0;
  int truncation_order = 0;
  std::vector<std::complex<double>> roots;           // all truncation roots
  std::vector<std::complex<double>> roots_in_trust;  // |t| <= trust radius
  std::vector<double> moments;                       // mu_{2n} = <S^{2n}> Z(0)
};

// Builds the degree-N truncation of phi(t) = sum_n mu_{2n} t^n / (2n)! from
// exact S-moments, locates its roots, and classifies: consistent when every
// in-trust-radius root is real and negative, vacuous when none lies inside.
ZeroClassification locate_partition_zeros(const ModelSpec& spec, const Box& box, int P,
                                          const QuadratureScheme& quad, int truncation);

struct VanHoveEntry {
  int n_sites = 0;
  double p = 0.0;             // per-site pressure, couplings on
  double p_decoupled = 0.0;   // per-site pressure, in-box couplings off
  double coupling_bound = 0.0;  // f'(1), the interpolation derivative bound
  bool monotone_ok = false;   // p_decoupled <= p <= p_decoupled + bound
};

struct VanHoveReport {
  std::vector<VanHoveEntry> entries;
  bool pressures_nondecreasing = false;  // per-site p along the box sequence
};

// Interpolation monotonicity behind the pressure limit: switching on the
// in-box couplings never decreases the per-site pressure, and the increase
// is bounded by the coupling derivative at full strength.
VanHoveReport van_hove_pressure_check(const ModelSpec& spec, std::span<const Box> boxes, int P,
                                      const QuadratureScheme& quad);

}  // namespace qac
