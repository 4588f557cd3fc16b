#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qac/spectral.hpp"

using namespace qac;

namespace {

SchrodingerProblem harmonic(double m, double a) {
  SchrodingerProblem p;
  p.mass = m;
  p.rigidity = a;
  return p;
}

SchrodingerProblem quartic(double m, double a, double b1, double b2) {
  SchrodingerProblem p;
  p.mass = m;
  p.rigidity = a;
  p.anharmonic.even_coeffs = {b1, b2};
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

// h^2 -> 0 limit from two resolutions
template <typename F>
double richardson(const SchrodingerProblem& base, int n1, F f) {
  SchrodingerProblem p1 = base, p2 = base;
  p1.grid.n_points = n1;
  p2.grid.n_points = 2 * n1;
  const double v1 = f(solve_schrodinger(p1));
  const double v2 = f(solve_schrodinger(p2));
  return v2 + (v2 - v1) / 3.0;
}

}  // namespace

TEST_CASE("harmonic ladder at default resolution") {
  auto dec = solve_schrodinger(harmonic(1.0, 1.0));
  REQUIRE(dec.energies.size() == 64);
  for (int n = 0; n < 10; ++n) CHECK(rel(dec.energies[n], n + 0.5) < 1e-6);
  for (int n = 10; n < 64; ++n) CHECK(rel(dec.energies[n], n + 0.5) < 1e-3);

  auto gap = spectral_gap(dec);
  CHECK(rel(gap.value, 1.0) < 1e-6);

  // v(t) = t shifts the rigidity to a + 2
  auto dec2 = solve_schrodinger(quartic(1.0, 1.0, 1.0, 0.0));
  CHECK(rel(spectral_gap(dec2).value, std::sqrt(3.0)) < 1e-6);
}

TEST_CASE("eigenpairs are orthonormal with small residuals") {
  auto dec = solve_schrodinger(quartic(1.0, 1.0, 0.0, 1.0));
  const int n = static_cast<int>(dec.xs.size());
  for (int k : {0, 1, 5, 20}) {
    // grid residual || H psi - E psi || <= 1e-8 |E|
    double r2 = 0.0, n2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double hp = dec.op_diag[i] * dec.states[k][i];
      if (i > 0) hp += dec.op_offdiag * dec.states[k][i - 1];
      if (i + 1 < n) hp += dec.op_offdiag * dec.states[k][i + 1];
      const double r = hp - dec.energies[k] * dec.states[k][i];
      r2 += r * r;
      n2 += dec.states[k][i] * dec.states[k][i];
    }
    CHECK(std::sqrt(r2 / n2) <= 1e-8 * std::abs(dec.energies[k]));
  }
  for (int a : {0, 3}) {
    for (int b : {0, 3, 7}) {
      double ip = 0.0;
      for (int i = 0; i < n; ++i) ip += dec.states[a][i] * dec.states[b][i];
      ip *= dec.h;
      CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("quartic eigenvalues stable under grid doubling (Richardson)") {
  SchrodingerProblem p = quartic(1.0, 1.0, 0.0, 1.0);
  p.n_keep = 10;
  const double e0_a = richardson(p, 200, [](const SpectralDecomposition& d) { return d.energies[0]; });
  const double e0_b = richardson(p, 400, [](const SpectralDecomposition& d) { return d.energies[0]; });
  CHECK(rel(e0_a, e0_b) < 1e-6);
}

TEST_CASE("double well minimum gap sits at n = 1") {
  // 0.5 x^2 - 3 x^2 + x^4: wells at |x| = sqrt(1.25)
  auto dec = solve_schrodinger(quartic(1.0, 1.0, -3.0, 1.0));
  auto gap = spectral_gap(dec);
  CHECK(gap.index == 1);
  CHECK(gap.value < 0.5 * (dec.energies[2] - dec.energies[1]));
  CHECK_FALSE(gap.at_truncation_edge);
}

TEST_CASE("m Delta^2 grows like m^{-1/3} for the quartic as m shrinks") {
  auto rigidity = [](double m) {
    SchrodingerProblem p = quartic(m, 1.0, 0.0, 1.0);
    p.n_keep = 12;
    auto dec = solve_schrodinger(p);
    const double gap = spectral_gap(dec).value;
    return m * gap * gap;
  };
  const double r1 = rigidity(1.0 / 8.0) / rigidity(1.0);
  const double r2 = rigidity(1.0 / 64.0) / rigidity(1.0 / 8.0);
  // each factor-8 mass drop multiplies m Delta^2 by about 8^{1/3} = 2
  CHECK(r1 > 1.5);
  CHECK(r1 < 2.5);
  CHECK(r2 > 1.6);
  CHECK(r2 < 2.4);
}

TEST_CASE("K^upp equals 1/a for the harmonic oscillator") {
  for (double a : {1.0, 2.5}) {
    auto dec = solve_schrodinger(harmonic(1.0, a));
    for (double beta : {1.0, 3.0}) {
      CHECK(rel(upp_correlator_integral(dec, beta, 1.0), 1.0 / a) < 2e-6);
    }
  }
}

TEST_CASE("K^upp equality chain within 1e-8 after grid extrapolation") {
  SchrodingerProblem p = harmonic(1.0, 1.0);
  p.n_keep = 48;
  const double k_upp =
      richardson(p, 12000, [](const SpectralDecomposition& d) {
        return upp_correlator_integral(d, 1.0, 1.0);
      });
  const double inv_rig = richardson(p, 12000, [](const SpectralDecomposition& d) {
    const double g = spectral_gap(d).value;
    return 1.0 / (1.0 * g * g);
  });
  CHECK(std::abs(k_upp - inv_rig) < 1e-8);
}

TEST_CASE("K^upp <= 1/(m Delta^2) for the quartic (eq. w70)") {
  auto dec = solve_schrodinger(quartic(1.0, 1.0, 0.0, 1.0));
  const double gap = spectral_gap(dec).value;
  const double k = upp_correlator_integral(dec, 1.0, 1.0);
  CHECK(k <= 1.0 / (1.0 * gap * gap));
  CHECK(k > 0.5 / (1.0 * gap * gap));  // strict but not wildly loose
}

TEST_CASE("K^upp beta sweep settles (Cauchy behavior)") {
  auto dec = solve_schrodinger(quartic(1.0, 1.0, 0.0, 1.0));
  const double k1 = upp_correlator_integral(dec, 1.0, 1.0);
  const double k2 = upp_correlator_integral(dec, 2.0, 1.0);
  const double k4 = upp_correlator_integral(dec, 4.0, 1.0);
  const double k8 = upp_correlator_integral(dec, 8.0, 1.0);
  CHECK(std::abs(k8 - k4) <= std::abs(k4 - k2));
  CHECK(std::abs(k4 - k2) <= std::abs(k2 - k1));
}

TEST_CASE("thermal variance: Gaussian closed form and double-well floor") {
  auto dec = solve_schrodinger(harmonic(2.0, 3.0));
  const double omega = std::sqrt(3.0 / 2.0);
  for (double beta : {0.7, 2.0}) {
    const double expect = 1.0 / (2.0 * 2.0 * omega) / std::tanh(beta * omega / 2.0);
    CHECK(rel(low_variance(dec, beta), expect) < 1e-6);
  }

  // double well with 2 b1 < -a: variance >= t* = -(a + 2 b1)/(12 b2)
  auto dw = solve_schrodinger(quartic(1.0, 1.0, -1.0, 1.0));
  const double t_star = 1.0 / 12.0;
  for (double beta : {1.0, 4.0}) CHECK(low_variance(dw, beta) >= t_star);

  // beta -> infinity converges to the ground-state moment
  const double v32 = low_variance(dw, 32.0);
  const double v64 = low_variance(dw, 64.0);
  CHECK(std::abs(v64 - v32) < 1e-10);
}

TEST_CASE("Matsubara two-point function") {
  auto dec = solve_schrodinger(harmonic(1.0, 4.0));
  const double beta = 2.0, omega = 2.0;
  // tau = 0 coincides with <x^2>
  CHECK(rel(matsubara_two_point(dec, beta, 0.0), low_variance(dec, beta)) < 1e-10);
  // closed form (2 m omega)^{-1} cosh(omega(beta/2 - tau))/sinh(omega beta/2)
  for (double tau : {0.1, 0.5, 1.0, 1.7}) {
    const double expect =
        std::cosh(omega * (beta / 2.0 - tau)) / (2.0 * omega * std::sinh(omega * beta / 2.0));
    CHECK(rel(matsubara_two_point(dec, beta, tau), expect) < 1e-6);
  }
  // reflection symmetry about beta/2 and monotone decay on [0, beta/2]
  auto aq = solve_schrodinger(quartic(1.0, 1.0, 0.5, 0.8));
  double prev = matsubara_two_point(aq, beta, 0.0);
  CHECK(prev > 0.0);
  for (double tau : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    const double g = matsubara_two_point(aq, beta, tau);
    CHECK(g > 0.0);
    CHECK(g <= prev + 1e-12);
    CHECK(rel(g, matsubara_two_point(aq, beta, beta - tau)) < 1e-12);
    prev = g;
  }
  CHECK_THROWS_AS(matsubara_two_point(dec, beta, -0.1), Error);
  CHECK_THROWS_AS(matsubara_two_point(dec, beta, beta + 0.1), Error);
}

TEST_CASE("error paths: resolution, truncation, domain") {
  SchrodingerProblem p = harmonic(1.0, 1.0);
  p.grid.n_points = 100;
  CHECK_THROWS_AS(solve_schrodinger(p), Error);

  p = harmonic(1.0, 1.0);
  p.n_keep = 4;  // too few levels for the Boltzmann cutoff at beta = 1
  auto dec = solve_schrodinger(p);
  CHECK_THROWS_AS(upp_correlator_integral(dec, 1.0, 1.0), Error);
  CHECK_THROWS_AS(spectral_gap(dec), Error);

  p = harmonic(1.0, 1.0);
  p.grid.x_max = 1.5;  // ground state leaks onto the wall
  p.grid.n_points = 400;
  CHECK_THROWS_AS(solve_schrodinger(p), Error);
}
