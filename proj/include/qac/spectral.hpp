#pragma once

#include <vector>

#include "qac/model.hpp"

namespace qac {

// One-site Schrödinger problem -(1/2m) d^2/dx^2 + (a/2) x^2 + anharmonic(x)
// on [-x_max, x_max] with Dirichlet walls, second-order central differences.
struct SchrodingerProblem {
  double mass = 1.0;
  double rigidity = 1.0;  // a
  Potential anharmonic;   // v(x^2) - h x on top of the harmonic part
  struct Grid {
    double x_max = 0.0;  // 0 = choose from the spectrum (wall 25 units above E_top)
    int n_points = 0;    // 0 = default resolution
  } grid;
  int n_keep = 64;

  double potential(double x) const {
    return 0.5 * rigidity * x * x + anharmonic(x);
  }
};

struct SpectralDecomposition {
  std::vector<double> energies;      // strictly increasing, n_keep of them
  std::vector<double> xs;            // interior grid nodes
  double h = 0.0;                    // grid spacing
  double mass = 0.0;
  // states[k][i]: k-th eigenvector at node i, orthonormal under the grid
  // inner product h * sum_i psi phi
  std::vector<std::vector<double>> states;
  // tridiagonal operator, kept for residual checks
  std::vector<double> op_diag;
  double op_offdiag = 0.0;

  double x_matrix_element(int n, int np) const;   // (psi_n, x psi_np)
  double x2_matrix_element(int n, int np) const;  // (psi_n, x^2 psi_np)
};

SpectralDecomposition solve_schrodinger(const SchrodingerProblem& problem);

struct GapInfo {
  double value = 0.0;
  int index = 0;           // n attaining E_n - E_{n-1}
  bool at_truncation_edge = false;
};

GapInfo spectral_gap(const SpectralDecomposition& dec);

// K^upp of eq. (w8): (1/Z) sum_{n != n'} |(psi_n, x psi_n')|^2
// (e^{-beta E_n'} - e^{-beta E_n}) / (E_n - E_n'), spectral sums truncated
// once Boltzmann weights drop below 1e-14 relative to the ground state.
double upp_correlator_integral(const SpectralDecomposition& dec, double beta, double mass);

// thermal <x^2>
double low_variance(const SpectralDecomposition& dec, double beta);

// one-site two-point Matsubara function Gamma_{x,x}(0, tau)
double matsubara_two_point(const SpectralDecomposition& dec, double beta, double tau);

}  // namespace qac
