#include "qac/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace qac {

namespace {

constexpr double kWallMargin = 25.0;
constexpr double kBoltzmannCutoff = 1e-14;
constexpr int kDefaultPoints = 12000;

// smallest x with U(x) >= target and still growing a step further out
double confining_radius(const SchrodingerProblem& p, double target) {
  double x = 1.0;
  for (int i = 0; i < 4000; ++i) {
    if (p.potential(x) >= target && p.potential(-x) >= target &&
        p.potential(x * 1.25) > p.potential(x) && p.potential(-x * 1.25) > p.potential(-x))
      return x;
    x *= 1.05;
  }
  fail_numeric("potential does not confine: no wall found");
}

}  // namespace

SpectralDecomposition solve_schrodinger(const SchrodingerProblem& problem) {
  if (problem.mass <= 0.0 || problem.rigidity <= 0.0)
    fail_validation("mass and rigidity must be positive");
  const int n_keep = problem.n_keep;
  if (n_keep < 1) fail_validation("n_keep must be >= 1");
  const int n = problem.grid.n_points > 0 ? problem.grid.n_points : kDefaultPoints;
  if (n < 200) fail_validation("grid resolution inadequate: n_points >= 200 required");
  if (n_keep > n) fail_validation("n_keep exceeds grid size");

  // first guess for the top kept level from the harmonic ladder
  const double omega = std::sqrt(problem.rigidity / problem.mass);
  double e_top_est = omega * (n_keep + 0.5);

  SpectralDecomposition dec;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double x_max = problem.grid.x_max > 0.0
                             ? problem.grid.x_max
                             : confining_radius(problem, e_top_est + kWallMargin);
    const double h = 2.0 * x_max / (n + 1);

    std::vector<double> diag(n), off(n - 1, -1.0 / (2.0 * problem.mass * h * h));
    std::vector<double> xs(n);
    const double kin = 1.0 / (problem.mass * h * h);
    for (int i = 0; i < n; ++i) {
      xs[i] = -x_max + (i + 1) * h;
      diag[i] = kin + problem.potential(xs[i]);
    }

    std::vector<double> w(n), z(static_cast<std::size_t>(n) * n_keep);
    std::vector<lapack_int> isuppz(2 * std::max(1, n_keep));
    lapack_int m = 0;
    std::vector<double> dcopy = diag, ecopy = off;
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, dcopy.data(), ecopy.data(),
                                     0.0, 0.0, 1, n_keep, 0.0, &m, w.data(), z.data(), n,
                                     isuppz.data());
    if (info != 0 || m != n_keep)
      fail_numeric("eigensolve failed (dstevr info=" + std::to_string(info) + ")");

    dec.energies.assign(w.begin(), w.begin() + n_keep);
    dec.xs = xs;
    dec.h = h;
    dec.mass = problem.mass;
    dec.op_diag = diag;
    dec.op_offdiag = off[0];
    dec.states.assign(n_keep, std::vector<double>(n));
    const double norm = 1.0 / std::sqrt(h);  // LAPACK vectors have sum psi^2 = 1
    for (int k = 0; k < n_keep; ++k)
      for (int i = 0; i < n; ++i) dec.states[k][i] = z[static_cast<std::size_t>(k) * n + i] * norm;

    // domain adequacy: wall above the top kept level, ground state away
    // from the boundary
    const double e_top = dec.energies.back();
    const double wall = std::min(problem.potential(x_max), problem.potential(-x_max));
    double edge_mass = 0.0;
    const int edge = std::max(1, n / 200);
    for (int i = 0; i < edge; ++i) {
      edge_mass += dec.states[0][i] * dec.states[0][i] * h;
      edge_mass += dec.states[0][n - 1 - i] * dec.states[0][n - 1 - i] * h;
    }
    if (problem.grid.x_max > 0.0) {
      if (edge_mass > 1e-8)
        fail_numeric("insufficient domain: ground state mass at the boundary");
      break;
    }
    if (wall >= e_top + kWallMargin && edge_mass <= 1e-10) break;
    e_top_est = std::max(e_top, e_top_est) + kWallMargin;
    if (attempt == 7) fail_numeric("domain expansion did not settle");
  }

  for (std::size_t i = 1; i < dec.energies.size(); ++i)
    if (!(dec.energies[i] > dec.energies[i - 1]))
      fail_numeric("spectrum not strictly increasing (degenerate eigensolve)");
  return dec;
}

double SpectralDecomposition::x_matrix_element(int n, int np) const {
  const auto& a = states[n];
  const auto& b = states[np];
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += a[i] * xs[i] * b[i];
  return s * h;
}

double SpectralDecomposition::x2_matrix_element(int n, int np) const {
  const auto& a = states[n];
  const auto& b = states[np];
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += a[i] * xs[i] * xs[i] * b[i];
  return s * h;
}

GapInfo spectral_gap(const SpectralDecomposition& dec) {
  if (dec.energies.size() < 10) fail_validation("spectral_gap needs at least 10 levels");
  GapInfo g;
  g.value = dec.energies[1] - dec.energies[0];
  g.index = 1;
  for (std::size_t i = 2; i < dec.energies.size(); ++i) {
    const double d = dec.energies[i] - dec.energies[i - 1];
    if (d < g.value) {
      g.value = d;
      g.index = static_cast<int>(i);
    }
  }
  g.at_truncation_edge = (g.index + 1 == static_cast<int>(dec.energies.size()));
  return g;
}

namespace {

// number of levels with e^{-beta(E_n - E_0)} >= cutoff; errors out when the
// kept window does not reach the cutoff
int truncation_count(const std::vector<double>& energies, double beta) {
  const double e0 = energies.front();
  int count = 0;
  for (double e : energies) {
    if (std::exp(-beta * (e - e0)) < kBoltzmannCutoff) break;
    ++count;
  }
  if (count == static_cast<int>(energies.size()))
    fail_numeric("spectral sum truncation tail above tolerance: increase n_keep");
  return count;
}

}  // namespace

double upp_correlator_integral(const SpectralDecomposition& dec, double beta, double mass) {
  (void)mass;
  if (beta <= 0.0) fail_validation("beta must be positive");
  const int nb = truncation_count(dec.energies, beta);
  const int total = static_cast<int>(dec.energies.size());
  const double e0 = dec.energies.front();
  double z = 0.0;
  for (int k = 0; k < nb; ++k) z += std::exp(-beta * (dec.energies[k] - e0));

  // (e^{-b E'} - e^{-b E})/(E - E') = e^{-b E'} (-expm1(-b (E-E')))/(E-E');
  // stable for near-degenerate pairs
  double acc = 0.0;
  for (int np = 0; np < nb; ++np) {
    const double wp = std::exp(-beta * (dec.energies[np] - e0));
    for (int m = 0; m < total; ++m) {
      if (m == np) continue;
      const double de = dec.energies[m] - dec.energies[np];
      const double xel = dec.x_matrix_element(m, np);
      acc += xel * xel * wp * (-std::expm1(-beta * de)) / de;
    }
  }
  return acc / z;
}

double low_variance(const SpectralDecomposition& dec, double beta) {
  if (beta <= 0.0) fail_validation("beta must be positive");
  const int nb = truncation_count(dec.energies, beta);
  const double e0 = dec.energies.front();
  double z = 0.0, acc = 0.0;
  for (int k = 0; k < nb; ++k) {
    const double w = std::exp(-beta * (dec.energies[k] - e0));
    z += w;
    acc += w * dec.x2_matrix_element(k, k);
  }
  return acc / z;
}

double matsubara_two_point(const SpectralDecomposition& dec, double beta, double tau) {
  if (beta <= 0.0) fail_validation("beta must be positive");
  if (tau < 0.0 || tau > beta) fail_validation("tau out of range [0, beta]");
  const double e0 = dec.energies.front();
  const int total = static_cast<int>(dec.energies.size());
  (void)truncation_count(dec.energies, beta);
  double z = 0.0;
  for (int k = 0; k < total; ++k) z += std::exp(-beta * (dec.energies[k] - e0));
  double acc = 0.0;
  for (int n = 0; n < total; ++n) {
    const double wn = std::exp(-(beta - tau) * (dec.energies[n] - e0));
    if (wn < kBoltzmannCutoff * kBoltzmannCutoff) continue;
    for (int np = 0; np < total; ++np) {
      const double w = wn * std::exp(-tau * (dec.energies[np] - e0));
      if (w < kBoltzmannCutoff * kBoltzmannCutoff) continue;
      const double xel = dec.x_matrix_element(n, np);
      acc += xel * xel * w;
    }
  }
  return acc / z;
}

}  // namespace qac
