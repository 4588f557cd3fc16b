#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "qac/model.hpp"

namespace qac {

// Finite box in Z^d. Sites are enumerated row-major over coordinates
// (last axis fastest); every module shares this convention.
struct Box {
  enum class Boundary { zero, external, periodic_torus };

  std::vector<int> shape;   // per-axis extents
  std::vector<int> origin;  // coordinate of the first site
  Boundary boundary = Boundary::zero;

  static Box rectangular(std::vector<int> shape, Boundary b = Boundary::zero);
  // periodic box (-L, L]^d of eq. (mm8)
  static Box torus(int d, int L);

  int dim() const { return static_cast<int>(shape.size()); }
  int n_sites() const;
  Site coord(int index) const;
  // -1 when the coordinate lies outside the box
  int index_of(std::span<const int> coord) const;
};

// External configuration xi on the complement; values per site, either one
// constant or P per-slice values.
struct BoundaryConfig {
  std::map<Site, std::vector<double>> values;
  void set_constant(Site site, double v) { values[std::move(site)] = {v}; }
  void set_loop(Site site, std::vector<double> per_slice) { values[std::move(site)] = std::move(per_slice); }
};

// Trotter discretization of the loop energy at P time slices:
//   S(x) = sum_{l,t} [ m (x_{l,t+1}-x_{l,t})^2 / (2 eps) + eps (a/2) x_{l,t}^2
//          + eps V_l(x_{l,t}) ] - eps sum_{pairs,t} J_{ll'} x_{l,t} x_{l',t}
//          - eps sum_{l,t} f_{l,t} x_{l,t},
// with periodic slice index and f the boundary field folded from xi.
// Degrees of freedom are laid out x[site * P + slice].
struct DiscreteAction {
  int n_sites = 0;
  int P = 0;
  double eps = 0.0;  // beta / P
  double mass = 0.0;
  double rigidity = 0.0;
  double beta = 0.0;
  std::vector<Potential> site_potentials;  // per site
  struct Pair {
    int s1, s2;
    double j;  // includes torus multiplicity
  };
  std::vector<Pair> pairs;
  // boundary_field[site][slice]; empty when the boundary is zero/periodic
  std::vector<std::vector<double>> boundary_field;
  Box box;

  double total(std::span<const double> x) const;
  bool ferromagnetic() const;
  double boundary_field_at(int site, int slice) const {
    return boundary_field.empty() ? 0.0 : boundary_field[site][slice];
  }
  bool has_boundary_field() const { return !boundary_field.empty(); }
};

DiscreteAction build_action(const ModelSpec& spec, const Box& box, int P,
                            const BoundaryConfig& xi = {});

// Torus action of eqs. (mm7)-(mm9): nearest-neighbor couplings under the
// torus metric, with multiplicity (a side-2 axis doubles the single bond).
DiscreteAction build_periodic_action(const ModelSpec& spec, int L, int P);

// Covariance matrix of the discretized free loop measure
// exp(-sum_t [m (x_{t+1)-x_t)^2/(2 eps) + eps (a/2) x_t^2]).
Eigen::MatrixXd free_covariance(double m, double a, double beta, int P);

// Discrete dispersion lambda^{(P)}_k = m (2/eps)^2 sin^2(pi k / P) + a;
// the covariance Fourier eigenvalues are 1/(eps lambda^{(P)}_k) and
// eps-scaled they converge to 1/(m (2 pi k/beta)^2 + a) as P grows.
std::vector<double> free_covariance_dispersion(double m, double a, double beta, int P);

// Gauss-Hermite nodes/weights against exp(-t^2); scaled per degree of
// freedom so the quadrature weight absorbs the on-site Gaussian factor
// eps (a/2) x^2 plus the kinetic diagonal.
struct QuadratureScheme {
  std::vector<double> nodes;    // ascending, symmetric
  std::vector<double> weights;  // positive, sum = sqrt(pi)
  int q = 0;

  static QuadratureScheme gauss_hermite(int q);
};

}  // namespace qac
