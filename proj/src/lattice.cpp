#include "qac/lattice.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qac/simd/kernels.hpp"

namespace qac {

Box Box::rectangular(std::vector<int> shape, Boundary b) {
  Box box;
  box.shape = std::move(shape);
  box.origin.assign(box.shape.size(), 0);
  box.boundary = b;
  for (int s : box.shape)
    if (s < 1) fail_validation("box extents must be positive");
  return box;
}

Box Box::torus(int d, int L) {
  if (L < 1) fail_validation("torus needs L >= 1");
  Box box;
  box.shape.assign(d, 2 * L);
  box.origin.assign(d, -L + 1);
  box.boundary = Boundary::periodic_torus;
  return box;
}

int Box::n_sites() const {
  int n = 1;
  for (int s : shape) n *= s;
  return n;
}

Site Box::coord(int index) const {
  const int d = dim();
  Site c(d);
  for (int i = d - 1; i >= 0; --i) {
    c[i] = origin[i] + index % shape[i];
    index /= shape[i];
  }
  return c;
}

int Box::index_of(std::span<const int> coord) const {
  const int d = dim();
  int idx = 0;
  for (int i = 0; i < d; ++i) {
    const int c = coord[i] - origin[i];
    if (c < 0 || c >= shape[i]) return -1;
    idx = idx * shape[i] + c;
  }
  return idx;
}

double DiscreteAction::total(std::span<const double> x) const {
  const auto& k = simd::active();
  const double kin = mass / (2.0 * eps);
  double s = 0.0;
  for (int l = 0; l < n_sites; ++l) {
    const double* loop = x.data() + static_cast<std::size_t>(l) * P;
    s += kin * k.sum_sq_diff_periodic(loop, P);
    s += eps * 0.5 * rigidity * k.sum_sq(loop, P);
    const auto& pot = site_potentials[l];
    if (!pot.even_coeffs.empty() || pot.field != 0.0)
      s += eps * k.sum_even_poly(loop, P, pot.even_coeffs.data(), pot.even_coeffs.size(),
                                 pot.field);
  }
  for (const auto& pr : pairs) {
    s -= eps * pr.j *
         k.dot(x.data() + static_cast<std::size_t>(pr.s1) * P,
               x.data() + static_cast<std::size_t>(pr.s2) * P, P);
  }
  if (!boundary_field.empty()) {
    for (int l = 0; l < n_sites; ++l)
      s -= eps * k.dot(boundary_field[l].data(), x.data() + static_cast<std::size_t>(l) * P, P);
  }
  return s;
}

bool DiscreteAction::ferromagnetic() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const Pair& p) { return p.j >= 0.0; });
}

namespace {

void enumerate_neighborhood(int d, int radius, const std::function<void(const Site&)>& fn) {
  Site off(d, -radius);
  while (true) {
    fn(off);
    int i = d - 1;
    for (; i >= 0; --i) {
      if (off[i] < radius) {
        ++off[i];
        break;
      }
      off[i] = -radius;
    }
    if (i < 0) break;
  }
}

}  // namespace

DiscreteAction build_action(const ModelSpec& spec, const Box& box, int P,
                            const BoundaryConfig& xi) {
  if (P < 2) fail_validation("loop discretization needs P >= 2 slices");
  validate_structure(spec);
  if (box.dim() != spec.d) fail_validation("box dimension != model dimension");
  if (box.boundary == Box::Boundary::periodic_torus)
    fail_validation("use build_periodic_action for torus boxes");

  DiscreteAction act;
  act.box = box;
  act.n_sites = box.n_sites();
  act.P = P;
  act.beta = spec.beta;
  act.eps = spec.beta / P;
  act.mass = spec.mass;
  act.rigidity = spec.rigidity;

  act.site_potentials.reserve(act.n_sites);
  for (int i = 0; i < act.n_sites; ++i) act.site_potentials.push_back(spec.potential_at(box.coord(i)));

  // in-box couplings, each unordered pair once
  for (int i = 0; i < act.n_sites; ++i) {
    const Site a = box.coord(i);
    for (int j = i + 1; j < act.n_sites; ++j) {
      const Site b = box.coord(j);
      const double jv = spec.couplings.entry(a, b, spec.d);
      if (jv != 0.0) act.pairs.push_back({i, j, jv});
    }
  }

  // boundary field from xi; every nonzero coupling leaving the box must be
  // covered (decaying kinds are cut at the documented tail radius)
  if (box.boundary == Box::Boundary::external) {
    const int radius = static_cast<int>(std::ceil(spec.couplings.reach(spec.d, 1e-12)));
    act.boundary_field.assign(act.n_sites, std::vector<double>(P, 0.0));
    bool any = false;
    for (int i = 0; i < act.n_sites; ++i) {
      const Site a = box.coord(i);
      enumerate_neighborhood(spec.d, radius, [&](const Site& off) {
        Site b(spec.d);
        for (int k = 0; k < spec.d; ++k) b[k] = a[k] + off[k];
        if (box.index_of(b) >= 0) return;
        const double jv = spec.couplings.entry(a, b, spec.d);
        if (jv == 0.0) return;
        auto it = xi.values.find(b);
        if (it == xi.values.end())
          fail_validation("nonzero coupling escapes the provided xi neighborhood");
        const auto& vals = it->second;
        if (vals.size() != 1 && static_cast<int>(vals.size()) != P)
          fail_validation("xi loop values must have 1 or P entries");
        for (int t = 0; t < P; ++t)
          act.boundary_field[i][t] += jv * (vals.size() == 1 ? vals[0] : vals[t]);
        any = true;
      });
    }
    if (!any) act.boundary_field.clear();
  }
  return act;
}

DiscreteAction build_periodic_action(const ModelSpec& spec, int L, int P) {
  if (P < 2) fail_validation("loop discretization needs P >= 2 slices");
  if (!spec.translation_invariant())
    fail_validation("periodic action needs a translation-invariant model");
  if (spec.couplings.kind != DynamicalMatrix::Kind::nearest_neighbor)
    fail_validation("periodic action is defined for nearest-neighbor couplings");
  validate_structure(spec);

  Box box = Box::torus(spec.d, L);
  DiscreteAction act;
  act.box = box;
  act.n_sites = box.n_sites();
  act.P = P;
  act.beta = spec.beta;
  act.eps = spec.beta / P;
  act.mass = spec.mass;
  act.rigidity = spec.rigidity;
  act.site_potentials.assign(act.n_sites, spec.potential);

  // torus couplings with direction multiplicity
  const int side = 2 * L;
  std::map<std::pair<int, int>, int> mult;
  for (int i = 0; i < act.n_sites; ++i) {
    const Site a = box.coord(i);
    for (int axis = 0; axis < spec.d; ++axis) {
      for (int dir : {-1, +1}) {
        Site b = a;
        int c = b[axis] + dir - box.origin[axis];
        c = (c % side + side) % side;
        b[axis] = box.origin[axis] + c;
        const int j = box.index_of(b);
        if (j == i) continue;  // side-1 axis would self-couple; L >= 1 means side >= 2
        auto key = std::minmax(i, j);
        mult[{key.first, key.second}] += 1;
      }
    }
  }
  for (const auto& [key, count] : mult) {
    // each ordered direction counted from both endpoints; unordered pair
    // coupling is J * multiplicity with multiplicity = count/2
    act.pairs.push_back({key.first, key.second, spec.couplings.strength * (count / 2.0)});
  }
  return act;
}

Eigen::MatrixXd free_covariance(double m, double a, double beta, int P) {
  if (P < 2) fail_validation("free covariance needs P >= 2");
  if (m <= 0.0 || a <= 0.0 || beta <= 0.0) fail_validation("m, a, beta must be positive");
  const double eps = beta / P;
  Eigen::MatrixXd cov(P, P);
  std::vector<double> q(P);
  for (int k = 0; k < P; ++k) {
    const double s = std::sin(M_PI * k / P);
    q[k] = 4.0 * m / eps * s * s + eps * a;
  }
  for (int i = 0; i < P; ++i) {
    for (int j = i; j < P; ++j) {
      double c = 0.0;
      for (int k = 0; k < P; ++k) c += std::cos(2.0 * M_PI * k * (i - j) / P) / q[k];
      cov(i, j) = cov(j, i) = c / P;
    }
  }
  return cov;
}

std::vector<double> free_covariance_dispersion(double m, double a, double beta, int P) {
  if (P < 2) fail_validation("free covariance needs P >= 2");
  const double eps = beta / P;
  std::vector<double> lam(P);
  for (int k = 0; k < P; ++k) {
    const double s = std::sin(M_PI * k / P);
    lam[k] = m * (2.0 / eps) * (2.0 / eps) * s * s + a;
  }
  return lam;
}

QuadratureScheme QuadratureScheme::gauss_hermite(int q) {
  if (q < 2) fail_validation("quadrature needs q >= 2 nodes");
  if (q > 128) fail_validation("quadrature node count capped at 128");
  // Golub-Welsch on the Hermite Jacobi matrix
  std::vector<double> diag(q, 0.0), off(q - 1);
  for (int k = 1; k < q; ++k) off[k - 1] = std::sqrt(k / 2.0);
  std::vector<double> z(static_cast<std::size_t>(q) * q);
  lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', q, diag.data(), off.data(), z.data(), q);
  if (info != 0) fail_numeric("Gauss-Hermite node solve failed");
  QuadratureScheme s;
  s.q = q;
  s.nodes = diag;
  s.weights.resize(q);
  const double sqrt_pi = std::sqrt(M_PI);
  for (int k = 0; k < q; ++k) {
    const double v0 = z[static_cast<std::size_t>(k) * q];
    s.weights[k] = sqrt_pi * v0 * v0;
  }
  return s;
}

}  // namespace qac
