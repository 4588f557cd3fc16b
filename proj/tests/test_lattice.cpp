#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qac/lattice.hpp"

using namespace qac;

namespace {

ModelSpec quartic(int d, double j, double beta = 1.0) {
  ModelSpec s;
  s.d = d;
  s.mass = 1.0;
  s.rigidity = 1.0;
  s.beta = beta;
  s.potential.even_coeffs = {-0.5, 0.5};
  s.couplings = DynamicalMatrix::nearest_neighbor(j);
  return s;
}

ModelSpec harmonic(int d, double j, double beta = 1.0) {
  ModelSpec s = quartic(d, j, beta);
  s.potential.even_coeffs.clear();
  return s;
}

std::vector<double> random_config(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  std::vector<double> x(n);
  for (double& v : x) v = d(gen);
  return x;
}

}  // namespace

TEST_CASE("box enumeration is row-major and invertible") {
  Box box = Box::rectangular({2, 3});
  CHECK(box.n_sites() == 6);
  for (int i = 0; i < box.n_sites(); ++i) CHECK(box.index_of(box.coord(i)) == i);
  CHECK(box.coord(0) == Site{0, 0});
  CHECK(box.coord(1) == Site{0, 1});  // last axis fastest
  CHECK(box.coord(3) == Site{1, 0});
  CHECK(box.index_of(Site{2, 0}) == -1);
}

TEST_CASE("torus boxes follow (-L, L]^d") {
  Box t = Box::torus(2, 2);
  CHECK(t.n_sites() == 16);
  CHECK(t.coord(0) == Site{-1, -1});
  CHECK(t.index_of(Site{2, 2}) == 15);
}

TEST_CASE("zero configuration has zero action") {
  auto act = build_action(quartic(1, 0.4), Box::rectangular({2}), 4);
  std::vector<double> x(act.n_sites * act.P, 0.0);
  CHECK(act.total(x) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("J = 0 action decouples into one-oscillator Trotter actions") {
  auto pair = build_action(quartic(1, 0.0), Box::rectangular({2}), 3);
  auto single = build_action(quartic(1, 0.0), Box::rectangular({1}), 3);
  auto x = random_config(pair.n_sites * pair.P, 7);
  const std::vector<double> x0(x.begin(), x.begin() + 3);
  const std::vector<double> x1(x.begin() + 3, x.end());
  CHECK(pair.total(x) == doctest::Approx(single.total(x0) + single.total(x1)).epsilon(1e-13));
}

TEST_CASE("constant-in-time harmonic configuration reduces to the classical form") {
  const double beta = 1.7, j = 0.3;
  auto act = build_action(harmonic(1, j, beta), Box::rectangular({3}), 8);
  std::vector<double> x(act.n_sites * act.P);
  const double vals[3] = {0.7, -0.4, 1.1};
  for (int l = 0; l < 3; ++l)
    for (int t = 0; t < 8; ++t) x[l * 8 + t] = vals[l];
  double expect = 0.0;
  for (double v : vals) expect += beta * 0.5 * v * v;
  expect -= beta * j * (vals[0] * vals[1] + vals[1] * vals[2]);
  CHECK(act.total(x) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("P = 1 is rejected") {
  CHECK_THROWS_AS(build_action(quartic(1, 0.0), Box::rectangular({1}), 1), Error);
}

TEST_CASE("external boundary folds xi into a linear field") {
  BoundaryConfig xi;
  xi.set_constant({-1}, 0.5);
  xi.set_constant({2}, -0.25);
  Box box = Box::rectangular({2}, Box::Boundary::external);
  auto act = build_action(quartic(1, 0.6), box, 2, xi);
  REQUIRE(act.has_boundary_field());
  CHECK(act.boundary_field[0][0] == doctest::Approx(0.6 * 0.5));
  CHECK(act.boundary_field[1][0] == doctest::Approx(0.6 * -0.25));

  // a coupling reaching outside the provided neighborhood is an error
  BoundaryConfig partial;
  partial.set_constant({-1}, 0.5);
  CHECK_THROWS_AS(build_action(quartic(1, 0.6), box, 2, partial), Error);
}

TEST_CASE("torus neighbor structure") {
  // L = 1, d = 1: two sites, single doubled bond
  auto ring2 = build_periodic_action(quartic(1, 0.5), 1, 2);
  REQUIRE(ring2.pairs.size() == 1);
  CHECK(ring2.pairs[0].j == doctest::Approx(1.0));  // 2 J

  // L = 2, d = 2: 16 sites, 4 distinct neighbors each
  auto torus = build_periodic_action(quartic(2, 0.5), 2, 2);
  CHECK(torus.n_sites == 16);
  CHECK(torus.pairs.size() == 32);  // 16 * 4 / 2
  for (const auto& p : torus.pairs) CHECK(p.j == doctest::Approx(0.5));
}

TEST_CASE("torus action is invariant under cyclic site shifts") {
  auto act = build_periodic_action(quartic(1, 0.45, 1.3), 2, 3);  // 4-site ring
  auto x = random_config(act.n_sites * act.P, 21);
  std::vector<double> shifted(x.size());
  const int side = 4;
  for (int l = 0; l < side; ++l)
    for (int t = 0; t < act.P; ++t)
      shifted[((l + 1) % side) * act.P + t] = x[l * act.P + t];
  CHECK(act.total(x) == doctest::Approx(act.total(shifted)).epsilon(1e-12));
}

TEST_CASE("periodic action needs translation invariance and NN couplings") {
  ModelSpec s = quartic(1, 0.5);
  s.site_overrides[Site{0}] = s.potential;
  CHECK_THROWS_AS(build_periodic_action(s, 2, 4), Error);
  ModelSpec e = quartic(1, 0.5);
  e.couplings = DynamicalMatrix::exponential_decay(0.5, 1.0);
  CHECK_THROWS_AS(build_periodic_action(e, 2, 4), Error);
}

TEST_CASE("Gauss-Hermite nodes and weights") {
  for (int q : {2, 8, 24, 48}) {
    auto s = QuadratureScheme::gauss_hermite(q);
    double sum = 0.0;
    for (double w : s.weights) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(std::abs(sum - std::sqrt(M_PI)) < 1e-12);
    // symmetry of the node set
    for (int i = 0; i < q; ++i)
      CHECK(s.nodes[i] == doctest::Approx(-s.nodes[q - 1 - i]).epsilon(1e-12));
  }
  // polynomial exactness: \int t^4 e^{-t^2} = 3 sqrt(pi)/4
  auto s = QuadratureScheme::gauss_hermite(6);
  double m4 = 0.0;
  for (int i = 0; i < s.q; ++i) m4 += s.weights[i] * std::pow(s.nodes[i], 4);
  CHECK(m4 == doctest::Approx(0.75 * std::sqrt(M_PI)).epsilon(1e-13));
}

TEST_CASE("free covariance dispersion") {
  // zero mode unaffected by discretization
  for (int P : {2, 8, 64}) {
    auto lam = free_covariance_dispersion(1.0, 2.5, 1.0, P);
    CHECK(lam[0] == doctest::Approx(2.5).epsilon(1e-15));
  }
  // P = 64 within 1% of the continuum lambda_1 = m (2 pi / beta)^2 + a
  auto lam = free_covariance_dispersion(1.0, 1.0, 1.0, 64);
  const double cont = 4.0 * M_PI * M_PI + 1.0;
  CHECK(std::abs(1.0 / lam[1] - 1.0 / cont) / (1.0 / cont) < 0.01);

  // covariance matrix: symmetric, Toeplitz-circulant, eigenvalue relation
  const int P = 8;
  auto cov = free_covariance(1.0, 1.0, 2.0, P);
  const double eps = 2.0 / P;
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) {
      CHECK(cov(i, j) == doctest::Approx(cov(j, i)).epsilon(1e-12));
      CHECK(cov(i, j) == doctest::Approx(cov((i + 1) % P, (j + 1) % P)).epsilon(1e-12));
    }
  auto disp = free_covariance_dispersion(1.0, 1.0, 2.0, P);
  // Fourier eigenvalue of the covariance is 1/(eps lambda_k)
  double eig0 = 0.0;
  for (int j = 0; j < P; ++j) eig0 += cov(0, j);
  CHECK(eig0 == doctest::Approx(1.0 / (eps * disp[0])).epsilon(1e-12));

  // large rigidity kills the covariance
  auto tight = free_covariance(1.0, 1e6, 1.0, 8);
  CHECK(std::abs(tight(0, 0)) < 1e-5);
  CHECK(std::abs(tight(0, 3)) < 1e-5);
}
