#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qac/model.hpp"

using namespace qac;

namespace {

ModelSpec quartic_nn(int d, double j) {
  ModelSpec s;
  s.d = d;
  s.mass = 1.0;
  s.rigidity = 1.0;
  s.beta = 1.0;
  s.potential.even_coeffs = {-2.0, 1.0};  // x^4 - 2 x^2
  s.couplings = DynamicalMatrix::nearest_neighbor(j);
  return s;
}

}  // namespace

TEST_CASE("validate_model accepts the quartic nearest-neighbor crystal") {
  const auto rep = validate_model(quartic_nn(2, 1.0));
  CHECK(rep.passes);
  CHECK(rep.diagnostics.empty());
  CHECK(rep.lower_r == 2);
  CHECK(rep.lower_A > 0.0);
  // constructive lower bound: A x^{2r} + B <= V on a sample of points
  ModelSpec s = quartic_nn(2, 1.0);
  for (double x = -6.0; x <= 6.0; x += 0.05)
    CHECK(rep.lower_A * std::pow(x * x, rep.lower_r) + rep.lower_B <= s.potential(x) + 1e-12);
  CHECK(rep.j_hat_zero == doctest::Approx(4.0));  // 2 d J
}

TEST_CASE("harmonic crystal fails the lower bound of assumption (3)") {
  ModelSpec s = quartic_nn(2, 1.0);
  s.potential.even_coeffs.clear();  // V = 0
  const auto rep = validate_model(s);
  CHECK_FALSE(rep.passes);
  CHECK_FALSE(rep.diagnostics.empty());
}

TEST_CASE("nonzero diagonal coupling entry is rejected") {
  ModelSpec s = quartic_nn(1, 0.0);
  s.couplings = DynamicalMatrix::finite_range({{Site{0}, 1.0}});
  const auto rep = validate_model(s);
  CHECK_FALSE(rep.passes);
}

TEST_CASE("negative mass and non-finite coefficients are rejected") {
  ModelSpec s = quartic_nn(1, 0.5);
  s.mass = -1.0;
  CHECK_FALSE(validate_model(s).passes);
  s = quartic_nn(1, 0.5);
  s.potential.even_coeffs[1] = std::nan("");
  CHECK_FALSE(validate_model(s).passes);
}

TEST_CASE("coupling entries are symmetric with zero diagonal") {
  std::mt19937_64 gen(5);
  auto rand_site = [&](int d) {
    Site v(d);
    for (int& c : v) c = static_cast<int>(gen() % 9) - 4;
    return v;
  };
  for (auto kind : {DynamicalMatrix::nearest_neighbor(0.7),
                    DynamicalMatrix::exponential_decay(0.5, 1.2),
                    DynamicalMatrix::polynomial_decay(0.5, 2.5),
                    DynamicalMatrix::finite_range({{Site{1, 0}, 0.3}, {Site{1, 1}, 0.1}})}) {
    for (int rep = 0; rep < 200; ++rep) {
      const Site a = rand_site(2), b = rand_site(2);
      CHECK(kind.entry(a, b, 2) == kind.entry(b, a, 2));
      CHECK(kind.entry(a, a, 2) == 0.0);
    }
  }
}

TEST_CASE("weight closed forms") {
  WeightFamily we{WeightFamily::Kind::exponential, 1.0, 1.0, 1};
  CHECK(weight(we, Site{3}, Site{3}) == 1.0);
  CHECK(weight(we, Site{0}, Site{2}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

  WeightFamily wp{WeightFamily::Kind::polynomial, 2.0, 1.0, 1};
  CHECK(weight(wp, Site{0}, Site{1}) == doctest::Approx(0.25).epsilon(1e-15));

  WeightFamily bad = we;
  bad.alpha = -0.5;
  CHECK_THROWS_AS(weight(bad, Site{0}, Site{1}), Error);
  WeightFamily badp = wp;
  badp.alpha = 0.5;  // polynomial family needs alpha > 1
  CHECK_THROWS_AS(weight(badp, Site{0}, Site{1}), Error);
}

TEST_CASE("weight triangle inequality on random triples") {
  std::mt19937_64 gen(99);
  auto rand_site = [&](int d) {
    Site v(d);
    for (int& c : v) c = static_cast<int>(gen() % 21) - 10;
    return v;
  };
  for (int d : {1, 3}) {
    WeightFamily we{WeightFamily::Kind::exponential, 0.8, 1.0, d};
    WeightFamily wp{WeightFamily::Kind::polynomial, 1.5, 0.7, d};
    for (int i = 0; i < 1000; ++i) {
      const Site a = rand_site(d), b = rand_site(d), c = rand_site(d);
      for (const auto& w : {we, wp})
        CHECK(weight(w, a, b) * weight(w, b, c) <= weight(w, a, c) + 1e-15);
    }
  }
}

TEST_CASE("weights decrease in alpha") {
  WeightFamily w{WeightFamily::Kind::exponential, 0.5, 1.0, 2};
  WeightFamily w2 = w;
  w2.alpha = 1.5;
  const Site a{0, 0}, b{3, -2};
  CHECK(weight(w2, a, b) <= weight(w, a, b));
}

TEST_CASE("j_hat_alpha closed form for nearest neighbors") {
  for (int d : {1, 2, 3}) {
    ModelSpec s = quartic_nn(d, 0.7);
    WeightFamily w{WeightFamily::Kind::exponential, 0.9, 1.0, d};
    CHECK(j_hat_alpha(s, w) == doctest::Approx(2.0 * d * 0.7 * std::exp(0.9)).epsilon(1e-14));
    // alpha -> 0+ sweep approaches J_hat_0 = 2 d J (eq. 26m)
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {0.5, 0.25, 0.125, 0.0625}) {
      w.alpha = alpha;
      const double ja = j_hat_alpha(s, w);
      CHECK(ja < prev);
      CHECK(ja >= j_hat_zero(s));
      prev = ja;
    }
    w.alpha = 0.0078125;
    CHECK(j_hat_alpha(s, w) == doctest::Approx(j_hat_zero(s)).epsilon(1e-2));
  }
}

TEST_CASE("j_hat_zero for decaying couplings with tail control") {
  ModelSpec s = quartic_nn(1, 0.0);
  s.couplings = DynamicalMatrix::exponential_decay(1.0, 1.0);
  // sum over Z \ {0} of e^{-|n|} = 2 e^{-1}/(1 - e^{-1})
  const double expect = 2.0 * std::exp(-1.0) / (1.0 - std::exp(-1.0));
  CHECK(j_hat_zero(s) == doctest::Approx(expect).epsilon(1e-10));

  s.couplings = DynamicalMatrix::polynomial_decay(1.0, 2.0);  // (1+|n|)^{-3} in d=1
  double direct = 0.0;
  for (int n = 1; n < 2000000; ++n) direct += 2.0 * std::pow(1.0 + n, -3.0);
  CHECK(j_hat_zero(s) == doctest::Approx(direct).epsilon(1e-6));

  ModelSpec z = quartic_nn(3, 0.0);
  CHECK(j_hat_zero(z) == 0.0);
}

TEST_CASE("j_hat_alpha monotone increasing in alpha and divergence reported") {
  ModelSpec s = quartic_nn(2, 0.0);
  s.couplings = DynamicalMatrix::exponential_decay(0.4, 2.0);
  WeightFamily w{WeightFamily::Kind::exponential, 0.2, 1.0, 2};
  double prev = 0.0;
  for (double alpha : {0.2, 0.5, 1.0, 1.5}) {
    w.alpha = alpha;
    const double ja = j_hat_alpha(s, w);
    CHECK(ja > prev);
    prev = ja;
  }
  w.alpha = 2.5;  // beyond the decay rate
  CHECK_THROWS_AS(j_hat_alpha(s, w), Error);

  // exponential weights against polynomial decay never converge
  s.couplings = DynamicalMatrix::polynomial_decay(0.4, 3.0);
  w.alpha = 0.1;
  CHECK_THROWS_AS(j_hat_alpha(s, w), Error);
}

TEST_CASE("site-dependent potentials share a constructive envelope") {
  ModelSpec s = quartic_nn(1, 0.3);
  Potential deeper;
  deeper.even_coeffs = {-3.0, 2.0};
  s.site_overrides[Site{0}] = deeper;
  const auto rep = validate_model(s);
  CHECK(rep.passes);
  CHECK(rep.upper_env_coeffs[0] == doctest::Approx(-2.0));
  CHECK(rep.upper_env_coeffs[1] == doctest::Approx(2.0));
}
