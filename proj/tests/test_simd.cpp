#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qac/simd/kernels.hpp"

using namespace qac::simd;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
  const Kernels* vec = avx2();
  if (vec == nullptr) {
    MESSAGE("AVX2 not available on this machine; scalar-only build path exercised");
    return;
  }
  const Kernels& ref = scalar();

  for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
    auto a = random_vec(n, 11 + n, 0.01, 6.0);
    auto b = random_vec(n, 23 + n, -2.0, 2.0);

    CHECK(close_rel(ref.sum_rsqrt_shifted(a.data(), n, 0.3),
                    vec->sum_rsqrt_shifted(a.data(), n, 0.3), 1e-13));
    CHECK(close_rel(ref.sum_coth_rsqrt(a.data(), n, 0.05, 1.7),
                    vec->sum_coth_rsqrt(a.data(), n, 0.05, 1.7), 1e-12));
    CHECK(close_rel(ref.dot(a.data(), b.data(), n), vec->dot(a.data(), b.data(), n), 1e-13));
    CHECK(close_rel(ref.sum_sq(b.data(), n), vec->sum_sq(b.data(), n), 1e-13));
    CHECK(close_rel(ref.sum_sq_diff_periodic(b.data(), n), vec->sum_sq_diff_periodic(b.data(), n),
                    1e-13));
    const double coeffs[3] = {-1.0, 0.5, 0.25};
    CHECK(close_rel(ref.sum_even_poly(b.data(), n, coeffs, 3, 0.3),
                    vec->sum_even_poly(b.data(), n, coeffs, 3, 0.3), 1e-12));
  }
}

TEST_CASE("coth kernel saturates and matches libm") {
  const Kernels& ref = scalar();
  // large arguments: coth -> 1, so the kernel tends to sum 1/sqrt(v)
  std::vector<double> e{400.0, 900.0};
  const double got = ref.sum_coth_rsqrt(e.data(), e.size(), 0.0, 5.0);
  const double want = 1.0 / 20.0 + 1.0 / 30.0;
  CHECK(close_rel(got, want, 1e-14));

  const Kernels* vec = avx2();
  if (vec) CHECK(close_rel(vec->sum_coth_rsqrt(e.data(), e.size(), 0.0, 5.0), want, 1e-13));
}

TEST_CASE("kernel values match direct formulas") {
  const Kernels& k = active();
  std::vector<double> x{0.5, -1.0, 2.0, 0.0, 1.5};
  double kin = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[(i + 1) % x.size()] - x[i];
    kin += d * d;
  }
  CHECK(k.sum_sq_diff_periodic(x.data(), x.size()) == doctest::Approx(kin).epsilon(1e-15));

  const double c[2] = {-2.0, 1.0};  // V = x^4 - 2x^2 - 0.7x
  double pot = 0.0;
  for (double v : x) pot += v * v * v * v - 2.0 * v * v - 0.7 * v;
  CHECK(k.sum_even_poly(x.data(), x.size(), c, 2, 0.7) == doctest::Approx(pot).epsilon(1e-14));
}

TEST_CASE("force-scalar override") {
  set_force_scalar(true);
  CHECK(std::string(active().name) == "scalar");
  set_force_scalar(false);
}
