#include <cmath>
#include <cstddef>

#include "qac/simd/kernels.hpp"

namespace qac::simd::detail {

namespace {

double k_sum_rsqrt_shifted(const double* e, std::size_t n, double shift) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += 1.0 / std::sqrt(e[i] + shift);
  return acc;
}

double coth_pos(double y) {
  // y > 0; coth(y) = 1 + 2/(e^{2y} - 1), saturates to 1 well before overflow
  if (y > 19.0) return 1.0;
  return 1.0 + 2.0 / (std::exp(2.0 * y) - 1.0);
}

double k_sum_coth_rsqrt(const double* e, std::size_t n, double shift, double b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt(e[i] + shift);
    acc += coth_pos(b * r) / r;
  }
  return acc;
}

double k_dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double k_sum_sq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double k_sum_sq_diff_periodic(const double* x, std::size_t n) {
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = x[i + 1] - x[i];
    acc += d * d;
  }
  const double d = x[0] - x[n - 1];
  return acc + d * d;
}

double k_sum_even_poly(const double* x, std::size_t n, const double* c,
                       std::size_t k, double h) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = x[i] * x[i];
    double v = 0.0;
    for (std::size_t s = k; s-- > 0;) v = v * t + c[s];
    acc += v * t - h * x[i];
  }
  return acc;
}

}  // namespace

const Kernels scalar_kernels = {
    k_sum_rsqrt_shifted, k_sum_coth_rsqrt,       k_dot,
    k_sum_sq,            k_sum_sq_diff_periodic, k_sum_even_poly,
    "scalar",
};

}  // namespace qac::simd::detail
