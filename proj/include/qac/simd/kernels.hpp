#pragma once

#include <cstddef>

// Hot arithmetic loops used by the quadrature and Monte Carlo paths.
// Scalar reference implementations live in kernels_scalar.cpp; AVX2+FMA
// variants in kernels_avx2.cpp. Selection happens once at runtime via
// CPU feature detection and can be forced to scalar for testing.

namespace qac::simd {

struct Kernels {
  // sum_i 1/sqrt(e[i] + shift), all e[i] + shift > 0
  double (*sum_rsqrt_shifted)(const double* e, std::size_t n, double shift);
  // sum_i coth(b * sqrt(v)) / sqrt(v), v = e[i] + shift > 0, b > 0
  double (*sum_coth_rsqrt)(const double* e, std::size_t n, double shift, double b);
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i x[i]^2
  double (*sum_sq)(const double* x, std::size_t n);
  // sum_i (x[(i+1) mod n] - x[i])^2
  double (*sum_sq_diff_periodic)(const double* x, std::size_t n);
  // sum_i V(x[i]) for V(x) = sum_{s=1..k} c[s-1] * x^{2s} - h * x
  double (*sum_even_poly)(const double* x, std::size_t n, const double* c,
                          std::size_t k, double h);
  const char* name;
};

// Kernels chosen for this machine (scalar unless AVX2 is available).
const Kernels& active();

// Force the scalar path, e.g. for equivalence tests. Also honored at
// first use via the QAC_FORCE_SCALAR environment variable.
void set_force_scalar(bool on);

// Individual variants, for equivalence testing. avx2() returns nullptr
// when the binary or the CPU lacks AVX2 support.
const Kernels& scalar();
const Kernels* avx2();

}  // namespace qac::simd
