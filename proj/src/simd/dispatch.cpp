#include <atomic>
#include <cstdlib>

#include "qac/simd/kernels.hpp"

namespace qac::simd {

namespace detail {
extern const Kernels scalar_kernels;
#if defined(__x86_64__) || defined(__i386__)
extern const Kernels avx2_kernels;
#endif
}  // namespace detail

namespace {

std::atomic<bool> g_force_scalar{false};

bool env_force_scalar() {
  const char* v = std::getenv("QAC_FORCE_SCALAR");
  return v != nullptr && v[0] != '\0' && v[0] != '0';
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace

const Kernels& scalar() { return detail::scalar_kernels; }

const Kernels* avx2() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::avx2_kernels : nullptr;
#else
  return nullptr;
#endif
}

void set_force_scalar(bool on) { g_force_scalar.store(on); }

const Kernels& active() {
  static const bool env_off = env_force_scalar();
  if (env_off || g_force_scalar.load()) return scalar();
  const Kernels* v = avx2();
  return v ? *v : scalar();
}

}  // namespace qac::simd
