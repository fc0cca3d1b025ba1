#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace vahf::simd {
namespace {

bool cpu_has_avx2_fma() {
#if defined(VAHF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* forced = std::getenv("VAHF_SIMD");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return scalar::table();
  if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar::table();
}

}  // namespace

const KernelTable& scalar_kernels() { return scalar::table(); }

const KernelTable* avx2_kernels() {
#if defined(VAHF_HAVE_AVX2)
  static const bool ok = cpu_has_avx2_fma();
  return ok ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& t = select();
  return t;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

namespace detail {
template <>
const KernelSet<float>& active_set<float>() {
  return active_kernels().f32;
}
template <>
const KernelSet<double>& active_set<double>() {
  return active_kernels().f64;
}
}  // namespace detail

}  // namespace vahf::simd
