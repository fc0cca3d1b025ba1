#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops used by the DSP front end and the neural layers.
// Each kernel has a portable reference implementation (namespace scalar) and,
// on x86-64, an AVX2+FMA variant. The variant is picked once at first use
// from CPUID; VAHF_SIMD=scalar in the environment forces the reference path.

namespace vahf::simd {

enum class Backend { Scalar, Avx2 };
enum class Trans { No, Yes };

template <typename T>
struct KernelSet {
  T (*dot)(const T* a, const T* b, std::size_t n);
  void (*axpy)(std::size_t n, T alpha, const T* x, T* y);
  /// Row-major C = alpha * op(A) * op(B) + beta * C with op(A): m x k,
  /// op(B): k x n. When beta == 0, C is overwritten without being read.
  void (*gemm)(Trans ta, Trans tb, int m, int n, int k, T alpha, const T* a, int lda,
               const T* b, int ldb, T beta, T* c, int ldc);
};

struct KernelTable {
  Backend backend;
  KernelSet<float> f32;
  KernelSet<double> f64;
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();
const KernelTable& active_kernels();
std::string_view backend_name(Backend b);

namespace detail {
template <typename T>
const KernelSet<T>& active_set();
}

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) {
  return detail::active_set<T>().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

template <typename T>
void axpy(T alpha, std::span<const T> x, std::span<T> y) {
  detail::active_set<T>().axpy(x.size() < y.size() ? x.size() : y.size(), alpha, x.data(), y.data());
}

template <typename T>
void gemm(Trans ta, Trans tb, int m, int n, int k, T alpha, const T* a, int lda, const T* b,
          int ldb, T beta, T* c, int ldc) {
  detail::active_set<T>().gemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

}  // namespace vahf::simd
