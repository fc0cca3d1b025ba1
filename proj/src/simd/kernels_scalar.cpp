#include "kernels_internal.hpp"

namespace vahf::simd::scalar {
namespace {

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void gemm(Trans ta, Trans tb, int m, int n, int k, T alpha, const T* a, int lda, const T* b,
          int ldb, T beta, T* c, int ldc) {
  detail::scale_output(m, n, beta, c, ldc);
  if (m == 0 || n == 0 || k == 0) return;
  if (tb == Trans::Yes) {
    // C[i][j] += alpha * <row_i(op A), row_j(B)>
    std::vector<T> pa;
    const T* ap = a;
    int lda_p = lda;
    if (ta == Trans::Yes) {
      detail::pack(ta, m, k, a, lda, pa);
      ap = pa.data();
      lda_p = k;
    }
    for (int i = 0; i < m; ++i) {
      const T* ai = ap + static_cast<std::size_t>(i) * lda_p;
      T* ci = c + static_cast<std::size_t>(i) * ldc;
      for (int j = 0; j < n; ++j) ci[j] += alpha * dot(ai, b + static_cast<std::size_t>(j) * ldb, static_cast<std::size_t>(k));
    }
    return;
  }
  std::vector<T> pa;
  const T* ap = a;
  int lda_p = lda;
  if (ta == Trans::Yes) {
    detail::pack(ta, m, k, a, lda, pa);
    ap = pa.data();
    lda_p = k;
  }
  for (int i = 0; i < m; ++i) {
    T* ci = c + static_cast<std::size_t>(i) * ldc;
    const T* ai = ap + static_cast<std::size_t>(i) * lda_p;
    for (int p = 0; p < k; ++p) {
      const T s = alpha * ai[p];
      if (s == T(0)) continue;
      axpy(static_cast<std::size_t>(n), s, b + static_cast<std::size_t>(p) * ldb, ci);
    }
  }
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{
      Backend::Scalar,
      KernelSet<float>{&dot<float>, &axpy<float>, &gemm<float>},
      KernelSet<double>{&dot<double>, &axpy<double>, &gemm<double>},
  };
  return t;
}

}  // namespace vahf::simd::scalar
