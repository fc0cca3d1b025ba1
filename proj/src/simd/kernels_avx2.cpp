#include <immintrin.h>

#include "kernels_internal.hpp"

namespace vahf::simd::avx2 {
namespace {

template <typename T>
struct Vec;

template <>
struct Vec<float> {
  using reg = __m256;
  static constexpr int width = 8;
  static reg zero() { return _mm256_setzero_ps(); }
  static reg load(const float* p) { return _mm256_loadu_ps(p); }
  static void store(float* p, reg v) { _mm256_storeu_ps(p, v); }
  static reg set1(float v) { return _mm256_set1_ps(v); }
  static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_ps(a, b, c); }
  static reg add(reg a, reg b) { return _mm256_add_ps(a, b); }
  static float hsum(reg v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 sh = _mm_movehdup_ps(lo);
    __m128 s = _mm_add_ps(lo, sh);
    sh = _mm_movehl_ps(sh, s);
    s = _mm_add_ss(s, sh);
    return _mm_cvtss_f32(s);
  }
};

template <>
struct Vec<double> {
  using reg = __m256d;
  static constexpr int width = 4;
  static reg zero() { return _mm256_setzero_pd(); }
  static reg load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, reg v) { _mm256_storeu_pd(p, v); }
  static reg set1(double v) { return _mm256_set1_pd(v); }
  static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_pd(a, b, c); }
  static reg add(reg a, reg b) { return _mm256_add_pd(a, b); }
  static double hsum(reg v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d h = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, h));
  }
};

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  using V = Vec<T>;
  constexpr std::size_t w = V::width;
  auto s0 = V::zero(), s1 = V::zero(), s2 = V::zero(), s3 = V::zero();
  std::size_t i = 0;
  for (; i + 4 * w <= n; i += 4 * w) {
    s0 = V::fmadd(V::load(a + i), V::load(b + i), s0);
    s1 = V::fmadd(V::load(a + i + w), V::load(b + i + w), s1);
    s2 = V::fmadd(V::load(a + i + 2 * w), V::load(b + i + 2 * w), s2);
    s3 = V::fmadd(V::load(a + i + 3 * w), V::load(b + i + 3 * w), s3);
  }
  for (; i + w <= n; i += w) s0 = V::fmadd(V::load(a + i), V::load(b + i), s0);
  T acc = V::hsum(V::add(V::add(s0, s1), V::add(s2, s3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
  using V = Vec<T>;
  constexpr std::size_t w = V::width;
  const auto va = V::set1(alpha);
  std::size_t i = 0;
  for (; i + 2 * w <= n; i += 2 * w) {
    V::store(y + i, V::fmadd(va, V::load(x + i), V::load(y + i)));
    V::store(y + i + w, V::fmadd(va, V::load(x + i + w), V::load(y + i + w)));
  }
  for (; i + w <= n; i += w) V::store(y + i, V::fmadd(va, V::load(x + i), V::load(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// C[m x n] += alpha * A[m x k] * B[k x n], all row-major and dense in k for A.
template <typename T>
void gemm_nn(int m, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb, T* c, int ldc) {
  using V = Vec<T>;
  constexpr int w = V::width;
  constexpr int nr = 2 * w;
  constexpr int mr = 4;
  const auto valpha = V::set1(alpha);
  int j = 0;
  for (; j + nr <= n; j += nr) {
    int i = 0;
    for (; i + mr <= m; i += mr) {
      typename V::reg acc[mr][2];
      for (int r = 0; r < mr; ++r) acc[r][0] = acc[r][1] = V::zero();
      const T* a0 = a + static_cast<std::size_t>(i) * lda;
      for (int p = 0; p < k; ++p) {
        const T* bp = b + static_cast<std::size_t>(p) * ldb + j;
        const auto b0 = V::load(bp);
        const auto b1 = V::load(bp + w);
        for (int r = 0; r < mr; ++r) {
          const auto ar = V::set1(a0[static_cast<std::size_t>(r) * lda + p]);
          acc[r][0] = V::fmadd(ar, b0, acc[r][0]);
          acc[r][1] = V::fmadd(ar, b1, acc[r][1]);
        }
      }
      for (int r = 0; r < mr; ++r) {
        T* cr = c + static_cast<std::size_t>(i + r) * ldc + j;
        V::store(cr, V::fmadd(valpha, acc[r][0], V::load(cr)));
        V::store(cr + w, V::fmadd(valpha, acc[r][1], V::load(cr + w)));
      }
    }
    for (; i < m; ++i) {
      auto acc0 = V::zero(), acc1 = V::zero();
      const T* ai = a + static_cast<std::size_t>(i) * lda;
      for (int p = 0; p < k; ++p) {
        const T* bp = b + static_cast<std::size_t>(p) * ldb + j;
        const auto ar = V::set1(ai[p]);
        acc0 = V::fmadd(ar, V::load(bp), acc0);
        acc1 = V::fmadd(ar, V::load(bp + w), acc1);
      }
      T* cr = c + static_cast<std::size_t>(i) * ldc + j;
      V::store(cr, V::fmadd(valpha, acc0, V::load(cr)));
      V::store(cr + w, V::fmadd(valpha, acc1, V::load(cr + w)));
    }
  }
  if (j < n) {
    const int rem = n - j;
    for (int i = 0; i < m; ++i) {
      const T* ai = a + static_cast<std::size_t>(i) * lda;
      T* cr = c + static_cast<std::size_t>(i) * ldc + j;
      for (int p = 0; p < k; ++p) {
        const T s = alpha * ai[p];
        const T* bp = b + static_cast<std::size_t>(p) * ldb + j;
        for (int q = 0; q < rem; ++q) cr[q] += s * bp[q];
      }
    }
  }
}

// C[m x n] += alpha * A[m x k] * B[n x k]^T: blocked dot products. Column
// blocks outermost so each group of B rows stays cached across all of A.
template <typename T>
void gemm_nt(int m, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb, T* c, int ldc) {
  using V = Vec<T>;
  constexpr int w = V::width;
  constexpr int bs = 4;
  const int kv = k - k % w;
  int j = 0;
  for (; j + bs <= n; j += bs) {
    int i = 0;
    for (; i + bs <= m; i += bs) {
      typename V::reg acc[bs][bs];
      for (auto& row : acc)
        for (auto& v : row) v = V::zero();
      for (int p = 0; p < kv; p += w) {
        typename V::reg av[bs], bv[bs];
        for (int r = 0; r < bs; ++r) av[r] = V::load(a + static_cast<std::size_t>(i + r) * lda + p);
        for (int s = 0; s < bs; ++s) bv[s] = V::load(b + static_cast<std::size_t>(j + s) * ldb + p);
        for (int r = 0; r < bs; ++r)
          for (int s = 0; s < bs; ++s) acc[r][s] = V::fmadd(av[r], bv[s], acc[r][s]);
      }
      for (int r = 0; r < bs; ++r) {
        const T* ar = a + static_cast<std::size_t>(i + r) * lda;
        for (int s = 0; s < bs; ++s) {
          const T* bsr = b + static_cast<std::size_t>(j + s) * ldb;
          T v = V::hsum(acc[r][s]);
          for (int p = kv; p < k; ++p) v += ar[p] * bsr[p];
          c[static_cast<std::size_t>(i + r) * ldc + j + s] += alpha * v;
        }
      }
    }
    for (; i < m; ++i) {
      const T* ai = a + static_cast<std::size_t>(i) * lda;
      for (int s = 0; s < bs; ++s)
        c[static_cast<std::size_t>(i) * ldc + j + s] +=
            alpha * dot(ai, b + static_cast<std::size_t>(j + s) * ldb, static_cast<std::size_t>(k));
    }
  }
  for (; j < n; ++j) {
    const T* bj = b + static_cast<std::size_t>(j) * ldb;
    for (int i = 0; i < m; ++i)
      c[static_cast<std::size_t>(i) * ldc + j] += alpha * dot(a + static_cast<std::size_t>(i) * lda, bj, static_cast<std::size_t>(k));
  }
}

template <typename T>
void gemm(Trans ta, Trans tb, int m, int n, int k, T alpha, const T* a, int lda, const T* b,
          int ldb, T beta, T* c, int ldc) {
  detail::scale_output(m, n, beta, c, ldc);
  if (m == 0 || n == 0 || k == 0) return;
  std::vector<T> pa;
  if (ta == Trans::Yes) {
    detail::pack(ta, m, k, a, lda, pa);
    a = pa.data();
    lda = k;
  }
  if (tb == Trans::Yes) {
    gemm_nt(m, n, k, alpha, a, lda, b, ldb, c, ldc);
  } else {
    gemm_nn(m, n, k, alpha, a, lda, b, ldb, c, ldc);
  }
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{
      Backend::Avx2,
      KernelSet<float>{&dot<float>, &axpy<float>, &gemm<float>},
      KernelSet<double>{&dot<double>, &axpy<double>, &gemm<double>},
  };
  return t;
}

}  // namespace vahf::simd::avx2
