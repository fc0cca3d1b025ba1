#pragma once

#include <algorithm>
#include <vector>

#include "vahf/simd/kernels.hpp"

namespace vahf::simd {

namespace scalar {
const KernelTable& table();
}

#if defined(VAHF_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

namespace detail {

/// Copies op(A) (rows x cols) into a dense row-major buffer.
template <typename T>
void pack(Trans t, int rows, int cols, const T* src, int ld, std::vector<T>& out) {
  out.resize(static_cast<std::size_t>(rows) * cols);
  if (t == Trans::No) {
    for (int r = 0; r < rows; ++r) {
      std::copy_n(src + static_cast<std::size_t>(r) * ld, cols, out.data() + static_cast<std::size_t>(r) * cols);
    }
  } else {
    for (int c = 0; c < cols; ++c) {
      const T* row = src + static_cast<std::size_t>(c) * ld;
      for (int r = 0; r < rows; ++r) out[static_cast<std::size_t>(r) * cols + c] = row[r];
    }
  }
}

template <typename T>
void scale_output(int m, int n, T beta, T* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    T* row = c + static_cast<std::size_t>(i) * ldc;
    if (beta == T(0)) {
      std::fill_n(row, n, T(0));
    } else if (beta != T(1)) {
      for (int j = 0; j < n; ++j) row[j] *= beta;
    }
  }
}

}  // namespace detail
}  // namespace vahf::simd
