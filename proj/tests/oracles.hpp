#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's FFT, filter or DTW code.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

/// Naive O(N^2) DFT magnitude of bin k.
inline double dft_bin_magnitude(const std::vector<double>& x, std::size_t k) {
  std::complex<double> acc = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * i % x.size()) / n);
  }
  return std::abs(acc);
}

/// Full naive power spectrum (bins 0..N/2).
inline std::vector<double> dft_power(const std::vector<double>& x) {
  std::vector<double> p(x.size() / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = dft_bin_magnitude(x, k);
    p[k] = m * m;
  }
  return p;
}

/// Radix-2 recursive FFT kept separate from the library implementation.
inline void fft_rec(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  std::vector<std::complex<double>> even(n / 2), odd(n / 2);
  for (std::size_t i = 0; i < n / 2; ++i) {
    even[i] = a[2 * i];
    odd[i] = a[2 * i + 1];
  }
  fft_rec(even);
  fft_rec(odd);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const auto t = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)) * odd[k];
    a[k] = even[k] + t;
    a[k + n / 2] = even[k] - t;
  }
}

/// Energy of x in [lo_hz, hi_hz] from a power-of-two-length periodogram.
inline double band_energy(const std::vector<double>& x, double rate, double lo_hz, double hi_hz) {
  std::size_t n = 1;
  while (n * 2 <= x.size()) n *= 2;
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
  fft_rec(buf);
  double e = 0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(n);
    if (f >= lo_hz && f <= hi_hz) e += std::norm(buf[k]);
  }
  return e;
}

/// Minimum over every monotone (1,0)/(0,1)/(1,1) path, by exhaustive recursion.
inline double dtw_bruteforce(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                             const std::function<double(const std::vector<double>&, const std::vector<double>&)>& cost) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    acc += cost(a[i], b[j]);
    if (i + 1 == a.size() && j + 1 == b.size()) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < a.size()) walk(i + 1, j, acc);
    if (j + 1 < b.size()) walk(i, j + 1, acc);
    if (i + 1 < a.size() && j + 1 < b.size()) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best;
}

inline double rms(const std::vector<double>& x, std::size_t from = 0) {
  double e = 0;
  for (std::size_t i = from; i < x.size(); ++i) e += x[i] * x[i];
  return std::sqrt(e / static_cast<double>(x.size() - from));
}

/// Frequency of the largest periodogram bin of x[start, start+len), Hann
/// windowed and zero-padded to `nfft`, restricted to [lo_hz, hi_hz].
inline double peak_frequency(const std::vector<double>& x, std::size_t start, std::size_t len, std::size_t nfft,
                             double rate, double lo_hz = 0.0, double hi_hz = 1e30) {
  std::vector<std::complex<double>> buf(nfft);
  for (std::size_t i = 0; i < len; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
    buf[i] = x[start + i] * w;
  }
  fft_rec(buf);
  double best = -1, best_f = 0;
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(nfft);
    if (f < lo_hz || f > hi_hz) continue;
    if (std::norm(buf[k]) > best) best = std::norm(buf[k]), best_f = f;
  }
  return best_f;
}

}  // namespace oracle
