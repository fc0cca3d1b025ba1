#include "vahf/dsp/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "vahf/common/error.hpp"

namespace vahf::dsp {
namespace {

struct FftPlan {
  std::vector<std::size_t> bitrev;
  // Per-stage twiddles laid out contiguously: stage of length len starts at
  // len/2 - 1 and holds exp(-2*pi*i*k/len), k < len/2.
  std::vector<std::complex<double>> twiddle;

  explicit FftPlan(std::size_t n) : bitrev(n), twiddle(n > 1 ? n - 1 : 0) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      bitrev[i] = j;
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        twiddle[len / 2 - 1 + k] =
            std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len));
      }
    }
  }
};

const FftPlan& plan_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::span<std::complex<double>> x, bool inverse) {
  const std::size_t n = x.size();
  require(n != 0 && (n & (n - 1)) == 0, "fft-size", "length must be a power of two");
  const FftPlan& plan = plan_for(n);
  for (std::size_t i = 1; i < n; ++i) {
    if (i < plan.bitrev[i]) std::swap(x[i], x[plan.bitrev[i]]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::complex<double>* tw = plan.twiddle.data() + half - 1;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Spelled out: std::complex operator* goes through the NaN-checking
        // libgcc path, which dominates large transforms.
        const auto w = tw[k];
        const double wr = w.real(), wi = inverse ? -w.imag() : w.imag();
        const auto b = x[i + k + half];
        const double vr = b.real() * wr - b.imag() * wi, vi = b.real() * wi + b.imag() * wr;
        const auto u = x[i + k];
        x[i + k] = {u.real() + vr, u.imag() + vi};
        x[i + k + half] = {u.real() - vr, u.imag() - vi};
      }
    }
  }
  if (inverse) {
    for (auto& v : x) v /= static_cast<double>(n);
  }
}

std::vector<double> rfft_magnitude(std::span<const double> x, std::size_t nfft) {
  require(nfft >= x.size(), "fft-size", "nfft shorter than input");
  std::vector<std::complex<double>> buf(nfft);
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  fft_inplace(buf);
  std::vector<double> mag(nfft / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

}  // namespace vahf::dsp
