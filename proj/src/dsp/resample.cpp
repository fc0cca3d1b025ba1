#include "vahf/dsp/resample.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "vahf/common/error.hpp"
#include "vahf/simd/kernels.hpp"

namespace vahf::dsp {
namespace {

double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

constexpr int kZeroCrossings = 16;
constexpr double kBeta = 8.0;

// Polyphase branches stored reversed so each output sample is one dot product
// over a contiguous run of input samples.
struct Polyphase {
  long up = 1, down = 1;
  int taps_per_phase = 0;
  long half = 0;  // filter centre in upsampled samples
  std::vector<std::vector<float>> phases;
};

Polyphase design(long up, long down) {
  Polyphase p;
  p.up = up;
  p.down = down;
  const long factor = std::max(up, down);
  p.half = static_cast<long>(kZeroCrossings) * factor;
  const long len = 2 * p.half + 1;
  const double cutoff = 0.9 / (2.0 * static_cast<double>(factor));  // cycles per upsampled sample
  std::vector<double> h(static_cast<std::size_t>(len));
  const double i0b = bessel_i0(kBeta);
  for (long n = 0; n < len; ++n) {
    const double t = static_cast<double>(n - p.half);
    const double x = 2.0 * cutoff * t;
    const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = t / static_cast<double>(p.half);
    const double win = bessel_i0(kBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
    h[n] = 2.0 * cutoff * sinc * win * static_cast<double>(up);
  }
  p.taps_per_phase = static_cast<int>((len + up - 1) / up);
  p.phases.assign(static_cast<std::size_t>(up), std::vector<float>(static_cast<std::size_t>(p.taps_per_phase), 0.0f));
  for (long ph = 0; ph < up; ++ph) {
    // Taps h[ph + up * j]; reversed so index 0 pairs with the latest input.
    for (int j = 0; j < p.taps_per_phase; ++j) {
      const long idx = ph + up * j;
      if (idx < len) p.phases[ph][p.taps_per_phase - 1 - j] = static_cast<float>(h[idx]);
    }
  }
  return p;
}

const Polyphase& cached(long up, long down) {
  static std::mutex mu;
  static std::map<std::pair<long, long>, Polyphase> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({up, down});
  if (it == cache.end()) it = cache.emplace(std::make_pair(up, down), design(up, down)).first;
  return it->second;
}

}  // namespace

AudioSegment resample(const AudioSegment& seg, double target_rate) {
  require(seg.sample_rate > 0.0 && target_rate > 0.0, "invalid-argument", "rates must be positive");
  const long src = std::lround(seg.sample_rate);
  const long dst = std::lround(target_rate);
  require(std::abs(seg.sample_rate - src) < 1e-9 && std::abs(target_rate - dst) < 1e-9, "invalid-argument",
          "resample needs integral rates");
  AudioSegment out;
  out.sample_rate = target_rate;
  if (src == dst) {
    out.samples = seg.samples;
    return out;
  }
  const long g = std::gcd(src, dst);
  const long up = dst / g, down = src / g;
  const Polyphase& p = cached(up, down);

  const long n_in = static_cast<long>(seg.samples.size());
  const long n_out = (n_in * up + down - 1) / down;
  const int taps = p.taps_per_phase;
  // Zero-padded copy of the input so every dot product reads in bounds.
  const long pad = taps + 2;
  std::vector<float> x(static_cast<std::size_t>(n_in + 2 * pad), 0.0f);
  std::copy(seg.samples.begin(), seg.samples.end(), x.begin() + pad);

  out.samples.resize(static_cast<std::size_t>(n_out));
  for (long m = 0; m < n_out; ++m) {
    // y[m] = sum_n h[n] * xup[m*down + half - n]; xup nonzero at multiples of up.
    const long t = m * down + p.half;
    const long phase = t % up;
    const long newest = t / up;  // input index paired with h[phase]
    const long oldest = newest - (taps - 1);
    const float* xs = x.data() + (oldest + pad);
    out.samples[m] = simd::dot<float>({xs, static_cast<std::size_t>(taps)},
                                      {p.phases[phase].data(), static_cast<std::size_t>(taps)});
  }
  return out;
}

}  // namespace vahf::dsp
