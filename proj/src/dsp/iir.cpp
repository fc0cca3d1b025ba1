#include "vahf/dsp/iir.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "vahf/common/error.hpp"

namespace vahf::dsp {

Sos butterworth(FilterKind kind, int order, double cutoff_hz, double sample_rate) {
  require(order >= 1, "invalid-argument", "order must be >= 1");
  require(sample_rate > 0.0 && cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0, "cutoff-out-of-range",
          std::to_string(cutoff_hz) + " Hz at fs=" + std::to_string(sample_rate));
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  const double k2 = k * k;
  Sos sos;
  for (int i = 0; i < order / 2; ++i) {
    // Conjugate analog pole pair: s^2 + s/Q + 1.
    const double inv_q = 2.0 * std::sin(std::numbers::pi * (2 * i + 1) / (2.0 * order));
    const double norm = 1.0 / (1.0 + k * inv_q + k2);
    Biquad bq;
    if (kind == FilterKind::Lowpass) {
      bq.b0 = k2 * norm;
      bq.b1 = 2.0 * bq.b0;
      bq.b2 = bq.b0;
    } else {
      bq.b0 = norm;
      bq.b1 = -2.0 * norm;
      bq.b2 = norm;
    }
    bq.a1 = 2.0 * (k2 - 1.0) * norm;
    bq.a2 = (1.0 - k * inv_q + k2) * norm;
    sos.push_back(bq);
  }
  if (order % 2 == 1) {
    const double norm = 1.0 / (1.0 + k);
    Biquad bq;
    if (kind == FilterKind::Lowpass) {
      bq.b0 = k * norm;
      bq.b1 = bq.b0;
    } else {
      bq.b0 = norm;
      bq.b1 = -norm;
    }
    bq.a1 = (k - 1.0) * norm;
    sos.push_back(bq);
  }
  return sos;
}

double magnitude_response(const Sos& sos, double freq_hz, double sample_rate) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const auto& s : sos) h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  return std::abs(h);
}

std::vector<double> sosfilt(const Sos& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : sos) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

void sosfilt_inplace(const Sos& sos, std::span<float> x) {
  // Sections run sample-interleaved in double so the float buffer is only
  // rounded once.
  std::vector<double> z1(sos.size(), 0.0), z2(sos.size(), 0.0);
  for (float& v : x) {
    double sig = v;
    for (std::size_t i = 0; i < sos.size(); ++i) {
      const Biquad& s = sos[i];
      const double out = s.b0 * sig + z1[i];
      z1[i] = s.b1 * sig - s.a1 * out + z2[i];
      z2[i] = s.b2 * sig - s.a2 * out;
      sig = out;
    }
    v = static_cast<float>(sig);
  }
}

namespace {
AudioSegment apply(const AudioSegment& seg, FilterKind kind, double cutoff_hz, int order) {
  const Sos sos = butterworth(kind, order, cutoff_hz, seg.sample_rate);
  AudioSegment out = seg;
  sosfilt_inplace(sos, out.samples);
  return out;
}
}  // namespace

AudioSegment butterworth_highpass(const AudioSegment& seg, double cutoff_hz, int order) {
  return apply(seg, FilterKind::Highpass, cutoff_hz, order);
}

AudioSegment butterworth_lowpass(const AudioSegment& seg, double cutoff_hz, int order) {
  return apply(seg, FilterKind::Lowpass, cutoff_hz, order);
}

}  // namespace vahf::dsp
