#pragma once

#include <span>
#include <vector>

#include "vahf/dsp/types.hpp"

namespace vahf::dsp {

enum class FilterKind { Lowpass, Highpass };

/// One second-order section, a0 normalised to 1:
/// y = b0 x + b1 x[-1] + b2 x[-2] - a1 y[-1] - a2 y[-2].
/// First-order sections carry b2 = a2 = 0.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
};

using Sos = std::vector<Biquad>;

/// Digital Butterworth filter by bilinear transform with prewarping, as
/// cascaded sections. Throws Error("cutoff-out-of-range") unless
/// 0 < cutoff < rate/2, and Error("invalid-argument") for order < 1.
Sos butterworth(FilterKind kind, int order, double cutoff_hz, double sample_rate);

/// |H(e^{j 2 pi f / fs})| of the cascade.
double magnitude_response(const Sos& sos, double freq_hz, double sample_rate);

/// Direct-form II transposed filtering from zero initial state.
std::vector<double> sosfilt(const Sos& sos, std::span<const double> x);
void sosfilt_inplace(const Sos& sos, std::span<float> x);

AudioSegment butterworth_highpass(const AudioSegment& seg, double cutoff_hz, int order = 8);
AudioSegment butterworth_lowpass(const AudioSegment& seg, double cutoff_hz, int order = 8);

}  // namespace vahf::dsp
