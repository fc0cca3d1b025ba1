#pragma once

#include "vahf/dsp/types.hpp"

namespace vahf::dsp {

/// Rational polyphase resampler with a Kaiser-windowed sinc anti-alias/
/// anti-image filter (cutoff at 0.45 of the lower of the two rates,
/// 16 zero crossings per side, beta 8). Output sample m corresponds to input
/// time m / target_rate; group delay is compensated. Both rates must be
/// integral.
AudioSegment resample(const AudioSegment& seg, double target_rate);

}  // namespace vahf::dsp
