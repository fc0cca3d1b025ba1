#pragma once

#include <functional>
#include <utility>
#include <string>
#include <vector>

#include "vahf/common/config.hpp"
#include "vahf/dsp/types.hpp"

namespace vahf::fmcw {

struct ChirpConfig {
  double f0 = 17500.0;
  double f1 = 22500.0;
  double period_s = 0.050;
  double amplitude = 0.05;

  double bandwidth() const noexcept { return f1 - f0; }
  double slope() const noexcept { return bandwidth() / period_s; }  // Hz per second
  /// Throws Error("invalid-chirp") unless f1 > f0 > 0 and period_s > 0.
  void validate() const;
  static ChirpConfig from(const FmcwConfig& cfg);
};

struct BeatSignal {
  std::vector<float> samples;
  double sample_rate = 0.0;
  double period_offset_s = 0.0;  // where chirp periods start
  double period_s = 0.0;
};

/// x0(t) = A0 cos(2 pi f0 u + pi (B/T) u^2), u = t mod T.
double chirp_value(const ChirpConfig& cfg, double t);

/// Repeated sweeps starting at t = 0. Throws Error("undersampled-chirp") if rate < 2 f1.
dsp::AudioSegment generate_chirp(const ChirpConfig& cfg, double duration_s, double rate);

/// LPF(x0(t - offset) * received(t)). `period_offset_s` is where a chirp
/// period starts in the received clock. A single echo A1 x0(t - t0) yields
/// (A0 A1 / 2) cos(2 pi (B/T) t0 t + const) away from period boundaries.
/// The product is formed from the analytic received signal so the sum
/// frequency term never aliases back into the beat band.
/// Throws Error("rate-mismatch") when the segment is not at `rate`.
BeatSignal dechirp(const dsp::AudioSegment& received, const ChirpConfig& cfg, const FmcwConfig& fcfg = {},
                   double period_offset_s = 0.0, double rate = 48000.0);

double beat_frequency(double delay_s, const ChirpConfig& cfg);
double delay_from_beat(double beat_hz, const ChirpConfig& cfg);

/// Start of a chirp period within [0, T), by circular cross-correlation of
/// the received band against x0, averaged over up to four periods. The strongest
/// path defines the start.
double estimate_period_start(const dsp::AudioSegment& received, const ChirpConfig& cfg);

/// Single-path delay from the beat peak: complex dechirp, then per chirp
/// period a zero-padded spectrum with interpolated peak; median over periods.
double estimate_delay(const dsp::AudioSegment& received, const ChirpConfig& cfg, const FmcwConfig& fcfg = {},
                      double period_offset_s = 0.0);

/// Per-channel beat track: log-magnitude beat spectrogram [beat_bins x
/// beat_frames] plus per-frame peak frequency (Hz) and amplitude, both
/// restricted to bins below beat_peak_max_hz.
/// One Hann frame of beat_window samples per chirp period, ending at the
/// period end: the beat phase jumps by 2 pi B t0 at every period start, so
/// frames never straddle one. Frames are centre-cropped or zero-padded to
/// beat_frames.
struct BeatTrack {
  dsp::Grid log_spec;
  std::vector<float> peak_hz;
  std::vector<float> peak_amp;
};
BeatTrack beat_track(const BeatSignal& beat, const FmcwConfig& fcfg = {});

struct UltraFeatures {
  std::vector<float> f_stats;   // [peak_hz, peak_amp] per channel, in input order
  std::vector<float> f_spec_u;  // embedding, empty when no embedder is given
  std::vector<dsp::Grid> spectrograms;
};

using Embedder = std::function<std::vector<float>(const std::vector<dsp::Grid>&)>;

using NamedBeats = std::vector<std::pair<std::string, BeatSignal>>;

/// Throws Error("no-beat-channel") for an empty list.
UltraFeatures beat_features(const NamedBeats& beats, const FmcwConfig& fcfg = {},
                            const Embedder& embed = {});

}  // namespace vahf::fmcw
