#pragma once

#include <string>
#include <vector>

#include "vahf/common/config.hpp"
#include "vahf/preprocess/recording.hpp"

namespace vahf::preprocess {

/// Time (s) of the first clap-like peak: the short-window RMS envelope
/// (audio) or acceleration-magnitude envelope (IMU) is thresholded at
/// median + k * MAD; the maximum of the first run above the threshold wins.
/// Throws Error("no-sync-event") when nothing exceeds the threshold.
double detect_sync_peak(const dsp::AudioSegment& seg, const PreprocessConfig& cfg = {});
double detect_sync_peak(const ImuStream& imu, const PreprocessConfig& cfg = {});

/// re_inner if present, else re_outer, else the first channel.
std::string sync_reference_channel(const ChannelMap& channels);

/// Shifts IMU timestamps so the IMU clap peak coincides with the audio clap
/// peak of the reference channel; audio is untouched.
MultiChannelRecording align_channels(const MultiChannelRecording& rec, const PreprocessConfig& cfg = {});

/// Sample i spans [tick_i, tick_{i+1}), the last one runs to the end.
/// Only `raw`, `imu` and `start_s` are filled.
/// Throws Error("tick-out-of-range").
std::vector<GestureSample> segment_by_ticks(const MultiChannelRecording& rec);

struct BandPair {
  dsp::AudioSegment low;   // at the input rate
  dsp::AudioSegment high;
};
/// Power-complementary Butterworth low/high pair at the split cutoff.
BandPair split_bands(const dsp::AudioSegment& raw, const PreprocessConfig& cfg = {}, int order = 8);
/// Fills vocal (low band resampled to the vocal rate) and ultra (high band)
/// from raw, then clears raw.
void split_bands(GestureSample& sample, const PreprocessConfig& cfg = {}, int order = 8);

struct VadBounds {
  double start_s = 0.0;  // relative to the sample start
  double end_s = 0.0;
};
/// Energy VAD on one channel: frame energies in dB against a noise floor
/// taken from the quieter of the first/last edge windows (capped).
/// Throws Error("no-voice-activity").
VadBounds vad_bounds(const dsp::AudioSegment& seg, const PreprocessConfig& cfg = {});
/// Trims vocal, ultra and IMU to the VAD bounds of the reference vocal channel.
void vad_trim(GestureSample& sample, const PreprocessConfig& cfg = {});

/// align -> segment -> split bands -> VAD trim.
std::vector<GestureSample> preprocess_recording(const MultiChannelRecording& rec, const Config& cfg);

}  // namespace vahf::preprocess
