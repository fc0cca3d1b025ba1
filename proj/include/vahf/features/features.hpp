#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vahf/common/config.hpp"
#include "vahf/dsp/types.hpp"
#include "vahf/fmcw/fmcw.hpp"
#include "vahf/harness/combos.hpp"
#include "vahf/preprocess/recording.hpp"

namespace vahf::features {

using harness::ModelSelector;
using harness::SensorCombo;

/// re_inner when the set has it, else re_outer. Throws Error("missing-channel")
/// when neither is present.
std::string reference_channel(const std::vector<std::string>& channels);
/// Same rule on the combo's channel set; throws Error("missing-channel") if
/// `available` lacks any channel of the combo.
std::string reference_channel(const std::vector<std::string>& available, SensorCombo mode);
/// Combo channels other than the reference, canonical order.
std::vector<std::string> monitored_channels(SensorCombo mode);

/// Rows [m_1 - m_ref, ..., m_n - m_ref, m_ref] stacked along the band axis.
/// Throws Error("shape-mismatch") when maps differ in shape.
dsp::Grid vocal_difference_frame(const std::vector<dsp::Grid>& monitored, const dsp::Grid& ref);

/// Mean DTW distance between aligned 20-frame MFCC segments (segment k vs k,
/// over the shorter list).
double segment_distance(const std::vector<dsp::MfccSeries>& a, const std::vector<dsp::MfccSeries>& b);
/// Distances for all unordered pairs (i < j) in list order.
std::vector<double> pairwise_distances(const std::vector<std::vector<dsp::MfccSeries>>& segments);
/// exp(-d / tau) per pair. Throws Error("too-few-channels") for fewer than two
/// channels, Error("invalid-tau") unless tau > 0.
std::vector<float> pairwise_mfcc_similarity(const std::vector<std::vector<dsp::MfccSeries>>& segments, double tau);

/// Centre `frames` rows, zero rows padded symmetrically (extra row at the end),
/// each row as accel xyz, gyro xyz, quat wxyz. Throws Error("empty-imu").
std::vector<float> imu_window(const preprocess::ImuStream& stream, int frames = 400);

/// Everything about one sample that does not depend on the combo or the fold.
struct SampleAnalysis {
  int label = -1;
  int user_id = -1;
  int command_id = 0;
  std::map<std::string, dsp::Grid> mel;                       // vocal log-mel, 128 x 250
  std::map<std::string, std::vector<float>> amp;              // 250 per channel
  std::map<std::string, std::vector<dsp::MfccSeries>> mfcc;   // 20-frame segments
  std::map<std::string, fmcw::BeatTrack> beat;                // ultra channels
  std::vector<float> imu;                                     // 4000, empty without IMU rows
};

/// Period start comes from the watch channel when present (its own chirp is
/// the strongest path), otherwise from the first ultra channel.
SampleAnalysis analyze_sample(const preprocess::GestureSample& sample, const Config& cfg);

/// Fold-dependent pieces: extractors trained on the training fold and the
/// similarity scale tau (median training pair distance).
struct FoldContext {
  std::function<std::vector<float>(const dsp::Grid&)> vocal_embed;
  std::function<std::vector<float>(const dsp::Grid&)> ultra_embed;
  double tau = 1.0;
  // Fold-independent channel-pair distances of the sample, when the caller
  // has them already (see sample_pair_distances).
  const std::vector<double>* distances = nullptr;
};

struct FeatureBundle {
  std::optional<std::vector<float>> f_vol;
  std::optional<std::vector<float>> f_ultra;
  std::optional<std::vector<float>> f_imu;
};

/// Inputs to the two extractors for one sample under a combo.
dsp::Grid vocal_map(const SampleAnalysis& a, SensorCombo mode);
dsp::Grid ultra_map(const SampleAnalysis& a, SensorCombo mode);
/// Training-fold tau: median of every pairwise distance the combo uses.
double median_pair_distance(const std::vector<const SampleAnalysis*>& train, SensorCombo mode);
/// Pair distances of one sample's vocal channels, in f_mfcc order.
std::vector<double> sample_pair_distances(const SampleAnalysis& a, SensorCombo mode);
/// Median of pooled pair distances (floored at 1e-9).
double median_distance(const std::vector<const std::vector<double>*>& per_sample);

/// f_vol = [f_spec, f_amp, f_mfcc]; f_ultra = [f_spec_u, f_stats]; f_imu.
/// Only the features the selector consumes are filled. Throws
/// Error("combo-selector-invalid") or Error("missing-channel").
FeatureBundle extract_bundle(const SampleAnalysis& a, SensorCombo mode, ModelSelector sel, const FoldContext& ctx);

/// Per-dimension z-score with statistics of the rows given.
struct Normalizer {
  std::vector<float> mean;
  std::vector<float> inv_sd;
  static Normalizer fit(const std::vector<const std::vector<float>*>& rows);
  void apply(std::vector<float>& v) const;
};

}  // namespace vahf::features
