#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vahf {

struct DspConfig {
  int mel_window = 512;         // samples at 16 kHz
  int mel_hop = 192;
  int mel_bands = 128;
  int mel_frames = 250;
  double log_floor = 1e-10;
  int mfcc_coeffs = 13;
  int mfcc_segment = 20;
  int mfcc_stride = 10;
  int amp_window = 200;
  int amp_stride = 200;
  int amp_length = 250;
  int butter_order = 8;
};

struct PreprocessConfig {
  double split_cutoff_hz = 17500.0;
  double raw_rate = 48000.0;
  double vocal_rate = 16000.0;
  double clap_window_s = 0.010;
  double clap_hop_s = 0.001;
  double clap_mad_k = 8.0;
  double vad_frame_s = 0.020;
  double vad_hop_s = 0.010;
  double vad_edge_s = 0.100;
  double vad_margin_db = 6.0;
  double vad_noise_cap_db = -50.0;
};

struct FmcwConfig {
  double f0 = 17500.0;
  double f1 = 22500.0;
  double period_s = 0.050;
  double amplitude = 0.05;
  double lpf_cutoff_hz = 4000.0;
  int lpf_order = 8;
  int beat_window = 2048;  // one frame per chirp period, placed after the wrap region
  int beat_bins = 128;
  int beat_frames = 64;
  double beat_peak_max_hz = 2000.0;
};

struct FeatureConfig {
  int imu_frames = 400;
};

struct ModelConfig {
  int embedding = 256;
  std::vector<int> extractor_widths{8, 16, 32, 32};
  int vocal_stem_h = 4;
  int vocal_stem_w = 5;
  int ultra_stem_h = 4;
  int ultra_stem_w = 2;
  int hidden = 512;
};

struct TrainConfig {
  int max_epochs = 100;
  double lr0 = 0.01;
  double momentum = 0.9;
  int batch_size = 32;
  double dropout = 0.5;
  bool warmup = true;
  bool pretrain = true;
  int pretrain_epochs = 5;
  double pretrain_lr = 0.01;
  int pretrain_samples = 128;  // training maps the autoencoder sees per fold
  int pretrain_batch = 8;
  double early_stop_loss = 0.02;
};

struct SimConfig {
  double snr_db = 30.0;
  double user_gain_jitter_db = 3.0;
  double user_delay_jitter_ms = 0.2;
  bool confusable = false;
  double confusable_scale = 0.35;
  double voice_level = 0.08;
  double clap_level = 0.8;
};

/// Every tunable constant of the pipeline. Loaded from a `key = value` file;
/// keys are `<section>.<field>` (see README for the schema).
struct Config {
  DspConfig dsp;
  PreprocessConfig preprocess;
  FmcwConfig fmcw;
  FeatureConfig features;
  ModelConfig model;
  TrainConfig train;
  SimConfig sim;

  static Config load(const std::filesystem::path& path);
  /// Applies a single `key`, `value` pair; throws Error("config-key") on unknown keys.
  void set(const std::string& key, const std::string& value);
  /// Canonical `key = value` dump, one per line, sorted by declaration order.
  std::string dump() const;
  /// FNV-1a 64 of dump(), rendered as 16 hex digits.
  std::string hash() const;
};

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace vahf
