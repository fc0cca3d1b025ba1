#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "vahf/dsp/types.hpp"

namespace vahf::preprocess {

using ChannelMap = std::map<std::string, dsp::AudioSegment>;

struct ImuRow {
  double t = 0.0;                  // s, IMU clock until aligned
  std::array<double, 3> accel{};   // m/s^2, specific force in the sensor frame
  std::array<double, 3> gyro{};    // rad/s
  std::array<double, 4> quat{1, 0, 0, 0};  // w, x, y, z
  bool operator==(const ImuRow&) const = default;
};

struct ImuStream {
  std::vector<ImuRow> rows;

  bool empty() const noexcept { return rows.empty(); }
  std::size_t size() const noexcept { return rows.size(); }
  /// Throws Error("invalid-imu") on non-monotone timestamps or a quaternion
  /// whose norm is off by more than 1e-3.
  void validate() const;
  /// Rows with t in [t0, t1).
  ImuStream slice(double t0, double t1) const;
  bool operator==(const ImuStream&) const = default;
};

struct MultiChannelRecording {
  ChannelMap channels;
  ImuStream imu;
  std::vector<double> ticks;  // s, recorder clock

  double sample_rate() const;
  std::size_t length() const;
  /// Throws Error("invalid-recording") when channel rates/lengths differ or
  /// ticks are not strictly increasing.
  void validate() const;
};

/// One utterance. `raw` holds full-band 48 kHz audio until split_bands fills
/// `vocal` (16 kHz, low band) and `ultra` (48 kHz, high band).
struct GestureSample {
  ChannelMap raw;
  ChannelMap vocal;
  ChannelMap ultra;
  ImuStream imu;
  double start_s = 0.0;  // recorder clock of the first raw sample
  int label = -1;
  int user_id = -1;
  int command_id = 0;
  std::string posture;
};

}  // namespace vahf::preprocess
