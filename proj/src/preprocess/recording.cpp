#include "vahf/preprocess/recording.hpp"

#include <algorithm>
#include <cmath>

#include "vahf/common/error.hpp"

namespace vahf::preprocess {

void ImuStream::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    require(i == 0 || r.t > rows[i - 1].t, "invalid-imu", "timestamps not increasing at row " + std::to_string(i));
    const double norm = std::sqrt(r.quat[0] * r.quat[0] + r.quat[1] * r.quat[1] + r.quat[2] * r.quat[2] + r.quat[3] * r.quat[3]);
    require(std::abs(norm - 1.0) <= 1e-3, "invalid-imu", "quaternion norm at row " + std::to_string(i));
  }
}

ImuStream ImuStream::slice(double t0, double t1) const {
  auto lo = std::lower_bound(rows.begin(), rows.end(), t0, [](const ImuRow& r, double t) { return r.t < t; });
  auto hi = std::lower_bound(lo, rows.end(), t1, [](const ImuRow& r, double t) { return r.t < t; });
  return {{lo, hi}};
}

double MultiChannelRecording::sample_rate() const {
  require(!channels.empty(), "invalid-recording", "no channels");
  return channels.begin()->second.sample_rate;
}

std::size_t MultiChannelRecording::length() const {
  require(!channels.empty(), "invalid-recording", "no channels");
  return channels.begin()->second.size();
}

void MultiChannelRecording::validate() const {
  require(!channels.empty(), "invalid-recording", "no channels");
  const double rate = sample_rate();
  const std::size_t len = length();
  for (const auto& [name, seg] : channels) {
    require(seg.sample_rate == rate, "invalid-recording", name + ": sample rate differs");
    require(seg.size() == len, "invalid-recording", name + ": length differs");
  }
  for (std::size_t i = 1; i < ticks.size(); ++i) require(ticks[i] > ticks[i - 1], "invalid-recording", "ticks not increasing");
}

}  // namespace vahf::preprocess
