#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vahf/preprocess/recording.hpp"

namespace vahf::sim {

using Vec3 = std::array<double, 3>;
using Quat = std::array<double, 4>;  // w, x, y, z

Quat quat_mul(const Quat& a, const Quat& b);
Quat quat_conj(const Quat& q);
Quat quat_exp(const Vec3& rotation_vector);
/// Angle of the relative rotation between two unit quaternions, degrees.
double quat_angle_deg(const Quat& a, const Quat& b);

/// Hand attitude change (rotation vector, rad) and reach displacement (m)
/// from rest for each label; label 8 does not move.
Vec3 gesture_rotation(int label);
Vec3 gesture_displacement(int label);

/// One reach-hold-return movement, times on the true clock.
struct ImuEpisode {
  double reach_start = 0.0;
  double reach_s = 0.4;
  double return_start = 0.0;
  double return_s = 0.35;
  Vec3 rotation{};
  Vec3 displacement{};
};

struct ImuScene {
  Vec3 rest_rotation{};
  std::vector<ImuEpisode> episodes;
  double clap_time = -1.0;  // true clock; negative = no clap
  double clap_accel = 40.0; // m/s^2 peak of the clap jolt
};

/// 200 Hz rows with t on the IMU clock, t_imu = t_true + clock_offset_s,
/// covering t_imu in [0, duration_s). Minimum-jerk reaches, 8-11 Hz tremor,
/// sensor noise; accelerometer reports specific force in the sensor frame.
preprocess::ImuStream render_imu(const ImuScene& scene, double duration_s, double clock_offset_s,
                                 std::uint64_t seed, double rate = 200.0);

/// Single 3 s episode for `label`: rest, reach at 0.5 s, hold. Throws Error("invalid-label").
preprocess::ImuStream synth_imu(int label, std::uint64_t seed);

}  // namespace vahf::sim
