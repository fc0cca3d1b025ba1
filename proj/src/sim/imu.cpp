#include "vahf/sim/imu.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vahf/common/channels.hpp"
#include "vahf/common/error.hpp"
#include "vahf/common/rng.hpp"

namespace vahf::sim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kGravity = 9.81;

// clang-format off
constexpr std::array<Vec3, kNumLabels> kRotationDeg{{
  {70, 0, 40}, {80, 25, 65}, {95, -10, 15}, {60, 40, 0}, {75, -35, 50},
  {45, 15, -25}, {90, 35, -35}, {55, 55, 20}, {0, 0, 0},
}};
constexpr std::array<Vec3, kNumLabels> kDisplacement{{
  {0.12, 0.10, 0.42}, {0.10, 0.08, 0.40}, {0.08, 0.12, 0.36}, {0.02, 0.18, 0.38}, {0.14, 0.06, 0.44},
  {0.00, 0.16, 0.30}, {0.06, 0.16, 0.40}, {0.02, 0.20, 0.36}, {0, 0, 0},
}};
// clang-format on

double min_jerk(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  return tau * tau * tau * (10 - 15 * tau + 6 * tau * tau);
}

Vec3 rotate(const Quat& q, const Vec3& v) {
  const Quat p{0, v[0], v[1], v[2]};
  const Quat r = quat_mul(quat_mul(q, p), quat_conj(q));
  return {r[1], r[2], r[3]};
}

// Fraction of the gesture pose reached at true time t.
double pose_weight(const ImuEpisode& e, double t) {
  if (t < e.reach_start) return 0.0;
  if (t < e.return_start) return min_jerk((t - e.reach_start) / e.reach_s);
  return 1.0 - min_jerk((t - e.return_start) / e.return_s);
}

struct Tremor {
  std::array<double, 3> freq{}, phase{};
  double amp = 0.3 * kDeg;
  Vec3 at(double t) const {
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = amp * std::sin(2 * std::numbers::pi * freq[i] * t + phase[i]);
    return v;
  }
};

struct Kinematics {
  const ImuScene& scene;
  Tremor tremor;

  Quat attitude(double t) const {
    Quat q = quat_exp(scene.rest_rotation);
    for (const auto& e : scene.episodes) {
      const double w = pose_weight(e, t);
      if (w > 0) q = quat_mul(q, quat_exp({w * e.rotation[0], w * e.rotation[1], w * e.rotation[2]}));
    }
    return quat_mul(q, quat_exp(tremor.at(t)));
  }
  Vec3 position(double t) const {
    Vec3 p{};
    for (const auto& e : scene.episodes) {
      const double w = pose_weight(e, t);
      for (int i = 0; i < 3; ++i) p[i] += w * e.displacement[i];
    }
    return p;
  }
  Vec3 clap(double t) const {
    const double dt = t - scene.clap_time;
    if (scene.clap_time < 0 || dt < 0 || dt > 0.02) return {};
    return {scene.clap_accel * std::sin(std::numbers::pi * dt / 0.02), 0, 0};
  }
};

}  // namespace

Quat quat_mul(const Quat& a, const Quat& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3], a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1], a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

Quat quat_conj(const Quat& q) { return {q[0], -q[1], -q[2], -q[3]}; }

Quat quat_exp(const Vec3& v) {
  const double angle = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (angle < 1e-15) return {1, 0, 0, 0};
  const double s = std::sin(angle / 2) / angle;
  return {std::cos(angle / 2), v[0] * s, v[1] * s, v[2] * s};
}

double quat_angle_deg(const Quat& a, const Quat& b) {
  const double d = std::abs(a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]);
  return 2.0 * std::acos(std::min(1.0, d)) / kDeg;
}

Vec3 gesture_rotation(int label) {
  require(label >= 0 && label < kNumLabels, "invalid-label", std::to_string(label));
  const auto& r = kRotationDeg[label];
  return {r[0] * kDeg, r[1] * kDeg, r[2] * kDeg};
}

Vec3 gesture_displacement(int label) {
  require(label >= 0 && label < kNumLabels, "invalid-label", std::to_string(label));
  return kDisplacement[label];
}

preprocess::ImuStream render_imu(const ImuScene& scene, double duration_s, double clock_offset_s,
                                 std::uint64_t seed, double rate) {
  Rng rng(seed);
  Kinematics k{scene, {}};
  for (int i = 0; i < 3; ++i) {
    k.tremor.freq[i] = rng.uniform(8.0, 11.0);
    k.tremor.phase[i] = rng.uniform(0.0, 2 * std::numbers::pi);
  }
  const auto n = static_cast<std::size_t>(duration_s * rate);
  preprocess::ImuStream out;
  out.rows.resize(n);
  constexpr double h = 1e-3;
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = out.rows[i];
    row.t = static_cast<double>(i) / rate;
    const double t = row.t - clock_offset_s;
    const Quat q = k.attitude(t);

    // Body rate from the attitude derivative: omega = 2 vec(q* dq/dt).
    const Quat qp = k.attitude(t + h), qm = k.attitude(t - h);
    Quat dq;
    for (int j = 0; j < 4; ++j) dq[j] = (qp[j] - qm[j]) / (2 * h);
    const Quat w = quat_mul(quat_conj(q), dq);

    const Vec3 p0 = k.position(t - h), p1 = k.position(t), p2 = k.position(t + h);
    const Vec3 jolt = k.clap(t);
    Vec3 f;
    for (int j = 0; j < 3; ++j) f[j] = (p2[j] - 2 * p1[j] + p0[j]) / (h * h) + jolt[j];
    f[2] += kGravity;
    const Vec3 fb = rotate(quat_conj(q), f);

    for (int j = 0; j < 3; ++j) {
      row.accel[j] = fb[j] + rng.normal(0.0, 0.03);
      row.gyro[j] = 2 * w[j + 1] + rng.normal(0.0, 0.005);
    }
    row.quat = q;
  }
  return out;
}

preprocess::ImuStream synth_imu(int label, std::uint64_t seed) {
  ImuScene scene;
  Rng rng(seed);
  const Vec3 r = gesture_rotation(label);
  const Vec3 d = gesture_displacement(label);
  ImuEpisode e;
  e.reach_start = 0.5;
  e.return_start = 10.0;  // held past the end
  for (int i = 0; i < 3; ++i) {
    e.rotation[i] = label == kEmptyLabel ? 0.0 : r[i] + rng.normal(0.0, 2.0 * kDeg);
    e.displacement[i] = d[i];
  }
  scene.episodes.push_back(e);
  return render_imu(scene, 3.0, 0.0, derive_seed(seed, 1));
}

}  // namespace vahf::sim
