#include "vahf/sim/session.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vahf/common/channels.hpp"
#include "vahf/common/error.hpp"
#include "vahf/common/rng.hpp"
#include "vahf/dsp/resample.hpp"
#include "vahf/fmcw/fmcw.hpp"
#include "vahf/sim/imu.hpp"
#include "vahf/sim/voice.hpp"

namespace vahf::sim {

namespace {

constexpr double kRate = 48000.0;
constexpr double kDeg = 3.14159265358979323846 / 180.0;

// Stream ids for derive_seed.
enum : std::uint64_t { kUserStream = 1, kSessionStream = 2, kVoiceStream = 3, kExecStream = 4, kNoiseStream = 5, kImuStream = 6 };

UltraPath blend(const UltraPath& a, const UltraPath& b, double w) {
  return {a.delay_s + w * (b.delay_s - a.delay_s), a.gain + w * (b.gain - a.gain)};
}

void add_at(std::vector<float>& dst, const std::vector<float>& src, std::ptrdiff_t at) {
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::ptrdiff_t k = at + static_cast<std::ptrdiff_t>(i);
    if (k >= 0 && k < static_cast<std::ptrdiff_t>(dst.size())) dst[k] += src[i];
  }
}

}  // namespace

Session make_session(const SessionPlan& plan, const Config& cfg) {
  require(plan.label >= 0 && plan.label < kNumLabels, "invalid-label", std::to_string(plan.label));
  require(!plan.commands.empty(), "invalid-plan", "no commands");
  const SimConfig& sc = cfg.sim;
  const std::uint64_t user_seed = derive_seed(plan.seed, kUserStream, plan.user_id);
  Rng rng(derive_seed(plan.seed, kSessionStream, plan.user_id, plan.session_index));

  GestureAcousticModel gesture = default_gesture_model(plan.label);
  if (sc.confusable) gesture = toward_empty(gesture, sc.confusable_scale);
  gesture = apply_user(gesture, user_seed, sc);
  const GestureAcousticModel rest = apply_user(default_gesture_model(kEmptyLabel), user_seed, sc);

  // Per-user hand pose habits.
  ImuScene scene;
  Vec3 user_rot_bias{};
  {
    Rng urng(derive_seed(user_seed, kImuStream));
    for (auto& v : scene.rest_rotation) v = urng.normal(0.0, 6.0 * kDeg);
    Rng lrng(derive_seed(user_seed, kImuStream, plan.label));
    for (auto& v : user_rot_bias) v = lrng.normal(0.0, 5.0 * kDeg);
  }
  const double pose_scale = sc.confusable ? sc.confusable_scale : 1.0;
  const bool moves = plan.label != kEmptyLabel;

  GroundTruth gt;
  gt.user_id = plan.user_id;
  gt.label = plan.label;
  gt.session_index = plan.session_index;
  gt.posture = plan.posture;
  gt.seed = plan.seed;
  gt.clap_time = rng.uniform(0.5, 1.0);
  gt.imu_offset = rng.uniform(-0.3, 0.3);
  gt.chirp_offset = rng.uniform(0.0, cfg.fmcw.period_s);
  scene.clap_time = gt.clap_time;

  // Timeline and voices.
  struct Utt {
    dsp::AudioSegment voice;
    GestureAcousticModel model;
  };
  std::vector<Utt> utts;
  double t = gt.clap_time + rng.uniform(1.0, 1.5);
  for (std::size_t i = 0; i < plan.commands.size(); ++i) {
    UtteranceTruth u;
    u.command = plan.commands[i];
    u.tick = t;
    const double lead = rng.uniform(0.45, 0.7);
    auto voice = synth_voice(u.command, derive_seed(plan.seed, kVoiceStream, plan.user_id, plan.session_index, i));
    voice = dsp::resample(voice, kRate);
    for (float& v : voice.samples) v *= static_cast<float>(sc.voice_level);
    u.voice_start = u.tick + lead;
    u.voice_end = u.voice_start + voice.duration();
    t = u.voice_end + rng.uniform(0.45, 0.7);

    auto model = apply_execution(gesture, derive_seed(plan.seed, kExecStream, plan.user_id, plan.session_index, i));
    u.voice = model.voice;
    u.ultra = model.ultra;

    ImuEpisode e;
    e.reach_start = u.tick + 0.02;
    e.return_start = u.voice_end + 0.05;
    if (moves) {
      Rng erng(derive_seed(plan.seed, kImuStream, plan.user_id, plan.session_index, i));
      const Vec3 r = gesture_rotation(plan.label), d = gesture_displacement(plan.label);
      for (int k = 0; k < 3; ++k) {
        e.rotation[k] = pose_scale * (r[k] + user_rot_bias[k]) + erng.normal(0.0, 3.0 * kDeg);
        e.displacement[k] = pose_scale * d[k] * erng.uniform(0.9, 1.1);
      }
    }
    scene.episodes.push_back(e);
    gt.utterances.push_back(std::move(u));
    utts.push_back({std::move(voice), std::move(model)});
  }
  gt.duration = t + 0.5;
  const auto n = static_cast<std::size_t>(std::ceil(gt.duration * kRate));

  // Clap: one decaying noise burst heard by every microphone.
  std::vector<float> clap(static_cast<std::size_t>(0.03 * kRate));
  for (std::size_t i = 0; i < clap.size(); ++i)
    clap[i] = static_cast<float>(sc.clap_level * std::exp(-static_cast<double>(i) / kRate / 0.004) * rng.normal());

  const fmcw::ChirpConfig chirp = fmcw::ChirpConfig::from(cfg.fmcw);
  const double noise_sd = sc.voice_level * std::pow(10.0, -sc.snr_db / 20.0);

  Session out;
  out.truth = gt;
  for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
    const std::string name(kChannelNames[c]);
    std::vector<float> x(n, 0.0f);

    const auto& rest_voice = rest.voice.at(name);
    auto clap_ch = fractional_delay(clap, rest_voice.delay_s * kRate);
    const float clap_gain = static_cast<float>(std::pow(10.0, -rest_voice.atten_db / 40.0));
    for (float& v : clap_ch) v *= clap_gain;
    add_at(x, clap_ch, static_cast<std::ptrdiff_t>(std::llround(gt.clap_time * kRate)));

    for (std::size_t i = 0; i < utts.size(); ++i) {
      const auto heard = propagate(utts[i].voice, utts[i].model.voice.at(name));
      add_at(x, heard.samples, static_cast<std::ptrdiff_t>(std::llround(gt.utterances[i].voice_start * kRate)));
    }

    // Chirp through the ultrasound path, which follows the hand between rest and pose.
    const auto& rest_u = rest.ultra.at(name);
    std::size_t ep = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double tk = static_cast<double>(k) / kRate;
      while (ep + 1 < scene.episodes.size() && tk >= scene.episodes[ep + 1].reach_start) ++ep;
      const auto& e = scene.episodes[ep];
      double w = 0;
      if (tk >= e.reach_start) {
        w = tk < e.return_start ? std::min(1.0, (tk - e.reach_start) / e.reach_s)
                                : std::max(0.0, 1.0 - (tk - e.return_start) / e.return_s);
      }
      const UltraPath p = blend(rest_u, utts[ep].model.ultra.at(name), w);
      x[k] += static_cast<float>(p.gain * fmcw::chirp_value(chirp, tk - p.delay_s - gt.chirp_offset));
    }

    Rng nrng(derive_seed(plan.seed, kNoiseStream, plan.user_id, plan.session_index, c));
    for (float& v : x) v += static_cast<float>(nrng.normal(0.0, noise_sd));
    out.recording.channels[name] = dsp::AudioSegment{std::move(x), kRate};
  }

  out.recording.imu = render_imu(scene, gt.duration, gt.imu_offset,
                                 derive_seed(plan.seed, kImuStream, plan.user_id, plan.session_index, 0xFFFF));
  for (const auto& u : gt.utterances) out.recording.ticks.push_back(u.tick);
  return out;
}

std::vector<SessionPlan> default_plans(int users, std::uint64_t seed, int commands_per_session) {
  require(users >= 1, "invalid-argument", "need at least one user");
  require(commands_per_session >= 1 && commands_per_session <= kNumCommands, "invalid-argument",
          "commands per session must be in 1..20");
  std::vector<SessionPlan> plans;
  for (int u = 0; u < users; ++u) {
    for (int g = 0; g < kNumLabels; ++g) {
      SessionPlan p;
      p.user_id = u;
      p.label = g;
      p.session_index = g;
      p.seed = seed;
      p.posture = (u + g) % 2 == 0 ? "sitting" : "standing";
      std::vector<int> ids(kNumCommands);
      std::iota(ids.begin(), ids.end(), 1);
      Rng rng(derive_seed(seed, kSessionStream, u, g, 0xC0DE));
      for (std::size_t i = ids.size() - 1; i > 0; --i) std::swap(ids[i], ids[rng.uniform_int(i + 1)]);
      p.commands.assign(ids.begin(), ids.begin() + commands_per_session);
      plans.push_back(std::move(p));
    }
  }
  return plans;
}

nlohmann::json to_json(const GroundTruth& gt) {
  using nlohmann::json;
  json j;
  j["user_id"] = gt.user_id;
  j["label"] = gt.label;
  j["session_index"] = gt.session_index;
  j["posture"] = gt.posture;
  j["seed"] = gt.seed;
  j["duration"] = gt.duration;
  j["clap_time"] = gt.clap_time;
  j["imu_offset"] = gt.imu_offset;
  j["chirp_offset"] = gt.chirp_offset;
  json utts = json::array();
  for (const auto& u : gt.utterances) {
    json ju;
    ju["command"] = u.command;
    ju["tick"] = u.tick;
    ju["voice_start"] = u.voice_start;
    ju["voice_end"] = u.voice_end;
    for (const auto& [name, p] : u.voice)
      ju["voice_paths"][name] = {{"delay_s", p.delay_s}, {"atten_db", p.atten_db}, {"cutoff_hz", p.cutoff_hz}};
    for (const auto& [name, p] : u.ultra) ju["ultra_paths"][name] = {{"delay_s", p.delay_s}, {"gain", p.gain}};
    utts.push_back(std::move(ju));
  }
  j["utterances"] = std::move(utts);
  return j;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  try {
    GroundTruth gt;
    gt.user_id = j.at("user_id").get<int>();
    gt.label = j.at("label").get<int>();
    gt.session_index = j.at("session_index").get<int>();
    gt.posture = j.at("posture").get<std::string>();
    gt.seed = j.at("seed").get<std::uint64_t>();
    gt.duration = j.at("duration").get<double>();
    gt.clap_time = j.at("clap_time").get<double>();
    gt.imu_offset = j.at("imu_offset").get<double>();
    gt.chirp_offset = j.at("chirp_offset").get<double>();
    for (const auto& ju : j.at("utterances")) {
      UtteranceTruth u;
      u.command = ju.at("command").get<int>();
      u.tick = ju.at("tick").get<double>();
      u.voice_start = ju.at("voice_start").get<double>();
      u.voice_end = ju.at("voice_end").get<double>();
      for (const auto& [name, p] : ju.at("voice_paths").items())
        u.voice[name] = {p.at("delay_s").get<double>(), p.at("atten_db").get<double>(), p.at("cutoff_hz").get<double>()};
      for (const auto& [name, p] : ju.at("ultra_paths").items())
        u.ultra[name] = {p.at("delay_s").get<double>(), p.at("gain").get<double>()};
      gt.utterances.push_back(std::move(u));
    }
    return gt;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid-ground-truth", e.what());
  }
}

}  // namespace vahf::sim
