#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vahf/common/config.hpp"
#include "vahf/preprocess/recording.hpp"
#include "vahf/sim/gesture_model.hpp"

namespace vahf::sim {

struct SessionPlan {
  int user_id = 0;
  int label = 0;
  int session_index = 0;
  std::vector<int> commands;  // ids in 1..20, one utterance each
  std::string posture = "sitting";
  std::uint64_t seed = 0;     // dataset seed; user and session streams derive from it
};

struct UtteranceTruth {
  int command = 0;
  double tick = 0.0;
  double voice_start = 0.0;
  double voice_end = 0.0;
  std::map<std::string, ChannelPath> voice;
  std::map<std::string, UltraPath> ultra;
};

struct GroundTruth {
  int user_id = 0;
  int label = 0;
  int session_index = 0;
  std::string posture;
  std::uint64_t seed = 0;
  double duration = 0.0;
  double clap_time = 0.0;
  double imu_offset = 0.0;    // t_imu = t_true + imu_offset
  double chirp_offset = 0.0;  // first chirp period start, recorder clock
  std::vector<UtteranceTruth> utterances;
};

struct Session {
  preprocess::MultiChannelRecording recording;
  GroundTruth truth;
};

/// Clap, then one tick + utterance per command. Every channel carries voice
/// through its gesture path, the clap, the watch chirp through its ultrasound
/// path, and white noise at cfg.sim.snr_db below the voice level.
Session make_session(const SessionPlan& plan, const Config& cfg);

/// users x 9 gestures, one session per (user, gesture), commands drawn
/// without replacement from the 20-command list.
std::vector<SessionPlan> default_plans(int users, std::uint64_t seed, int commands_per_session = 10);

nlohmann::json to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

}  // namespace vahf::sim
