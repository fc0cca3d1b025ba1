#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vahf/common/config.hpp"
#include "vahf/features/features.hpp"
#include "vahf/preprocess/recording.hpp"
#include "vahf/sim/session.hpp"

namespace vahf::harness {

// root/user_<id>/session_<k>/{<channel>.wav, imu.csv, ticks.json, meta.json,
// ground_truth.json (simulated only)}

struct SessionMeta {
  int user_id = 0;
  int session_index = 0;
  int label = 0;
  std::string posture;
  std::vector<int> commands;  // one per tick
  double sample_rate = 48000.0;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const SessionMeta& m);
/// Throws Error("invalid-meta").
SessionMeta session_meta_from_json(const nlohmann::json& j);

std::filesystem::path session_dir(const std::filesystem::path& root, int user, int session);

struct RawSession {
  preprocess::MultiChannelRecording recording;
  SessionMeta meta;
  std::optional<sim::GroundTruth> truth;
};

void write_session(const std::filesystem::path& dir, const RawSession& session);
/// Throws Error("dataset-format") on missing or malformed files.
RawSession read_session(const std::filesystem::path& dir);
/// Session directories sorted by (user, session). Throws
/// Error("dataset-missing") when the root does not exist or holds none.
std::vector<std::filesystem::path> list_sessions(const std::filesystem::path& root);

/// Writes one session per plan; sessions are simulated in parallel.
void simulate_dataset(const std::filesystem::path& root, const std::vector<sim::SessionPlan>& plans, const Config& cfg,
                      int jobs);

/// Preprocessed utterances with label, user and command attached from meta.
/// Throws Error("dataset-format") when tick and command counts differ.
std::vector<preprocess::GestureSample> preprocess_session(const RawSession& s, const Config& cfg);

// Preprocessed sample export: <dir>/{vocal_<ch>.wav, ultra_<ch>.wav (float32),
// imu.csv, meta.json}.
void write_sample(const std::filesystem::path& dir, const preprocess::GestureSample& s);
preprocess::GestureSample read_sample(const std::filesystem::path& dir);

void write_imu_csv(const std::filesystem::path& path, const preprocess::ImuStream& imu);
preprocess::ImuStream read_imu_csv(const std::filesystem::path& path);

/// Analysed samples, ordered by (user, session, utterance).
struct Dataset {
  std::vector<features::SampleAnalysis> samples;
  std::vector<int> users() const;  // sorted, unique
};

Dataset analyze_sessions(const std::vector<RawSession>& sessions, const Config& cfg, int jobs);
/// Simulates, preprocesses and analyses without touching the disk.
Dataset simulate_analyzed(const std::vector<sim::SessionPlan>& plans, const Config& cfg, int jobs);
Dataset load_analyzed(const std::filesystem::path& root, const Config& cfg, int jobs);

}  // namespace vahf::harness
