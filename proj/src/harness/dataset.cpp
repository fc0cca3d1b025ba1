#include "vahf/harness/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "vahf/common/channels.hpp"
#include "vahf/common/error.hpp"
#include "vahf/common/parallel.hpp"
#include "vahf/harness/wav.hpp"
#include "vahf/preprocess/preprocess.hpp"

namespace vahf::harness {
namespace fs = std::filesystem;
namespace {

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("dataset-format", "missing " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("dataset-format", p.string() + ": " + e.what());
  }
}

void write_json(const fs::path& p, const nlohmann::json& j) { std::ofstream(p) << j.dump(2) << '\n'; }

// "user_3" -> 3, -1 when the name does not match.
int parse_index(const std::string& name, const std::string& prefix) {
  if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return -1;
  const auto digits = name.substr(prefix.size());
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) return -1;
  return std::stoi(digits);
}

}  // namespace

nlohmann::json to_json(const SessionMeta& m) {
  return {{"user_id", m.user_id}, {"session_index", m.session_index}, {"label", m.label},
          {"posture", m.posture}, {"commands", m.commands},           {"sample_rate", m.sample_rate},
          {"seed", m.seed}};
}

SessionMeta session_meta_from_json(const nlohmann::json& j) {
  try {
    SessionMeta m;
    m.user_id = j.at("user_id");
    m.session_index = j.at("session_index");
    m.label = j.at("label");
    m.posture = j.value("posture", "");
    m.commands = j.at("commands").get<std::vector<int>>();
    m.sample_rate = j.value("sample_rate", 48000.0);
    m.seed = j.value("seed", std::uint64_t{0});
    require(m.label >= 0 && m.label < kNumLabels, "invalid-meta", "label out of range");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid-meta", e.what());
  }
}

fs::path session_dir(const fs::path& root, int user, int session) {
  return root / ("user_" + std::to_string(user)) / ("session_" + std::to_string(session));
}

void write_imu_csv(const fs::path& path, const preprocess::ImuStream& imu) {
  std::ofstream out(path);
  if (!out) throw Error("dataset-format", "cannot write " + path.string());
  out << "t,ax,ay,az,gx,gy,gz,qw,qx,qy,qz\n";
  char buf[512];
  for (const auto& r : imu.rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.t, r.accel[0],
                  r.accel[1], r.accel[2], r.gyro[0], r.gyro[1], r.gyro[2], r.quat[0], r.quat[1], r.quat[2], r.quat[3]);
    out << buf;
  }
}

preprocess::ImuStream read_imu_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("dataset-format", "missing " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,ax", 0) != 0) throw Error("dataset-format", path.string() + ": unexpected header");
  preprocess::ImuStream imu;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[11];
    const char* p = line.c_str();
    for (int i = 0; i < 11; ++i) {
      char* end = nullptr;
      v[i] = std::strtod(p, &end);
      if (end == p || (i < 10 && *end != ',')) throw Error("dataset-format", path.string() + ":" + std::to_string(lineno));
      p = end + 1;
    }
    imu.rows.push_back({v[0], {v[1], v[2], v[3]}, {v[4], v[5], v[6]}, {v[7], v[8], v[9], v[10]}});
  }
  return imu;
}

void write_session(const fs::path& dir, const RawSession& s) {
  fs::create_directories(dir);
  for (const auto& [name, seg] : s.recording.channels) write_wav(dir / (name + ".wav"), seg, WavFormat::Pcm16);
  write_imu_csv(dir / "imu.csv", s.recording.imu);
  write_json(dir / "ticks.json", s.recording.ticks);
  write_json(dir / "meta.json", to_json(s.meta));
  if (s.truth) write_json(dir / "ground_truth.json", sim::to_json(*s.truth));
}

RawSession read_session(const fs::path& dir) {
  RawSession s;
  s.meta = session_meta_from_json(read_json(dir / "meta.json"));
  for (auto name : kChannelNames) {
    const auto p = dir / (std::string(name) + ".wav");
    if (fs::exists(p)) s.recording.channels[std::string(name)] = read_wav(p);
  }
  if (s.recording.channels.empty()) throw Error("dataset-format", dir.string() + ": no channel wav files");
  s.recording.imu = read_imu_csv(dir / "imu.csv");
  try {
    s.recording.ticks = read_json(dir / "ticks.json").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("dataset-format", e.what());
  }
  if (fs::exists(dir / "ground_truth.json")) s.truth = sim::ground_truth_from_json(read_json(dir / "ground_truth.json"));
  s.recording.validate();
  return s;
}

std::vector<fs::path> list_sessions(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error("dataset-missing", root.string());
  std::vector<std::tuple<int, int, fs::path>> found;
  for (const auto& u : fs::directory_iterator(root)) {
    const int user = parse_index(u.path().filename().string(), "user_");
    if (user < 0 || !u.is_directory()) continue;
    for (const auto& s : fs::directory_iterator(u.path())) {
      const int k = parse_index(s.path().filename().string(), "session_");
      if (k >= 0 && fs::exists(s.path() / "meta.json")) found.emplace_back(user, k, s.path());
    }
  }
  if (found.empty()) throw Error("dataset-missing", root.string() + " holds no sessions");
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& f : found) out.push_back(std::get<2>(f));
  return out;
}

void simulate_dataset(const fs::path& root, const std::vector<sim::SessionPlan>& plans, const Config& cfg, int jobs) {
  parallel_for(plans.size(), jobs, [&](std::size_t i) {
    const auto& plan = plans[i];
    auto session = sim::make_session(plan, cfg);
    RawSession raw;
    raw.recording = std::move(session.recording);
    raw.meta = {plan.user_id, plan.session_index, plan.label, plan.posture, plan.commands, cfg.preprocess.raw_rate, plan.seed};
    raw.truth = std::move(session.truth);
    write_session(session_dir(root, plan.user_id, plan.session_index), raw);
  });
}

std::vector<preprocess::GestureSample> preprocess_session(const RawSession& s, const Config& cfg) {
  if (s.meta.commands.size() != s.recording.ticks.size())
    throw Error("dataset-format", "tick count differs from the command list");
  auto samples = preprocess::preprocess_recording(s.recording, cfg);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].label = s.meta.label;
    samples[i].user_id = s.meta.user_id;
    samples[i].command_id = s.meta.commands[i];
    samples[i].posture = s.meta.posture;
  }
  return samples;
}

void write_sample(const fs::path& dir, const preprocess::GestureSample& s) {
  fs::create_directories(dir);
  for (const auto& [name, seg] : s.vocal) write_wav(dir / ("vocal_" + name + ".wav"), seg, WavFormat::Float32);
  for (const auto& [name, seg] : s.ultra) write_wav(dir / ("ultra_" + name + ".wav"), seg, WavFormat::Float32);
  write_imu_csv(dir / "imu.csv", s.imu);
  write_json(dir / "meta.json", {{"label", s.label},
                                 {"user_id", s.user_id},
                                 {"command_id", s.command_id},
                                 {"posture", s.posture},
                                 {"start_s", s.start_s}});
}

preprocess::GestureSample read_sample(const fs::path& dir) {
  preprocess::GestureSample s;
  const auto meta = read_json(dir / "meta.json");
  try {
    s.label = meta.at("label");
    s.user_id = meta.at("user_id");
    s.command_id = meta.at("command_id");
    s.posture = meta.value("posture", "");
    s.start_s = meta.value("start_s", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error("dataset-format", e.what());
  }
  for (auto name : kChannelNames) {
    const std::string n(name);
    if (fs::exists(dir / ("vocal_" + n + ".wav"))) s.vocal[n] = read_wav(dir / ("vocal_" + n + ".wav"));
    if (fs::exists(dir / ("ultra_" + n + ".wav"))) s.ultra[n] = read_wav(dir / ("ultra_" + n + ".wav"));
  }
  if (s.vocal.empty()) throw Error("dataset-format", dir.string() + ": no vocal channels");
  s.imu = read_imu_csv(dir / "imu.csv");
  return s;
}

std::vector<int> Dataset::users() const {
  std::set<int> u;
  for (const auto& s : samples) u.insert(s.user_id);
  return {u.begin(), u.end()};
}

namespace {

Dataset flatten(std::vector<std::vector<features::SampleAnalysis>>& per_session) {
  Dataset d;
  for (auto& v : per_session)
    for (auto& a : v) d.samples.push_back(std::move(a));
  return d;
}

std::vector<features::SampleAnalysis> analyze_all(const RawSession& s, const Config& cfg) {
  std::vector<features::SampleAnalysis> out;
  for (const auto& g : preprocess_session(s, cfg)) out.push_back(features::analyze_sample(g, cfg));
  return out;
}

}  // namespace

Dataset analyze_sessions(const std::vector<RawSession>& sessions, const Config& cfg, int jobs) {
  std::vector<std::vector<features::SampleAnalysis>> per(sessions.size());
  parallel_for(sessions.size(), jobs, [&](std::size_t i) { per[i] = analyze_all(sessions[i], cfg); });
  return flatten(per);
}

Dataset simulate_analyzed(const std::vector<sim::SessionPlan>& plans, const Config& cfg, int jobs) {
  std::vector<std::vector<features::SampleAnalysis>> per(plans.size());
  parallel_for(plans.size(), jobs, [&](std::size_t i) {
    const auto& plan = plans[i];
    auto session = sim::make_session(plan, cfg);
    RawSession raw;
    raw.recording = std::move(session.recording);
    raw.meta = {plan.user_id, plan.session_index, plan.label, plan.posture, plan.commands, cfg.preprocess.raw_rate, plan.seed};
    per[i] = analyze_all(raw, cfg);
  });
  return flatten(per);
}

Dataset load_analyzed(const fs::path& root, const Config& cfg, int jobs) {
  const auto dirs = list_sessions(root);
  std::vector<std::vector<features::SampleAnalysis>> per(dirs.size());
  // Sessions are read inside the workers so only a few recordings are resident.
  parallel_for(dirs.size(), jobs, [&](std::size_t i) { per[i] = analyze_all(read_session(dirs[i]), cfg); });
  return flatten(per);
}

}  // namespace vahf::harness
