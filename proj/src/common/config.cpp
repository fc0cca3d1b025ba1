#include "vahf/common/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vahf/common/error.hpp"

namespace vahf {
namespace {

template <typename Visitor>
void visit_fields(Config& c, Visitor&& v) {
  v("dsp.mel_window", c.dsp.mel_window);
  v("dsp.mel_hop", c.dsp.mel_hop);
  v("dsp.mel_bands", c.dsp.mel_bands);
  v("dsp.mel_frames", c.dsp.mel_frames);
  v("dsp.log_floor", c.dsp.log_floor);
  v("dsp.mfcc_coeffs", c.dsp.mfcc_coeffs);
  v("dsp.mfcc_segment", c.dsp.mfcc_segment);
  v("dsp.mfcc_stride", c.dsp.mfcc_stride);
  v("dsp.amp_window", c.dsp.amp_window);
  v("dsp.amp_stride", c.dsp.amp_stride);
  v("dsp.amp_length", c.dsp.amp_length);
  v("dsp.butter_order", c.dsp.butter_order);

  v("preprocess.split_cutoff_hz", c.preprocess.split_cutoff_hz);
  v("preprocess.raw_rate", c.preprocess.raw_rate);
  v("preprocess.vocal_rate", c.preprocess.vocal_rate);
  v("preprocess.clap_window_s", c.preprocess.clap_window_s);
  v("preprocess.clap_hop_s", c.preprocess.clap_hop_s);
  v("preprocess.clap_mad_k", c.preprocess.clap_mad_k);
  v("preprocess.vad_frame_s", c.preprocess.vad_frame_s);
  v("preprocess.vad_hop_s", c.preprocess.vad_hop_s);
  v("preprocess.vad_edge_s", c.preprocess.vad_edge_s);
  v("preprocess.vad_margin_db", c.preprocess.vad_margin_db);
  v("preprocess.vad_noise_cap_db", c.preprocess.vad_noise_cap_db);

  v("fmcw.f0", c.fmcw.f0);
  v("fmcw.f1", c.fmcw.f1);
  v("fmcw.period_s", c.fmcw.period_s);
  v("fmcw.amplitude", c.fmcw.amplitude);
  v("fmcw.lpf_cutoff_hz", c.fmcw.lpf_cutoff_hz);
  v("fmcw.lpf_order", c.fmcw.lpf_order);
  v("fmcw.beat_window", c.fmcw.beat_window);
  v("fmcw.beat_bins", c.fmcw.beat_bins);
  v("fmcw.beat_frames", c.fmcw.beat_frames);
  v("fmcw.beat_peak_max_hz", c.fmcw.beat_peak_max_hz);

  v("features.imu_frames", c.features.imu_frames);

  v("model.embedding", c.model.embedding);
  v("model.extractor_widths", c.model.extractor_widths);
  v("model.vocal_stem_h", c.model.vocal_stem_h);
  v("model.vocal_stem_w", c.model.vocal_stem_w);
  v("model.ultra_stem_h", c.model.ultra_stem_h);
  v("model.ultra_stem_w", c.model.ultra_stem_w);
  v("model.hidden", c.model.hidden);

  v("train.max_epochs", c.train.max_epochs);
  v("train.lr0", c.train.lr0);
  v("train.momentum", c.train.momentum);
  v("train.batch_size", c.train.batch_size);
  v("train.dropout", c.train.dropout);
  v("train.warmup", c.train.warmup);
  v("train.pretrain", c.train.pretrain);
  v("train.pretrain_epochs", c.train.pretrain_epochs);
  v("train.pretrain_lr", c.train.pretrain_lr);
  v("train.pretrain_samples", c.train.pretrain_samples);
  v("train.pretrain_batch", c.train.pretrain_batch);
  v("train.early_stop_loss", c.train.early_stop_loss);

  v("sim.snr_db", c.sim.snr_db);
  v("sim.user_gain_jitter_db", c.sim.user_gain_jitter_db);
  v("sim.user_delay_jitter_ms", c.sim.user_delay_jitter_ms);
  v("sim.confusable", c.sim.confusable);
  v("sim.confusable_scale", c.sim.confusable_scale);
  v("sim.voice_level", c.sim.voice_level);
  v("sim.clap_level", c.sim.clap_level);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

void parse_value(const std::string& key, const std::string& text, int& out) {
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || p != end) throw Error("config-value", key + " = " + text);
}

void parse_value(const std::string& key, const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    if (used != text.size()) throw Error("config-value", key + " = " + text);
  } catch (const std::logic_error&) {
    throw Error("config-value", key + " = " + text);
  }
}

void parse_value(const std::string& key, const std::string& text, bool& out) {
  if (text == "true" || text == "1") {
    out = true;
  } else if (text == "false" || text == "0") {
    out = false;
  } else {
    throw Error("config-value", key + " = " + text);
  }
}

void parse_value(const std::string& key, const std::string& text, std::vector<int>& out) {
  out.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    parse_value(key, trim(item), v);
    out.push_back(v);
  }
  if (out.empty()) throw Error("config-value", key + " = " + text);
}

std::string render(int v) { return std::to_string(v); }
std::string render(bool v) { return v ? "true" : "false"; }
std::string render(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string render(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config-open", path.string());
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error("config-syntax", path.string() + ":" + std::to_string(lineno));
    }
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  bool found = false;
  visit_fields(*this, [&](const char* name, auto& field) {
    if (!found && key == name) {
      parse_value(key, value, field);
      found = true;
    }
  });
  if (!found) throw Error("config-key", key);
}

std::string Config::dump() const {
  std::string out;
  visit_fields(const_cast<Config&>(*this), [&](const char* name, auto& field) {
    out += name;
    out += " = ";
    out += render(field);
    out += '\n';
  });
  return out;
}

std::string Config::hash() const { return hex64(fnv1a64(dump())); }

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace vahf
