#include "vahf/features/feature_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "vahf/common/error.hpp"

namespace vahf::features {
namespace {

static_assert(std::endian::native == std::endian::little, "feature blobs are written in native little-endian order");

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}

}  // namespace

void write_bundle(const std::filesystem::path& stem, const FeatureBundle& bundle, const nlohmann::json& meta) {
  nlohmann::json side;
  side["meta"] = meta;
  side["vectors"] = nlohmann::json::array();
  std::ofstream blob(with_ext(stem, ".f32"), std::ios::binary);
  if (!blob) throw Error("feature-file", "cannot write " + with_ext(stem, ".f32").string());
  std::size_t offset = 0;
  auto put = [&](const char* name, const std::optional<std::vector<float>>& v) {
    if (!v) return;
    blob.write(reinterpret_cast<const char*>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(float)));
    side["vectors"].push_back({{"name", name}, {"offset", offset}, {"length", v->size()}});
    offset += v->size();
  };
  put("f_vol", bundle.f_vol);
  put("f_ultra", bundle.f_ultra);
  put("f_imu", bundle.f_imu);
  std::ofstream(with_ext(stem, ".json")) << side.dump(2) << '\n';
}

FeatureBundle read_bundle(const std::filesystem::path& stem, nlohmann::json* meta) {
  std::ifstream js(with_ext(stem, ".json"));
  std::ifstream blob(with_ext(stem, ".f32"), std::ios::binary);
  if (!js || !blob) throw Error("feature-file", "missing " + stem.string() + ".{json,f32}");
  nlohmann::json side;
  try {
    js >> side;
  } catch (const nlohmann::json::exception& e) {
    throw Error("feature-file", e.what());
  }
  const std::vector<char> bytes{std::istreambuf_iterator<char>(blob), std::istreambuf_iterator<char>()};
  const std::size_t total = bytes.size() / sizeof(float);
  if (bytes.size() % sizeof(float) != 0) throw Error("feature-file", "blob size not a multiple of 4");

  FeatureBundle b;
  std::size_t expected = 0;
  for (const auto& v : side.at("vectors")) {
    const auto off = v.at("offset").get<std::size_t>();
    const auto len = v.at("length").get<std::size_t>();
    if (off != expected || off + len > total) throw Error("feature-file", "vector extent out of range");
    std::vector<float> values(len);
    std::memcpy(values.data(), bytes.data() + off * sizeof(float), len * sizeof(float));
    const auto name = v.at("name").get<std::string>();
    if (name == "f_vol") b.f_vol = std::move(values);
    else if (name == "f_ultra") b.f_ultra = std::move(values);
    else if (name == "f_imu") b.f_imu = std::move(values);
    else throw Error("feature-file", "unknown vector " + name);
    expected = off + len;
  }
  if (expected != total) throw Error("feature-file", "blob length disagrees with sidecar");
  if (meta) *meta = side.value("meta", nlohmann::json::object());
  return b;
}

}  // namespace vahf::features
