#include "vahf/model/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "vahf/common/error.hpp"

namespace vahf::model {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoints are written in native little-endian order");

constexpr char kMagic[8] = {'V', 'A', 'H', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename Int>
Int read_int(std::istream& in) {
  Int v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error("checkpoint-format", "truncated header");
  return v;
}

nlohmann::json read_header(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw Error("checkpoint-format", "bad magic");
  if (read_int<std::uint32_t>(in) != kVersion) throw Error("checkpoint-format", "unsupported version");
  const auto len = read_int<std::uint64_t>(in);
  if (len > (1u << 26)) throw Error("checkpoint-format", "header too large");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw Error("checkpoint-format", "truncated header");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("checkpoint-format", e.what());
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, nlohmann::json header, const NamedTensors& tensors) {
  header["tensors"] = nlohmann::json::array();
  for (const auto& [name, v] : tensors) header["tensors"].push_back({{"name", name}, {"size", v->size()}});
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("checkpoint-format", "cannot write " + path.string());
  out.write(kMagic, 8);
  const std::uint32_t version = kVersion;
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, v] : tensors)
    out.write(reinterpret_cast<const char*>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(float)));
}

nlohmann::json read_checkpoint_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint-format", "cannot open " + path.string());
  return read_header(in);
}

nlohmann::json load_checkpoint(const std::filesystem::path& path, const NamedTensors& tensors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint-format", "cannot open " + path.string());
  auto header = read_header(in);
  const auto& list = header.at("tensors");
  if (list.size() != tensors.size()) throw Error("checkpoint-format", "tensor count differs from the model");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& [name, v] = tensors[i];
    if (list[i].at("name") != name || list[i].at("size").get<std::size_t>() != v->size())
      throw Error("checkpoint-format", "tensor " + name + " does not match the model");
    in.read(reinterpret_cast<char*>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(float)));
    if (!in) throw Error("checkpoint-format", "truncated tensor " + name);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error("checkpoint-format", "trailing bytes");
  return header;
}

nlohmann::json to_json(const ClassifierSpec& spec) {
  return {{"input_dims", spec.input_dims},
          {"fusion", spec.fusion == Fusion::Logit ? "logit" : "single"},
          {"hidden", spec.hidden},
          {"classes", spec.classes},
          {"dropout", spec.dropout}};
}

ClassifierSpec classifier_spec_from_json(const nlohmann::json& j) {
  try {
    ClassifierSpec s;
    s.input_dims = j.at("input_dims").get<std::vector<int>>();
    s.fusion = j.at("fusion") == "logit" ? Fusion::Logit : Fusion::Single;
    s.hidden = j.at("hidden");
    s.classes = j.at("classes");
    s.dropout = j.at("dropout");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error("checkpoint-format", e.what());
  }
}

void save_classifier(const std::filesystem::path& path, GestureClassifier<float>& model, nlohmann::json extra) {
  nlohmann::json header;
  header["kind"] = "classifier";
  header["spec"] = to_json(model.spec());
  header["extra"] = std::move(extra);
  save_checkpoint(path, header, model.named_tensors());
}

GestureClassifier<float> load_classifier(const std::filesystem::path& path, nlohmann::json* extra) {
  const auto header = read_checkpoint_header(path);
  if (header.value("kind", "") != "classifier") throw Error("checkpoint-format", "not a classifier checkpoint");
  GestureClassifier<float> model(classifier_spec_from_json(header.at("spec")), 0);
  load_checkpoint(path, model.named_tensors());
  if (extra) *extra = header.value("extra", nlohmann::json::object());
  return model;
}

}  // namespace vahf::model
