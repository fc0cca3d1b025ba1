#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vahf/model/classifier.hpp"

namespace vahf::model {

using NamedTensors = std::vector<std::pair<std::string, std::vector<float>*>>;

// Layout: "VAHFCKPT", u32 version, u64 header length, JSON header (caller
// fields plus a "tensors" list of {name, size}), then the float32 values in
// header order. Integers and floats are little-endian.
void save_checkpoint(const std::filesystem::path& path, nlohmann::json header, const NamedTensors& tensors);
/// Fills `tensors` by name and returns the header. Throws
/// Error("checkpoint-format") on bad magic, truncation or a name/size mismatch.
nlohmann::json load_checkpoint(const std::filesystem::path& path, const NamedTensors& tensors);
/// Header only, e.g. to rebuild the model before loading.
nlohmann::json read_checkpoint_header(const std::filesystem::path& path);

nlohmann::json to_json(const ClassifierSpec& spec);
ClassifierSpec classifier_spec_from_json(const nlohmann::json& j);

void save_classifier(const std::filesystem::path& path, GestureClassifier<float>& model, nlohmann::json extra = {});
GestureClassifier<float> load_classifier(const std::filesystem::path& path, nlohmann::json* extra = nullptr);

}  // namespace vahf::model
