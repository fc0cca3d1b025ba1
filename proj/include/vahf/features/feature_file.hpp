#pragma once

#include <filesystem>

#include <json.hpp>

#include "vahf/features/features.hpp"

namespace vahf::features {

/// `<stem>.f32` holds the present vectors back to back as little-endian
/// float32; `<stem>.json` lists their names, offsets and lengths plus `meta`
/// (mode, selector, config hash, labels ...).
void write_bundle(const std::filesystem::path& stem, const FeatureBundle& bundle, const nlohmann::json& meta);
/// Throws Error("feature-file") on a missing, truncated or inconsistent pair.
FeatureBundle read_bundle(const std::filesystem::path& stem, nlohmann::json* meta = nullptr);

}  // namespace vahf::features
