#pragma once

#include <array>
#include <string>
#include <string_view>

namespace vahf {

// Canonical channel order; every ordered channel list in the project follows it.
inline constexpr std::array<std::string_view, 6> kChannelNames{"le_outer", "le_inner", "re_outer",
                                                               "re_inner", "watch",    "ring"};

/// Index into kChannelNames, -1 if unknown.
inline int channel_index(std::string_view name) {
  for (std::size_t i = 0; i < kChannelNames.size(); ++i)
    if (kChannelNames[i] == name) return static_cast<int>(i);
  return -1;
}

inline constexpr int kNumLabels = 9;
inline constexpr int kEmptyLabel = 8;

inline constexpr std::array<std::string_view, kNumLabels> kLabelNames{
    "pinch ear rim",        "calling gesture",
    "support cheek with palm", "cover mouth with palm",
    "cover ear with arched palm", "thinking face",
    "palm beside nose and mouth", "cover mouth with fist",
    "empty"};

}  // namespace vahf
