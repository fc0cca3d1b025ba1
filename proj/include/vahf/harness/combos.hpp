#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace vahf::harness {

enum class SensorCombo { RE, LE_RE, LE_RE_W, ALL_4ch, ALL_6ch };
enum class ModelSelector { V, U, I, VU, ALL_L, ALL_F };

inline constexpr std::array<SensorCombo, 5> kAllCombos{SensorCombo::RE, SensorCombo::LE_RE, SensorCombo::LE_RE_W,
                                                       SensorCombo::ALL_4ch, SensorCombo::ALL_6ch};
inline constexpr std::array<ModelSelector, 6> kAllSelectors{ModelSelector::V,  ModelSelector::U,
                                                            ModelSelector::I,  ModelSelector::VU,
                                                            ModelSelector::ALL_L, ModelSelector::ALL_F};

// Display names: "RE", "LE+RE", ..., "V+U", "ALL-L".
std::string_view to_string(SensorCombo c);
std::string_view to_string(ModelSelector s);
/// Throws Error("unknown-combo") / Error("unknown-selector").
SensorCombo parse_combo(std::string_view name);
ModelSelector parse_selector(std::string_view name);

/// Audio channels of a combo, in canonical order.
std::vector<std::string> combo_channels(SensorCombo c);
bool has_watch(SensorCombo c);
bool has_ring(SensorCombo c);

bool uses_vocal(ModelSelector s);
bool uses_ultra(ModelSelector s);
bool uses_imu(ModelSelector s);

/// Ultrasound needs the watch (the only transmitter), IMU needs the ring.
bool is_valid(SensorCombo c, ModelSelector s);
/// Throws Error("combo-selector-invalid") for the invalid cells.
void require_valid(SensorCombo c, ModelSelector s);

}  // namespace vahf::harness
