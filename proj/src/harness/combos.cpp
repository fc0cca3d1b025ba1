#include "vahf/harness/combos.hpp"

#include "vahf/common/error.hpp"

namespace vahf::harness {

std::string_view to_string(SensorCombo c) {
  switch (c) {
    case SensorCombo::RE: return "RE";
    case SensorCombo::LE_RE: return "LE+RE";
    case SensorCombo::LE_RE_W: return "LE+RE+W";
    case SensorCombo::ALL_4ch: return "ALL-4ch";
    case SensorCombo::ALL_6ch: return "ALL-6ch";
  }
  return "?";
}

std::string_view to_string(ModelSelector s) {
  switch (s) {
    case ModelSelector::V: return "V";
    case ModelSelector::U: return "U";
    case ModelSelector::I: return "I";
    case ModelSelector::VU: return "V+U";
    case ModelSelector::ALL_L: return "ALL-L";
    case ModelSelector::ALL_F: return "ALL-F";
  }
  return "?";
}

SensorCombo parse_combo(std::string_view name) {
  for (auto c : kAllCombos)
    if (to_string(c) == name) return c;
  throw Error("unknown-combo", std::string(name));
}

ModelSelector parse_selector(std::string_view name) {
  for (auto s : kAllSelectors)
    if (to_string(s) == name) return s;
  throw Error("unknown-selector", std::string(name));
}

std::vector<std::string> combo_channels(SensorCombo c) {
  switch (c) {
    case SensorCombo::RE: return {"re_outer", "re_inner"};
    case SensorCombo::LE_RE: return {"le_outer", "le_inner", "re_outer", "re_inner"};
    case SensorCombo::LE_RE_W: return {"le_outer", "re_outer", "watch"};
    case SensorCombo::ALL_4ch: return {"le_outer", "re_outer", "watch", "ring"};
    case SensorCombo::ALL_6ch: return {"le_outer", "le_inner", "re_outer", "re_inner", "watch", "ring"};
  }
  return {};
}

bool has_watch(SensorCombo c) {
  return c == SensorCombo::LE_RE_W || c == SensorCombo::ALL_4ch || c == SensorCombo::ALL_6ch;
}
bool has_ring(SensorCombo c) { return c == SensorCombo::ALL_4ch || c == SensorCombo::ALL_6ch; }

bool uses_vocal(ModelSelector s) {
  return s == ModelSelector::V || s == ModelSelector::VU || s == ModelSelector::ALL_L || s == ModelSelector::ALL_F;
}
bool uses_ultra(ModelSelector s) {
  return s == ModelSelector::U || s == ModelSelector::VU || s == ModelSelector::ALL_L || s == ModelSelector::ALL_F;
}
bool uses_imu(ModelSelector s) {
  return s == ModelSelector::I || s == ModelSelector::ALL_L || s == ModelSelector::ALL_F;
}

bool is_valid(SensorCombo c, ModelSelector s) {
  if (uses_ultra(s) && !has_watch(c)) return false;
  if (uses_imu(s) && !has_ring(c)) return false;
  return true;
}

void require_valid(SensorCombo c, ModelSelector s) {
  if (!is_valid(c, s))
    throw Error("combo-selector-invalid", std::string(to_string(c)) + "/" + std::string(to_string(s)));
}

}  // namespace vahf::harness
