#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vahf/harness/evaluation.hpp"

namespace vahf::harness {

struct Report {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<CellResult> grid;  // valid cells only; the JSON lists all 30
  std::vector<CellResult> reduced;
  std::vector<CellResult> ablation;
};

/// Pooled accuracy of a cell: confusion trace over confusion total.
double pooled_accuracy(const CellResult& c);
const CellResult* find_cell(const std::vector<CellResult>& cells, SensorCombo combo, ModelSelector sel);

nlohmann::json to_json(const CellResult& c);
CellResult cell_from_json(const nlohmann::json& j);
/// No timestamps or host details: identical inputs give identical bytes.
nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

std::string render_csv(const Report& r);
std::string render_summary(const Report& r);  // accuracy tables
std::string render_text(const Report& r);     // summary plus confusion grids

/// Writes report.json, report.csv and confusion.txt into dir.
void write_report(const std::filesystem::path& dir, const Report& r);
/// Throws Error("report-format").
Report read_report(const std::filesystem::path& json_path);

}  // namespace vahf::harness
