#include "vahf/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vahf/common/error.hpp"

namespace vahf::harness {
namespace {

using nlohmann::json;

json confusion_json(const Confusion& c) {
  json rows = json::array();
  for (const auto& r : c) rows.push_back(r);
  return rows;
}

Confusion confusion_from(const json& j) {
  Confusion c{};
  require(j.is_array() && j.size() == kNumLabels, "report-format", "confusion shape");
  for (int i = 0; i < kNumLabels; ++i) {
    require(j[i].is_array() && j[i].size() == kNumLabels, "report-format", "confusion shape");
    for (int k = 0; k < kNumLabels; ++k) c[i][k] = j[i][k].get<int>();
  }
  return c;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  require(static_cast<bool>(out), "report-format", "cannot write " + p.string());
  out << s;
}

void csv_rows(std::ostringstream& os, const char* table, const std::vector<CellResult>& cells) {
  for (const auto& c : cells) {
    os << table << ',' << to_string(c.combo) << ',' << to_string(c.selector) << ',' << c.name << ','
       << fixed(c.mean_pct, 2) << ',' << fixed(c.sd_pct, 2) << ',' << fixed(100.0 * pooled_accuracy(c), 2) << ','
       << c.folds.size() << '\n';
  }
}

void confusion_block(std::ostringstream& os, const CellResult& c) {
  os << to_string(c.combo) << " / " << to_string(c.selector);
  if (!c.name.empty()) os << " / " << c.name;
  os << "  (" << fixed(c.mean_pct, 1) << " +- " << fixed(c.sd_pct, 1) << " %)\n";
  os << "truth\\pred";
  for (int l : c.labels) os << std::string(6 - std::to_string(l).size(), ' ') << l;
  os << '\n';
  for (int t : c.labels) {
    os << std::string(10 - std::to_string(t).size(), ' ') << t;
    for (int p : c.labels) {
      const auto v = std::to_string(c.confusion[t][p]);
      os << std::string(v.size() < 6 ? 6 - v.size() : 1, ' ') << v;
    }
    os << '\n';
  }
  os << '\n';
}

}  // namespace

double pooled_accuracy(const CellResult& c) {
  long long hit = 0, all = 0;
  for (int i = 0; i < kNumLabels; ++i)
    for (int k = 0; k < kNumLabels; ++k) {
      all += c.confusion[i][k];
      if (i == k) hit += c.confusion[i][k];
    }
  return all ? static_cast<double>(hit) / static_cast<double>(all) : 0.0;
}

const CellResult* find_cell(const std::vector<CellResult>& cells, SensorCombo combo, ModelSelector sel) {
  for (const auto& c : cells)
    if (c.combo == combo && c.selector == sel) return &c;
  return nullptr;
}

json to_json(const CellResult& c) {
  json j{{"combo", std::string(to_string(c.combo))},
         {"selector", std::string(to_string(c.selector))},
         {"valid", true},
         {"labels", c.labels},
         {"mean", c.mean_pct},
         {"sd", c.sd_pct},
         {"pooled_accuracy", 100.0 * pooled_accuracy(c)},
         {"confusion", confusion_json(c.confusion)}};
  if (!c.name.empty()) j["name"] = c.name;
  json folds = json::array();
  for (const auto& f : c.folds) {
    folds.push_back({{"test_user", f.test_user},
                     {"n", f.truth.size()},
                     {"accuracy", 100.0 * f.accuracy},
                     {"epochs", f.epochs},
                     {"tau", f.tau},
                     {"confusion", confusion_json(f.confusion)}});
  }
  j["folds"] = std::move(folds);
  return j;
}

CellResult cell_from_json(const json& j) {
  try {
    CellResult c;
    c.combo = parse_combo(j.at("combo").get<std::string>());
    c.selector = parse_selector(j.at("selector").get<std::string>());
    c.name = j.value("name", std::string{});
    c.labels = j.at("labels").get<std::vector<int>>();
    c.mean_pct = j.at("mean").get<double>();
    c.sd_pct = j.at("sd").get<double>();
    c.confusion = confusion_from(j.at("confusion"));
    for (const auto& fj : j.at("folds")) {
      FoldResult f;
      f.test_user = fj.at("test_user").get<int>();
      f.accuracy = fj.at("accuracy").get<double>() / 100.0;
      f.epochs = fj.at("epochs").get<int>();
      f.tau = fj.at("tau").get<double>();
      f.confusion = confusion_from(fj.at("confusion"));
      // Per-sample lists are not stored; rebuild them from the confusion.
      for (int t = 0; t < kNumLabels; ++t)
        for (int p = 0; p < kNumLabels; ++p)
          for (int n = 0; n < f.confusion[t][p]; ++n) {
            f.truth.push_back(t);
            f.predicted.push_back(p);
          }
      c.folds.push_back(std::move(f));
    }
    return c;
  } catch (const json::exception& e) {
    throw Error("report-format", e.what());
  }
}

json to_json(const Report& r) {
  json grid = json::array();
  for (auto combo : kAllCombos)
    for (auto sel : kAllSelectors) {
      if (const auto* c = find_cell(r.grid, combo, sel)) {
        grid.push_back(to_json(*c));
      } else {
        grid.push_back({{"combo", std::string(to_string(combo))},
                        {"selector", std::string(to_string(sel))},
                        {"valid", is_valid(combo, sel)},
                        {"evaluated", false}});
      }
    }
  json reduced = json::array(), ablation = json::array();
  for (const auto& c : r.reduced) reduced.push_back(to_json(c));
  for (const auto& c : r.ablation) ablation.push_back(to_json(c));
  return {{"config_hash", r.config_hash}, {"seed", r.seed}, {"grid", grid}, {"reduced", reduced}, {"ablation", ablation}};
}

Report report_from_json(const json& j) {
  try {
    Report r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("grid"))
      if (c.contains("folds")) r.grid.push_back(cell_from_json(c));
    for (const auto& c : j.at("reduced")) r.reduced.push_back(cell_from_json(c));
    for (const auto& c : j.at("ablation")) r.ablation.push_back(cell_from_json(c));
    return r;
  } catch (const json::exception& e) {
    throw Error("report-format", e.what());
  }
}

std::string render_csv(const Report& r) {
  std::ostringstream os;
  os << "table,combo,selector,name,mean,sd,pooled,folds\n";
  csv_rows(os, "grid", r.grid);
  csv_rows(os, "reduced", r.reduced);
  csv_rows(os, "ablation", r.ablation);
  return os.str();
}

std::string render_summary(const Report& r) {
  std::ostringstream os;
  os << "seed " << r.seed << ", config " << r.config_hash << "\n\n";
  if (!r.grid.empty()) {
    os << "accuracy (%), mean +- sd over held-out users\n";
    os << "          ";
    for (auto s : kAllSelectors) {
      const std::string n(to_string(s));
      os << n << std::string(14 - n.size(), ' ');
    }
    os << '\n';
    for (auto c : kAllCombos) {
      const std::string n(to_string(c));
      os << n << std::string(10 - n.size(), ' ');
      for (auto s : kAllSelectors) {
        std::string cell = "-";
        if (const auto* x = find_cell(r.grid, c, s)) cell = fixed(x->mean_pct, 1) + "+-" + fixed(x->sd_pct, 1);
        os << cell << std::string(cell.size() < 14 ? 14 - cell.size() : 1, ' ');
      }
      os << '\n';
    }
    os << '\n';
  }
  auto rows = [&](const char* title, const std::vector<CellResult>& cells) {
    if (cells.empty()) return;
    os << title << '\n';
    for (const auto& c : cells) {
      const std::string head = std::string(to_string(c.combo)) + " " + std::string(to_string(c.selector)) + " " + c.name;
      os << "  " << head << std::string(head.size() < 32 ? 32 - head.size() : 1, ' ') << fixed(c.mean_pct, 1) << " +- "
         << fixed(c.sd_pct, 1) << '\n';
    }
    os << '\n';
  };
  rows("reduced gesture sets (%)", r.reduced);
  rows("ablation (%)", r.ablation);
  return os.str();
}

std::string render_text(const Report& r) {
  std::ostringstream os;
  os << render_summary(r);
  for (const auto* cells : {&r.grid, &r.reduced, &r.ablation})
    for (const auto& c : *cells) confusion_block(os, c);
  return os.str();
}

void write_report(const std::filesystem::path& dir, const Report& r) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", to_json(r).dump(2) + "\n");
  write_text(dir / "report.csv", render_csv(r));
  write_text(dir / "confusion.txt", render_text(r));
}

Report read_report(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  require(static_cast<bool>(in), "report-format", "cannot open " + json_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("report-format", e.what());
  }
  return report_from_json(j);
}

}  // namespace vahf::harness
