#include "tdsa/report.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "tdsa/util.hpp"

using nlohmann::json;

namespace tdsa {

std::optional<ReportShape> report_shape_from_name(std::string_view name) {
  std::string n = to_lower_ascii(trim(name));
  if (n == "table2") return ReportShape::Table2;
  if (n == "table3") return ReportShape::Table3;
  if (n == "table4") return ReportShape::Table4;
  if (n == "table5") return ReportShape::Table5;
  if (n == "table6") return ReportShape::Table6;
  if (n == "fig_dist" || n == "fig-dist" || n == "dist") return ReportShape::FigDist;
  return std::nullopt;
}

namespace {

std::string render_grid(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += "  ";
      out += row[i];
      out.append(widths[i] - row[i].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

std::vector<json> parse_records(const std::vector<std::string>& record_jsons,
                                std::string_view kind) {
  std::vector<json> out;
  for (const std::string& text : record_jsons) {
    json record = json::parse(text, nullptr, false);
    if (record.is_discarded() || !record.is_object()) continue;
    if (record.value("kind", "") == kind) out.push_back(std::move(record));
  }
  return out;
}

std::string pct(double v, int decimals = 2) { return format_double(v, decimals); }

Report table2(const std::vector<std::string>& records) {
  std::vector<json> stats = parse_records(records, "dataset_stats");
  std::sort(stats.begin(), stats.end(), [](const json& a, const json& b) {
    return a.value("dataset", "") < b.value("dataset", "");
  });
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Dataset", "Size", "M", "ATS", "Uniq", "AVG Len", "S1", "S2", "S3"});
  json out = json::array();
  for (const json& r : stats) {
    const json& s = r["stats"];
    grid.push_back({r.value("dataset", ""), std::to_string(s["size"].get<std::size_t>()),
                    r.value("medium", "W"), pct(s["ats"].get<double>()),
                    std::to_string(s["uniq"].get<std::size_t>()),
                    pct(s["avg_len"].get<double>()), pct(s["s1"].get<double>()),
                    pct(s["s2"].get<double>()), pct(s["s3"].get<double>())});
    out.push_back(r);
  }
  return {render_grid(grid), out.dump(2) + "\n"};
}

Report table3(const std::vector<std::string>& records) {
  std::vector<json> stats = parse_records(records, "lexicon_stats");
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Lexicon", "Positive", "Positive Lowered", "Negative", "Negative Lowered"});
  json out = json::array();
  for (const json& r : stats) {
    for (const json& row : r["rows"]) {
      grid.push_back({row.value("name", ""),
                      std::to_string(row["positive"].get<std::size_t>()),
                      std::to_string(row["positive_lowered"].get<std::size_t>()),
                      std::to_string(row["negative"].get<std::size_t>()),
                      std::to_string(row["negative_lowered"].get<std::size_t>())});
      out.push_back(row);
    }
  }
  return {render_grid(grid), out.dump(2) + "\n"};
}

std::string method_label(const json& record) {
  std::string method = record.value("method", "");
  std::string lexicon = record["config"].is_object()
                            ? record["config"].value("method.lexicon", "")
                            : "";
  if (!lexicon.empty() && method.size() && method.back() == '+') return method + ": " + lexicon;
  return method;
}

Report table4(const std::vector<std::string>& records) {
  std::vector<json> experiments = parse_records(records, "experiment");
  std::sort(experiments.begin(), experiments.end(), [](const json& a, const json& b) {
    return method_label(a) < method_label(b);
  });
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Method", "Accuracy %"});
  json out = json::array();
  for (const json& r : experiments) {
    double acc = r["metrics"]["accuracy"].get<double>();
    grid.push_back({method_label(r), pct(100.0 * acc)});
    out.push_back({{"method", method_label(r)}, {"accuracy", acc}});
  }
  return {render_grid(grid), out.dump(2) + "\n"};
}

Report table5(const std::vector<std::string>& records) {
  std::vector<json> studies = parse_records(records, "seed_study");
  std::sort(studies.begin(), studies.end(), [](const json& a, const json& b) {
    return a.value("method", "") < b.value("method", "");
  });
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Method", "Macro F1 (Max)", "Macro F1 (Mean)", "Seeds"});
  json out = json::array();
  for (const json& r : studies) {
    const json& s = r["summary"];
    grid.push_back({r.value("method", ""), pct(100.0 * s["max"].get<double>()),
                    pct(100.0 * s["mean"].get<double>()),
                    std::to_string(r["seeds"].size())});
    out.push_back(r);
  }
  return {render_grid(grid), out.dump(2) + "\n"};
}

Report table6(const std::vector<std::string>& records) {
  std::vector<json> experiments = parse_records(records, "experiment");

  const std::vector<std::string> method_order = {"target-ind", "target-dep-", "target-dep",
                                                 "target-dep+", "tdparse-", "tdparse",
                                                 "tdparse+", "lstm", "tdlstm", "tclstm"};
  std::set<std::string> methods_seen;
  std::set<std::string> datasets;
  std::map<std::pair<std::string, std::string>, double> cells;  // (dataset, method) -> F1
  for (const json& r : experiments) {
    std::string dataset = r.value("dataset", "");
    std::string method = r.value("method", "");
    datasets.insert(dataset);
    methods_seen.insert(method);
    cells[{dataset, method}] = r["metrics"]["macro_f1"].get<double>();
  }
  std::vector<std::string> methods;
  for (const std::string& m : method_order)
    if (methods_seen.count(m)) methods.push_back(m);
  for (const std::string& m : methods_seen)
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {"Dataset"};
  for (const std::string& m : methods) header.push_back(m + " F1");
  grid.push_back(header);

  json out;
  out["methods"] = methods;
  out["rows"] = json::array();
  std::map<std::string, std::pair<double, std::size_t>> method_sums;
  for (const std::string& dataset : datasets) {
    std::vector<std::string> row = {dataset};
    json jrow = {{"dataset", dataset}};
    for (const std::string& m : methods) {
      auto it = cells.find({dataset, m});
      if (it == cells.end()) {
        row.push_back("-");
        jrow[m] = nullptr;
      } else {
        row.push_back(pct(100.0 * it->second));
        jrow[m] = it->second;
        method_sums[m].first += it->second;
        method_sums[m].second += 1;
      }
    }
    grid.push_back(row);
    out["rows"].push_back(jrow);
  }
  std::vector<std::string> mean_row = {"Mean"};
  json jmean = {{"dataset", "Mean"}};
  for (const std::string& m : methods) {
    auto [sum, n] = method_sums[m];
    if (n == 0) {
      mean_row.push_back("-");
      jmean[m] = nullptr;
    } else {
      mean_row.push_back(pct(100.0 * sum / static_cast<double>(n)));
      jmean[m] = sum / static_cast<double>(n);
    }
  }
  grid.push_back(mean_row);
  out["mean"] = jmean;
  return {render_grid(grid), out.dump(2) + "\n"};
}

Report fig_dist(const std::vector<std::string>& records) {
  std::vector<json> studies = parse_records(records, "seed_study");
  std::sort(studies.begin(), studies.end(), [](const json& a, const json& b) {
    return a.value("method", "") < b.value("method", "");
  });
  json out = json::array();
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Method", "Dataset", "Seeds", "Mean", "Std", "Min", "Max"});
  for (const json& r : studies) {
    out.push_back({{"method", r.value("method", "")},
                   {"dataset", r.value("dataset", "")},
                   {"macro_f1", r["macro_f1"]},
                   {"accuracy", r["accuracy"]},
                   {"seeds", r["seeds"]}});
    const json& s = r["summary"];
    grid.push_back({r.value("method", ""), r.value("dataset", ""),
                    std::to_string(r["seeds"].size()), pct(100.0 * s["mean"].get<double>()),
                    pct(100.0 * s["std"].get<double>()), pct(100.0 * s["min"].get<double>()),
                    pct(100.0 * s["max"].get<double>())});
  }
  return {render_grid(grid), out.dump(2) + "\n"};
}

}  // namespace

Report report(const std::vector<std::string>& record_jsons, ReportShape shape) {
  switch (shape) {
    case ReportShape::Table2: return table2(record_jsons);
    case ReportShape::Table3: return table3(record_jsons);
    case ReportShape::Table4: return table4(record_jsons);
    case ReportShape::Table5: return table5(record_jsons);
    case ReportShape::Table6: return table6(record_jsons);
    case ReportShape::FigDist: return fig_dist(record_jsons);
  }
  fail(Errc::internal, "unknown report shape");
}

}  // namespace tdsa
