// Copyright 2026 The Vessel Eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vessel_eval/report_io.h"

#include <array>
#include <charconv>
#include <cstdio>
#include <set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "str_cat.h"

namespace vessel_eval {
namespace {

using nlohmann::json;

json RatioJson(const Ratio& r) { return r.has_value() ? json(*r) : json(); }

json MacroJson(const MacroTable& table) {
  json out = json::object();
  for (const auto& [label, metrics] : table) {
    json& row = out[label];
    for (const auto& [metric, stat] : metrics) {
      row[metric] = {{"sum", stat.sum},
                     {"support", stat.support},
                     {"mean", RatioJson(stat.Mean())}};
    }
  }
  return out;
}

json TableJson(const PanopticTable& table) {
  json classes = json::object();
  for (const auto& [label, c] : table.classes) {
    const PanopticScores s = ScorePanoptic(c);
    classes[label] = {{"tp", c.tp},
                      {"fp", c.fp},
                      {"fn", c.fn},
                      {"iou_sum", c.iou_sum},
                      {"gt_segments", c.gt_segments},
                      {"pq", RatioJson(s.pq)},
                      {"sq", RatioJson(s.sq)},
                      {"rq", RatioJson(s.rq)}};
  }
  return {{"classes", std::move(classes)},
          {"unmatched_predictions", table.unmatched_predictions}};
}

json ScopeJson(const ScopeReport& scope) {
  json semantic = json::object();
  for (const auto& [label, c] : scope.semantic) {
    const SemanticScores s = ScoreSemantic(c);
    semantic[label] = {{"intersection", c.intersection},
                       {"union", c.union_px},
                       {"gt_px", c.gt_px},
                       {"pred_px", c.pred_px},
                       {"iou", RatioJson(s.iou)},
                       {"precision", RatioJson(s.precision)},
                       {"recall", RatioJson(s.recall)}};
  }
  json pools = json::object();
  for (const auto& [name, pool] : scope.pools) {
    pools[name] = {
        {"with_class", TableJson(pool.with_class)},
        {"class_agnostic", TableJson(pool.class_agnostic)},
        {"with_class_macro", MacroJson(pool.with_class_macro)},
        {"class_agnostic_macro", MacroJson(pool.class_agnostic_macro)}};
  }
  return {{"units", scope.units},
          {"semantic", std::move(semantic)},
          {"semantic_macro", MacroJson(scope.semantic_macro)},
          {"pools", std::move(pools)}};
}

MacroTable ParseMacro(const json& node) {
  MacroTable table;
  for (const auto& [label, metrics] : node.items()) {
    for (const auto& [metric, stat] : metrics.items()) {
      MacroStat& s = table[label][metric];
      s.sum = stat.at("sum").get<double>();
      s.support = stat.at("support").get<int64_t>();
    }
  }
  return table;
}

PanopticTable ParseTable(const json& node, MatchMode mode) {
  PanopticTable table;
  table.mode = mode;
  table.unmatched_predictions = node.at("unmatched_predictions").get<int64_t>();
  for (const auto& [label, c] : node.at("classes").items()) {
    PanopticCounts& counts = table.classes[label];
    counts.tp = c.at("tp").get<int64_t>();
    counts.fp = c.at("fp").get<double>();
    counts.fn = c.at("fn").get<int64_t>();
    counts.iou_sum = c.at("iou_sum").get<double>();
    counts.gt_segments = c.at("gt_segments").get<int64_t>();
  }
  return table;
}

ScopeReport ParseScope(const json& node) {
  ScopeReport scope;
  scope.units = node.at("units").get<int64_t>();
  for (const auto& [label, c] : node.at("semantic").items()) {
    SemanticCounts& counts = scope.semantic[label];
    counts.intersection = c.at("intersection").get<int64_t>();
    counts.union_px = c.at("union").get<int64_t>();
    counts.gt_px = c.at("gt_px").get<int64_t>();
    counts.pred_px = c.at("pred_px").get<int64_t>();
  }
  scope.semantic_macro = ParseMacro(node.at("semantic_macro"));
  for (const auto& [name, p] : node.at("pools").items()) {
    PoolReport& pool = scope.pools[name];
    pool.with_class = ParseTable(p.at("with_class"), MatchMode::kWithClass);
    pool.class_agnostic =
        ParseTable(p.at("class_agnostic"), MatchMode::kClassAgnostic);
    pool.with_class_macro = ParseMacro(p.at("with_class_macro"));
    pool.class_agnostic_macro = ParseMacro(p.at("class_agnostic_macro"));
  }
  return scope;
}

// Shortest text that reads back as the same double.
std::string Exact(double value) {
  std::array<char, 32> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string Exact(const Ratio& r) { return r.has_value() ? Exact(*r) : ""; }

constexpr const char* kAbsentCell = "—";

std::string Cell(const Ratio& r) {
  if (!r.has_value()) return kAbsentCell;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *r);
  return buf;
}

std::string CsvCell(const Ratio& r) { return Exact(r); }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string Render(const Table& table, TableFormat format) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    if (format == TableFormat::kCsv) {
      for (size_t i = 0; i < cells.size(); ++i) {
        out += (i == 0 ? "" : ",") + cells[i];
      }
    } else {
      out += "|";
      for (const std::string& cell : cells) out += " " + cell + " |";
    }
    out += "\n";
  };
  line(table.header);
  if (format == TableFormat::kMarkdown) {
    out += "|";
    for (size_t i = 0; i < table.header.size(); ++i) {
      out += i == 0 ? " --- |" : " ---: |";
    }
    out += "\n";
  }
  for (const auto& row : table.rows) line(row);
  return out;
}

// A pool no scene contributed to renders as an empty table.
const PoolReport& FindPool(const ScopeReport& scope, const char* name) {
  static const PoolReport* const kEmpty = new PoolReport();
  auto it = scope.pools.find(name);
  return it == scope.pools.end() ? *kEmpty : it->second;
}

Ratio MacroMean(const MacroTable& table, const std::string& label,
                const char* metric) {
  auto row = table.find(label);
  if (row == table.end()) return Ratio();
  auto stat = row->second.find(metric);
  return stat == row->second.end() ? Ratio() : stat->second.Mean();
}

int64_t MacroSupport(const MacroTable& table, const std::string& label,
                     const char* metric) {
  auto row = table.find(label);
  if (row == table.end()) return 0;
  auto stat = row->second.find(metric);
  return stat == row->second.end() ? 0 : stat->second.support;
}

PanopticScores TableScores(const PanopticTable& table,
                           const std::string& label) {
  auto it = table.classes.find(label);
  return it == table.classes.end() ? PanopticScores{}
                                   : ScorePanoptic(it->second);
}

PanopticScores MacroScores(const MacroTable& table, const std::string& label) {
  return {MacroMean(table, label, "pq"), MacroMean(table, label, "sq"),
          MacroMean(table, label, "rq")};
}

Table InstanceTable(const PoolReport& pool, bool macro, TableFormat format) {
  Table t;
  if (format == TableFormat::kCsv) {
    t.header = {"class",         "agnostic_pq",   "agnostic_sq",
                "agnostic_rq",   "with_class_pq", "with_class_sq",
                "with_class_rq", "support"};
  } else {
    t.header = {"Class",
                "Class-agnostic PQ",
                "Class-agnostic SQ",
                "Class-agnostic RQ",
                "With class PQ",
                "With class SQ",
                "With class RQ",
                "GT segments"};
  }
  std::set<std::string> labels;
  for (const auto& [label, unused] : pool.class_agnostic.classes) {
    labels.insert(label);
  }
  for (const auto& [label, unused] : pool.with_class.classes) {
    labels.insert(label);
  }
  auto cell = format == TableFormat::kCsv ? CsvCell : Cell;
  for (const std::string& label : labels) {
    const PanopticScores a = macro
                                 ? MacroScores(pool.class_agnostic_macro, label)
                                 : TableScores(pool.class_agnostic, label);
    const PanopticScores w = macro ? MacroScores(pool.with_class_macro, label)
                                   : TableScores(pool.with_class, label);
    auto it = pool.class_agnostic.classes.find(label);
    const int64_t support =
        it == pool.class_agnostic.classes.end() ? 0 : it->second.gt_segments;
    t.rows.push_back({label, cell(a.pq), cell(a.sq), cell(a.rq), cell(w.pq),
                      cell(w.sq), cell(w.rq), std::to_string(support)});
  }
  return t;
}

Table SemanticTable(const ScopeReport& scope, bool macro, TableFormat format) {
  Table t;
  const char* support_name = macro ? "vessels" : "gt_px";
  if (format == TableFormat::kCsv) {
    t.header = {"class", "miou", "precision", "recall", support_name};
  } else {
    t.header = {"Class", "mIOU", "Precision", "Recall",
                macro ? "Vessels" : "GT pixels"};
  }
  auto cell = format == TableFormat::kCsv ? CsvCell : Cell;
  for (const auto& [label, counts] : scope.semantic) {
    SemanticScores s;
    int64_t support = 0;
    if (macro) {
      s = {MacroMean(scope.semantic_macro, label, "iou"),
           MacroMean(scope.semantic_macro, label, "precision"),
           MacroMean(scope.semantic_macro, label, "recall")};
      support = MacroSupport(scope.semantic_macro, label, "iou");
    } else {
      s = ScoreSemantic(counts);
      support = counts.gt_px;
    }
    t.rows.push_back({label, cell(s.iou), cell(s.precision), cell(s.recall),
                      std::to_string(support)});
  }
  return t;
}

constexpr std::pair<const char*, const char*> kRelationRows[] = {
    {"linked", "Linked"},
    {"inside", "Inside"},
    {"contain", "Contain"},
    {"none", "None"}};

Table RelationTable(const MetricReport& report, TableFormat format) {
  Table t;
  if (format == TableFormat::kCsv) {
    t.header = {"relation", "precision", "recall", "iou", "support"};
  } else {
    t.header = {"Relationship", "Precision", "Recall", "IOU", "Support"};
  }
  auto cell = format == TableFormat::kCsv ? CsvCell : Cell;
  for (const auto& [key, title] : kRelationRows) {
    auto it = report.relations.find(key);
    const RelationCounts c =
        it == report.relations.end() ? RelationCounts{} : it->second;
    const RelationScores s = ScoreRelation(c);
    t.rows.push_back({format == TableFormat::kCsv ? key : title,
                      cell(s.precision), cell(s.recall), cell(s.iou),
                      std::to_string(c.tp + c.fn)});
  }
  return t;
}

}  // namespace

std::string SerializeReport(const MetricReport& report) {
  json doc = {{"format", kReportFormat},
              {"version", kReportVersion},
              {"config",
               {{"per_vessel", report.config.per_vessel},
                {"relations", report.config.relations}}},
              {"scene_count", report.scene_count},
              {"scene", ScopeJson(report.scene)}};
  if (report.config.per_vessel) doc["content"] = ScopeJson(report.content);
  if (report.config.relations) {
    json relations = json::object();
    for (const auto& [name, c] : report.relations) {
      const RelationScores s = ScoreRelation(c);
      relations[name] = {{"tp", c.tp},
                         {"fp", c.fp},
                         {"fn", c.fn},
                         {"precision", RatioJson(s.precision)},
                         {"recall", RatioJson(s.recall)},
                         {"iou", RatioJson(s.iou)}};
    }
    doc["relations"] = std::move(relations);
    doc["unmapped_pred_relations"] = report.unmapped_pred_relations;
  }
  return doc.dump(1) + "\n";
}

absl::StatusOr<MetricReport> ParseReport(std::string_view document) {
  try {
    const json doc = json::parse(document);
    if (doc.at("format").get<std::string>() != kReportFormat) {
      return absl::InvalidArgumentError("not a metrics document");
    }
    if (doc.at("version").get<std::string>() != kReportVersion) {
      return absl::InvalidArgumentError(
          StrCat("unsupported metrics version ",
                 doc.at("version").get<std::string>()));
    }
    MetricReport report;
    report.config.per_vessel = doc.at("config").at("per_vessel").get<bool>();
    report.config.relations = doc.at("config").at("relations").get<bool>();
    report.scene_count = doc.at("scene_count").get<int64_t>();
    report.scene = ParseScope(doc.at("scene"));
    if (report.config.per_vessel) {
      report.content = ParseScope(doc.at("content"));
    }
    if (report.config.relations) {
      for (const auto& [name, c] : doc.at("relations").items()) {
        report.relations[name] = {c.at("tp").get<int64_t>(),
                                  c.at("fp").get<int64_t>(),
                                  c.at("fn").get<int64_t>()};
      }
      report.unmapped_pred_relations =
          doc.at("unmapped_pred_relations").get<int64_t>();
    }
    return report;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        StrCat("malformed metrics document: ", e.what()));
  }
}

std::string PanopticCsv(const MetricReport& report) {
  std::string out =
      "scope,pool,mode,class,pq,sq,rq,tp,fp,fn,iou_sum,gt_segments\n";
  auto emit = [&](const char* scope_name, const ScopeReport& scope) {
    for (const auto& [pool_name, pool] : scope.pools) {
      for (const auto& [mode, table] :
           {std::pair<const char*, const PanopticTable*>{"class_agnostic",
                                                         &pool.class_agnostic},
            {"with_class", &pool.with_class}}) {
        for (const auto& [label, c] : table->classes) {
          const PanopticScores s = ScorePanoptic(c);
          out += StrCat(scope_name, ",", pool_name, ",", mode, ",", label, ",",
                        Exact(s.pq), ",", Exact(s.sq), ",", Exact(s.rq), ",",
                        c.tp, ",", Exact(c.fp), ",", c.fn, ",",
                        Exact(c.iou_sum), ",", c.gt_segments, "\n");
        }
      }
    }
  };
  emit("scene", report.scene);
  if (report.config.per_vessel) emit("content", report.content);
  return out;
}

std::string SemanticCsv(const MetricReport& report) {
  std::string out =
      "scope,class,iou,precision,recall,intersection,union,gt_px,pred_px,"
      "macro_iou,macro_precision,macro_recall,vessels\n";
  auto emit = [&](const char* scope_name, const ScopeReport& scope) {
    for (const auto& [label, c] : scope.semantic) {
      const SemanticScores s = ScoreSemantic(c);
      out +=
          StrCat(scope_name, ",", label, ",", Exact(s.iou), ",",
                 Exact(s.precision), ",", Exact(s.recall), ",", c.intersection,
                 ",", c.union_px, ",", c.gt_px, ",", c.pred_px, ",",
                 Exact(MacroMean(scope.semantic_macro, label, "iou")), ",",
                 Exact(MacroMean(scope.semantic_macro, label, "precision")),
                 ",", Exact(MacroMean(scope.semantic_macro, label, "recall")),
                 ",", MacroSupport(scope.semantic_macro, label, "iou"), "\n");
    }
  };
  emit("scene", report.scene);
  if (report.config.per_vessel) emit("content", report.content);
  return out;
}

std::string RelationCsv(const MetricReport& report) {
  std::string out = "relation,precision,recall,iou,tp,fp,fn\n";
  for (const auto& [key, title] : kRelationRows) {
    auto it = report.relations.find(key);
    if (it == report.relations.end()) continue;
    const RelationScores s = ScoreRelation(it->second);
    out += StrCat(key, ",", Exact(s.precision), ",", Exact(s.recall), ",",
                  Exact(s.iou), ",", it->second.tp, ",", it->second.fp, ",",
                  it->second.fn, "\n");
  }
  return out;
}

absl::StatusOr<TableShape> ParseTableShape(std::string_view name) {
  if (name == "table1") return TableShape::kMaterialInstances;
  if (name == "table2") return TableShape::kSemantic;
  if (name == "table3") return TableShape::kRelations;
  if (name == "table4") return TableShape::kVesselInstances;
  return absl::InvalidArgumentError(StrCat("unknown table shape '", name, "'"));
}

absl::StatusOr<TableFormat> ParseTableFormat(std::string_view name) {
  if (name == "markdown") return TableFormat::kMarkdown;
  if (name == "csv") return TableFormat::kCsv;
  return absl::InvalidArgumentError(
      StrCat("unknown table format '", name, "'"));
}

absl::StatusOr<TableScope> ParseTableScope(std::string_view name) {
  if (name == "auto") return TableScope::kAuto;
  if (name == "scene") return TableScope::kScene;
  if (name == "content") return TableScope::kContent;
  return absl::InvalidArgumentError(StrCat("unknown table scope '", name, "'"));
}

absl::StatusOr<std::string> RenderTable(const MetricReport& report,
                                        TableShape shape, TableFormat format,
                                        TableScope scope) {
  if (scope == TableScope::kContent && !report.config.per_vessel) {
    return absl::FailedPreconditionError(
        "report has no per-vessel content scope");
  }
  const bool content = scope == TableScope::kContent ||
                       (scope == TableScope::kAuto && report.config.per_vessel);
  switch (shape) {
    case TableShape::kMaterialInstances: {
      const ScopeReport& s = content ? report.content : report.scene;
      return Render(InstanceTable(FindPool(s, kPoolMaterial), content, format),
                    format);
    }
    case TableShape::kSemantic:
      return Render(SemanticTable(content ? report.content : report.scene,
                                  content, format),
                    format);
    case TableShape::kRelations:
      if (!report.config.relations) {
        return absl::FailedPreconditionError("report has no relation counters");
      }
      return Render(RelationTable(report, format), format);
    case TableShape::kVesselInstances: {
      if (scope == TableScope::kContent) {
        return absl::FailedPreconditionError(
            "vessel instances are evaluated at scene scope only");
      }
      return Render(InstanceTable(FindPool(report.scene, kPoolVessel),
                                  /*macro=*/false, format),
                    format);
    }
  }
  return absl::InternalError("unhandled table shape");
}

}  // namespace vessel_eval
