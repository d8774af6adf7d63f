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

#ifndef VESSEL_EVAL_REPORT_IO_H_
#define VESSEL_EVAL_REPORT_IO_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "vessel_eval/metrics.h"

namespace vessel_eval {

inline constexpr char kReportFormat[] = "vessel_eval.metrics";
inline constexpr char kReportVersion[] = "1.0";

// Metrics document: raw counters plus the ratios derived from them. Undefined
// ratios are null. Keys are sorted and output is byte-deterministic; doubles
// are written in shortest round-trip form.
std::string SerializeReport(const MetricReport& report);

// Reads counters back; derived ratios in the document are ignored.
absl::StatusOr<MetricReport> ParseReport(std::string_view document);

// Flat CSV exports, one row per (scope, pool, mode, class) and so on.
std::string PanopticCsv(const MetricReport& report);
std::string SemanticCsv(const MetricReport& report);
std::string RelationCsv(const MetricReport& report);

enum class TableShape {
  kMaterialInstances,  // table1: PQ/SQ/RQ, class-agnostic and with class.
  kSemantic,           // table2: IOU/precision/recall.
  kRelations,          // table3: precision/recall/IOU per relation class.
  kVesselInstances,    // table4: PQ/SQ/RQ of vessels.
};

absl::StatusOr<TableShape> ParseTableShape(std::string_view name);

enum class TableFormat { kMarkdown, kCsv };

absl::StatusOr<TableFormat> ParseTableFormat(std::string_view name);

// kAuto picks the per-vessel content scope for material and semantic tables
// when the report has one, and the scene scope otherwise.
enum class TableScope { kAuto, kScene, kContent };

absl::StatusOr<TableScope> ParseTableScope(std::string_view name);

// Renders one summary table; undefined cells print as U+2014. Fails with
// FailedPrecondition when the report lacks the data the shape needs.
absl::StatusOr<std::string> RenderTable(const MetricReport& report,
                                        TableShape shape, TableFormat format,
                                        TableScope scope = TableScope::kAuto);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_REPORT_IO_H_
