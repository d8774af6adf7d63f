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

// Subcommands of the vessel_eval tool. Each returns a process exit code:
//   0  success;
//   1  the inputs parse but violate an invariant (or do not fit the request);
//   2  I/O, syntax or usage failure.

#ifndef VESSEL_EVAL_COMMANDS_H_
#define VESSEL_EVAL_COMMANDS_H_

#include <optional>
#include <ostream>
#include <string>

#include "absl/status/statusor.h"

namespace vessel_eval {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitFailure = 2;

// Environment variable holding the default evaluation worker count.
inline constexpr char kWorkersEnv[] = "VESSEL_EVAL_WORKERS";

// Worker count from kWorkersEnv, or 1 if it is unset.
absl::StatusOr<int> DefaultWorkers();

// Checks every *.json document of `path` (a directory, or a single file).
int RunValidate(const std::string& path, std::ostream& out, std::ostream& err);

enum class OutputFormat { kStructured, kCsv, kMarkdown };

absl::StatusOr<OutputFormat> ParseOutputFormat(const std::string& name);

struct EvaluateOptions {
  std::string gt_dir;
  std::string pred_dir;
  bool per_vessel = false;
  bool relations = false;
  int workers = 1;
  // Files are written here; without it the report goes to `out`.
  std::optional<std::string> out_dir;
  OutputFormat format = OutputFormat::kStructured;
};

// Pairs documents by file name. A GT document without a prediction is scored
// as all false negatives, with a warning.
int RunEvaluate(const EvaluateOptions& options, std::ostream& out,
                std::ostream& err);

// Writes <out_dir>/gt/*.json, <out_dir>/pred/*.json and
// <out_dir>/expected.json.
int RunGenerate(const std::string& plan_path, const std::string& out_dir,
                std::ostream& out, std::ostream& err);

// Writes a PPM overlay of one scene document.
int RunRender(const std::string& scene_path, const std::string& image_path,
              std::ostream& out, std::ostream& err);

struct ReportOptions {
  std::string metrics_path;
  std::string shape;
  std::string format = "markdown";
  std::string scope = "auto";
  // Written here; without it the table goes to `out`.
  std::optional<std::string> out_path;
};

int RunReport(const ReportOptions& options, std::ostream& out,
              std::ostream& err);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_COMMANDS_H_
