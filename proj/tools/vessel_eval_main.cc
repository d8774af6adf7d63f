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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vessel_eval/commands.h"

int main(int argc, char** argv) {
  using namespace vessel_eval;

  CLI::App app{"Segmentation, panoptic and relation metrics for vessel scenes"};
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate", "Check scene documents for violations");
  validate->add_option("path", validate_path, "Directory or document")
      ->required();

  EvaluateOptions eval;
  std::string eval_format = "structured";
  std::string eval_out;
  int eval_workers = 0;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score predictions against GT scenes");
  evaluate->add_option("--gt", eval.gt_dir, "GT directory")->required();
  evaluate->add_option("--pred", eval.pred_dir, "Prediction directory")
      ->required();
  evaluate->add_flag("--per-vessel", eval.per_vessel,
                     "Also score the content of each GT vessel");
  evaluate->add_flag("--relations", eval.relations,
                     "Also score vessel relations");
  evaluate->add_option(
      "--workers", eval_workers,
      std::string("Worker threads (default: $") + kWorkersEnv + " or 1)");
  evaluate->add_option("--out", eval_out, "Output directory");
  evaluate->add_option("--format", eval_format, "structured|csv|markdown");

  std::string plan_path;
  std::string generate_out;
  CLI::App* generate = app.add_subcommand(
      "generate", "Write synthetic GT/prediction pairs and expected counters");
  generate->add_option("--plan", plan_path, "Plan document")->required();
  generate->add_option("--out", generate_out, "Output directory")->required();

  std::string scene_path;
  std::string image_path;
  CLI::App* render = app.add_subcommand("render", "Draw a scene overlay (PPM)");
  render->add_option("scene", scene_path, "Scene document")->required();
  render->add_option("--out", image_path, "Output image")->required();

  ReportOptions report_options;
  std::string report_out;
  CLI::App* report =
      app.add_subcommand("report", "Render a metrics file as a table");
  report->add_option("metrics", report_options.metrics_path, "metrics.json")
      ->required();
  report
      ->add_option("--shape", report_options.shape,
                   "table1|table2|table3|table4")
      ->required();
  report->add_option("--format", report_options.format, "markdown|csv");
  report->add_option("--scope", report_options.scope, "auto|scene|content");
  report->add_option("--out", report_out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFailure;
  }

  if (*validate) return RunValidate(validate_path, std::cout, std::cerr);
  if (*evaluate) {
    absl::StatusOr<OutputFormat> format = ParseOutputFormat(eval_format);
    if (!format.ok()) {
      std::cerr << "evaluate: " << format.status().message() << "\n";
      return kExitFailure;
    }
    eval.format = *format;
    if (evaluate->count("--workers") > 0) {
      eval.workers = eval_workers;
    } else {
      absl::StatusOr<int> workers = DefaultWorkers();
      if (!workers.ok()) {
        std::cerr << "evaluate: " << workers.status().message() << "\n";
        return kExitFailure;
      }
      eval.workers = *workers;
    }
    if (!eval_out.empty()) eval.out_dir = eval_out;
    return RunEvaluate(eval, std::cout, std::cerr);
  }
  if (*generate) {
    return RunGenerate(plan_path, generate_out, std::cout, std::cerr);
  }
  if (*render) return RunRender(scene_path, image_path, std::cout, std::cerr);
  if (!report_out.empty()) report_options.out_path = report_out;
  return RunReport(report_options, std::cout, std::cerr);
}
