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

#include "vessel_eval/commands.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <system_error>
#include <vector>

#include "str_cat.h"
#include "vessel_eval/render.h"
#include "vessel_eval/report_io.h"
#include "vessel_eval/scene_eval.h"
#include "vessel_eval/scene_io.h"
#include "vessel_eval/synthetic.h"

namespace vessel_eval {
namespace {

namespace fs = std::filesystem;

// Optional split listing that may sit next to the scene documents.
constexpr char kManifestName[] = "manifest.json";

// Sorted *.json scene documents of a directory, or the path itself if it is
// a file.
absl::StatusOr<std::vector<fs::path>> ListDocuments(const std::string& path) {
  std::error_code ec;
  const fs::file_status status = fs::status(path, ec);
  if (ec || !fs::exists(status)) {
    return absl::NotFoundError(StrCat("no such file or directory: ", path));
  }
  if (!fs::is_directory(status)) return std::vector<fs::path>{path};
  std::vector<fs::path> files;
  for (fs::directory_iterator it(path, ec), end; !ec && it != end;
       it.increment(ec)) {
    if (it->path().extension() == ".json" && it->is_regular_file() &&
        it->path().filename() != kManifestName) {
      files.push_back(it->path());
    }
  }
  if (ec) {
    return absl::PermissionDeniedError(
        StrCat("cannot list ", path, ": ", ec.message()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

absl::Status MakeDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

std::string Describe(const Violation& v) {
  std::string ids;
  for (const std::string& id : v.ids) ids += ids.empty() ? id : ", " + id;
  return StrCat(v.warning ? "warning " : "error ", ViolationCodeName(v.code),
                " [", ids, "]: ", v.message);
}

// Parse failures of a scene document map to exit codes: syntax and schema
// errors are failures, invariant violations are violations.
int ExitCodeFor(const absl::Status& status) {
  return status.code() == absl::StatusCode::kFailedPrecondition ? kExitViolation
                                                                : kExitFailure;
}

absl::StatusOr<SceneAnnotation> LoadScene(const fs::path& path) {
  absl::StatusOr<std::string> text = ReadFile(path.string());
  if (!text.ok()) return text.status();
  absl::StatusOr<SceneAnnotation> scene = ParseScene(*text);
  if (!scene.ok()) {
    return absl::Status(scene.status().code(),
                        StrCat(path.string(), ": ", scene.status().message()));
  }
  return scene;
}

absl::Status WriteEvaluation(const MetricReport& report,
                             const EvaluateOptions& options,
                             std::ostream& out) {
  std::map<std::string, std::string> files;
  files["metrics.json"] = SerializeReport(report);
  if (options.format == OutputFormat::kCsv) {
    files["panoptic.csv"] = PanopticCsv(report);
    files["semantic.csv"] = SemanticCsv(report);
    if (report.config.relations) files["relations.csv"] = RelationCsv(report);
  } else if (options.format == OutputFormat::kMarkdown) {
    std::string md;
    for (const char* shape : {"table1", "table2", "table3", "table4"}) {
      absl::StatusOr<TableShape> parsed = ParseTableShape(shape);
      if (*parsed == TableShape::kRelations && !report.config.relations) {
        continue;
      }
      absl::StatusOr<std::string> table =
          RenderTable(report, *parsed, TableFormat::kMarkdown);
      if (!table.ok()) return table.status();
      md += StrCat(md.empty() ? "" : "\n", "## ", shape, "\n\n", *table);
    }
    files["report.md"] = md;
  }

  if (!options.out_dir.has_value()) {
    if (options.format == OutputFormat::kStructured) {
      out << files["metrics.json"];
    } else if (options.format == OutputFormat::kMarkdown) {
      out << files["report.md"];
    } else {
      bool first = true;
      for (const char* name :
           {"panoptic.csv", "semantic.csv", "relations.csv"}) {
        if (!files.contains(name)) continue;
        out << (first ? "" : "\n") << files[name];
        first = false;
      }
    }
    return absl::OkStatus();
  }
  const fs::path dir(*options.out_dir);
  if (absl::Status s = MakeDirectory(dir); !s.ok()) return s;
  for (const auto& [name, contents] : files) {
    if (absl::Status s = WriteFile((dir / name).string(), contents); !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<int> DefaultWorkers() {
  const char* value = std::getenv(kWorkersEnv);
  if (value == nullptr || *value == '\0') return 1;
  const std::string_view text(value);
  int workers = 0;
  auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), workers);
  if (ec != std::errc() || end != text.data() + text.size() || workers < 1) {
    return absl::InvalidArgumentError(
        StrCat(kWorkersEnv, " must be a positive integer, got '", text, "'"));
  }
  return workers;
}

int RunValidate(const std::string& path, std::ostream& out, std::ostream& err) {
  absl::StatusOr<std::vector<fs::path>> files = ListDocuments(path);
  if (!files.ok()) {
    err << "validate: " << files.status().message() << "\n";
    return kExitFailure;
  }
  bool failed = false;
  int64_t errors = 0;
  int64_t warnings = 0;
  for (const fs::path& file : *files) {
    absl::StatusOr<std::string> text = ReadFile(file.string());
    if (!text.ok()) {
      err << file.string() << ": " << text.status().message() << "\n";
      failed = true;
      continue;
    }
    absl::StatusOr<SceneAnnotation> scene = ParseSceneStructure(*text);
    if (!scene.ok()) {
      out << file.string() << ": " << scene.status().message() << "\n";
      failed = true;
      continue;
    }
    for (const Violation& v : ValidateScene(*scene)) {
      out << file.string() << ": " << Describe(v) << "\n";
      ++(v.warning ? warnings : errors);
    }
  }
  out << errors << " violations";
  if (warnings > 0) out << ", " << warnings << " warnings";
  out << " in " << files->size() << " documents\n";
  if (failed) return kExitFailure;
  return errors > 0 ? kExitViolation : kExitOk;
}

absl::StatusOr<OutputFormat> ParseOutputFormat(const std::string& name) {
  if (name == "structured") return OutputFormat::kStructured;
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "markdown") return OutputFormat::kMarkdown;
  return absl::InvalidArgumentError(
      StrCat("unknown format '", name, "' (structured|csv|markdown)"));
}

int RunEvaluate(const EvaluateOptions& options, std::ostream& out,
                std::ostream& err) {
  if (options.workers < 1) {
    err << "evaluate: worker count must be at least 1\n";
    return kExitFailure;
  }
  std::error_code ec;
  for (const std::string* dir : {&options.gt_dir, &options.pred_dir}) {
    if (!fs::is_directory(*dir, ec)) {
      err << "evaluate: not a directory: " << *dir << "\n";
      return kExitFailure;
    }
  }
  absl::StatusOr<std::vector<fs::path>> gt_files =
      ListDocuments(options.gt_dir);
  absl::StatusOr<std::vector<fs::path>> pred_files =
      ListDocuments(options.pred_dir);
  for (const auto* files : {&gt_files, &pred_files}) {
    if (!files->ok()) {
      err << "evaluate: " << files->status().message() << "\n";
      return kExitFailure;
    }
  }

  std::map<std::string, fs::path> pred_by_name;
  for (const fs::path& p : *pred_files) pred_by_name[p.filename().string()] = p;

  // Stable storage: ScenePair holds pointers.
  std::vector<SceneAnnotation> gts(gt_files->size());
  std::vector<std::optional<SceneAnnotation>> preds(gt_files->size());
  std::vector<ScenePair> pairs;
  for (size_t i = 0; i < gt_files->size(); ++i) {
    const fs::path& gt_path = (*gt_files)[i];
    const std::string name = gt_path.filename().string();
    absl::StatusOr<SceneAnnotation> gt = LoadScene(gt_path);
    if (!gt.ok()) {
      err << "evaluate: GT " << gt.status().message() << "\n";
      return ExitCodeFor(gt.status());
    }
    gts[i] = *std::move(gt);
    auto pred_path = pred_by_name.find(name);
    if (pred_path == pred_by_name.end()) {
      err << "warning: no prediction for " << name
          << "; scoring it as all false negatives\n";
    } else {
      absl::StatusOr<SceneAnnotation> pred = LoadScene(pred_path->second);
      if (!pred.ok()) {
        err << "evaluate: prediction " << pred.status().message() << "\n";
        return kExitFailure;
      }
      preds[i] = *std::move(pred);
      pred_by_name.erase(pred_path);
    }
    pairs.push_back(
        {name, &gts[i], preds[i].has_value() ? &*preds[i] : nullptr});
  }
  for (const auto& [name, unused] : pred_by_name) {
    err << "warning: prediction " << name << " has no GT document; ignored\n";
  }

  const EvalConfig config{options.per_vessel, options.relations};
  absl::StatusOr<MetricReport> report =
      EvaluateBatch(pairs, config, options.workers);
  if (!report.ok()) {
    err << "evaluate: " << report.status().message() << "\n";
    return kExitFailure;
  }
  if (absl::Status s = WriteEvaluation(*report, options, out); !s.ok()) {
    err << "evaluate: " << s.message() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int RunGenerate(const std::string& plan_path, const std::string& out_dir,
                std::ostream& out, std::ostream& err) {
  absl::StatusOr<std::string> text = ReadFile(plan_path);
  if (!text.ok()) {
    err << "generate: " << text.status().message() << "\n";
    return kExitFailure;
  }
  absl::StatusOr<SyntheticPlan> plan = ParsePlan(*text);
  if (!plan.ok()) {
    err << "generate: " << plan_path << ": " << plan.status().message() << "\n";
    return kExitFailure;
  }
  absl::StatusOr<SyntheticDataset> data = GenerateSynthetic(*plan);
  if (!data.ok()) {
    err << "generate: " << data.status().message() << "\n";
    return kExitFailure;
  }
  const fs::path root(out_dir);
  for (const char* sub : {"gt", "pred"}) {
    if (absl::Status s = MakeDirectory(root / sub); !s.ok()) {
      err << "generate: " << s.message() << "\n";
      return kExitFailure;
    }
  }
  for (const SyntheticScene& scene : data->scenes) {
    for (const auto& [sub, doc] :
         {std::pair{"gt", &scene.gt}, std::pair{"pred", &scene.pred}}) {
      const std::string path = (root / sub / scene.name).string();
      if (absl::Status s = WriteFile(path, SerializeScene(*doc)); !s.ok()) {
        err << "generate: " << s.message() << "\n";
        return kExitFailure;
      }
    }
  }
  if (absl::Status s = WriteFile((root / "expected.json").string(),
                                 SerializeExpected(data->expected));
      !s.ok()) {
    err << "generate: " << s.message() << "\n";
    return kExitFailure;
  }
  out << "wrote " << data->scenes.size() << " scene pairs to " << out_dir
      << "\n";
  return kExitOk;
}

int RunRender(const std::string& scene_path, const std::string& image_path,
              std::ostream& out, std::ostream& err) {
  absl::StatusOr<std::string> text = ReadFile(scene_path);
  if (!text.ok()) {
    err << "render: " << text.status().message() << "\n";
    return kExitFailure;
  }
  absl::StatusOr<SceneAnnotation> scene = ParseScene(*text);
  if (!scene.ok()) {
    err << "render: " << scene_path << ": " << scene.status().message() << "\n";
    return kExitViolation;
  }
  absl::StatusOr<RgbImage> image = RenderOverlay(*scene);
  if (!image.ok()) {
    err << "render: " << image.status().message() << "\n";
    return kExitViolation;
  }
  if (absl::Status s = WriteFile(image_path, EncodePpm(*image)); !s.ok()) {
    err << "render: " << s.message() << "\n";
    return kExitFailure;
  }
  out << "wrote " << image->width << "x" << image->height << " overlay to "
      << image_path << "\n";
  return kExitOk;
}

int RunReport(const ReportOptions& options, std::ostream& out,
              std::ostream& err) {
  absl::StatusOr<TableShape> shape = ParseTableShape(options.shape);
  absl::StatusOr<TableFormat> format = ParseTableFormat(options.format);
  absl::StatusOr<TableScope> scope = ParseTableScope(options.scope);
  for (const absl::Status* s :
       {&shape.status(), &format.status(), &scope.status()}) {
    if (!s->ok()) {
      err << "report: " << s->message() << "\n";
      return kExitFailure;
    }
  }
  absl::StatusOr<std::string> text = ReadFile(options.metrics_path);
  if (!text.ok()) {
    err << "report: " << text.status().message() << "\n";
    return kExitFailure;
  }
  absl::StatusOr<MetricReport> report = ParseReport(*text);
  if (!report.ok()) {
    err << "report: " << options.metrics_path << ": "
        << report.status().message() << "\n";
    return kExitFailure;
  }
  absl::StatusOr<std::string> table =
      RenderTable(*report, *shape, *format, *scope);
  if (!table.ok()) {
    err << "report: " << table.status().message() << "\n";
    return kExitViolation;
  }
  if (!options.out_path.has_value()) {
    out << *table;
    return kExitOk;
  }
  if (absl::Status s = WriteFile(*options.out_path, *table); !s.ok()) {
    err << "report: " << s.message() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace vessel_eval
