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

#include "vessel_eval/scene_io.h"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "str_cat.h"

namespace vessel_eval {
namespace {

using nlohmann::json;

absl::Status SchemaError(std::string_view where, std::string_view what) {
  return absl::InvalidArgumentError(
      StrCat("schema error at ", where, ": ", what));
}

absl::Status CheckObject(const json& node, std::string_view where,
                         std::initializer_list<std::string_view> required,
                         std::initializer_list<std::string_view> optional) {
  if (!node.is_object()) return SchemaError(where, "expected an object");
  for (std::string_view key : required) {
    if (!node.contains(key)) {
      return SchemaError(where, StrCat("missing field '", key, "'"));
    }
  }
  for (const auto& [key, unused] : node.items()) {
    bool known = false;
    for (std::string_view k : required) known = known || k == key;
    for (std::string_view k : optional) known = known || k == key;
    if (!known) {
      return SchemaError(where, StrCat("unknown field '", key, "'"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> GetString(const json& node, std::string_view key,
                                      std::string_view where) {
  const json& value = node.at(key);
  if (!value.is_string()) {
    return SchemaError(where, StrCat("'", key, "' must be a string"));
  }
  return value.get<std::string>();
}

absl::StatusOr<int64_t> GetPositive(const json& node, std::string_view key,
                                    std::string_view where) {
  const json& value = node.at(key);
  if (!value.is_number_integer() || value.get<int64_t>() <= 0) {
    return SchemaError(where, StrCat("'", key, "' must be a positive integer"));
  }
  return value.get<int64_t>();
}

absl::StatusOr<LabelSet> GetLabels(const json& node, std::string_view key,
                                   std::string_view where) {
  const json& value = node.at(key);
  if (!value.is_array()) {
    return SchemaError(where, StrCat("'", key, "' must be an array"));
  }
  LabelSet labels;
  for (const json& item : value) {
    if (!item.is_string()) {
      return SchemaError(where, StrCat("'", key, "' entries must be strings"));
    }
    labels.insert(item.get<std::string>());
  }
  return labels;
}

absl::StatusOr<BinaryMask> ParseMask(const json& node, std::string_view where) {
  if (absl::Status s =
          CheckObject(node, where, {"format", "width", "height", "runs"}, {});
      !s.ok()) {
    return s;
  }
  absl::StatusOr<std::string> format = GetString(node, "format", where);
  if (!format.ok()) return format.status();
  if (*format != kMaskFormat) {
    return SchemaError(where,
                       StrCat("unsupported mask format '", *format, "'"));
  }
  absl::StatusOr<int64_t> width = GetPositive(node, "width", where);
  if (!width.ok()) return width.status();
  absl::StatusOr<int64_t> height = GetPositive(node, "height", where);
  if (!height.ok()) return height.status();
  const json& runs_node = node.at("runs");
  if (!runs_node.is_array())
    return SchemaError(where, "'runs' must be an array");
  std::vector<uint64_t> runs;
  runs.reserve(runs_node.size());
  for (const json& run : runs_node) {
    if (!run.is_number_integer() || run.get<int64_t>() < 0) {
      return SchemaError(where, "'runs' entries must be non-negative integers");
    }
    runs.push_back(run.get<uint64_t>());
  }
  absl::StatusOr<BinaryMask> mask =
      BinaryMask::FromRuns(*width, *height, std::move(runs));
  if (!mask.ok())
    return SchemaError(where, std::string(mask.status().message()));
  return mask;
}

absl::StatusOr<Instance> ParseInstance(const json& node,
                                       std::string_view where) {
  if (absl::Status s = CheckObject(
          node, where, {"id", "kind", "classes", "properties", "mask"},
          {"free_standing"});
      !s.ok()) {
    return s;
  }
  Instance inst;
  absl::StatusOr<std::string> id = GetString(node, "id", where);
  if (!id.ok()) return id.status();
  inst.id = *std::move(id);
  const std::string at = StrCat(where, " (id '", inst.id, "')");
  absl::StatusOr<std::string> kind_name = GetString(node, "kind", at);
  if (!kind_name.ok()) return kind_name.status();
  absl::StatusOr<InstanceKind> kind = ParseKind(*kind_name);
  if (!kind.ok()) return SchemaError(at, std::string(kind.status().message()));
  inst.kind = *kind;
  absl::StatusOr<LabelSet> classes = GetLabels(node, "classes", at);
  if (!classes.ok()) return classes.status();
  inst.classes = *std::move(classes);
  absl::StatusOr<LabelSet> properties = GetLabels(node, "properties", at);
  if (!properties.ok()) return properties.status();
  inst.properties = *std::move(properties);
  if (node.contains("free_standing")) {
    if (!node.at("free_standing").is_boolean()) {
      return SchemaError(at, "'free_standing' must be a boolean");
    }
    inst.free_standing = node.at("free_standing").get<bool>();
  }
  absl::StatusOr<BinaryMask> mask =
      ParseMask(node.at("mask"), StrCat(at, ".mask"));
  if (!mask.ok()) return mask.status();
  inst.mask = *std::move(mask);
  return inst;
}

absl::StatusOr<Relation> ParseRelation(const json& node,
                                       std::string_view where) {
  if (absl::Status s =
          CheckObject(node, where, {"kind", "subject", "object"}, {});
      !s.ok()) {
    return s;
  }
  absl::StatusOr<std::string> kind_name = GetString(node, "kind", where);
  if (!kind_name.ok()) return kind_name.status();
  absl::StatusOr<RelationKind> kind = ParseRelationKind(*kind_name);
  if (!kind.ok())
    return SchemaError(where, std::string(kind.status().message()));
  absl::StatusOr<std::string> subject = GetString(node, "subject", where);
  if (!subject.ok()) return subject.status();
  absl::StatusOr<std::string> object = GetString(node, "object", where);
  if (!object.ok()) return object.status();
  return Relation{*kind, *std::move(subject), *std::move(object)};
}

}  // namespace

absl::StatusOr<SceneAnnotation> ParseSceneStructure(std::string_view document) {
  json root;
  try {
    root = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    return absl::InvalidArgumentError(
        StrCat("syntax error at byte ", e.byte, ": ", e.what()));
  }
  if (absl::Status s = CheckObject(
          root, "document", {"version", "image", "instances", "relations"}, {});
      !s.ok()) {
    return s;
  }
  absl::StatusOr<std::string> version = GetString(root, "version", "document");
  if (!version.ok()) return version.status();
  if (*version != kSceneFormatVersion) {
    return SchemaError("document",
                       StrCat("unsupported version '", *version, "'"));
  }

  SceneAnnotation scene;
  const json& image = root.at("image");
  if (absl::Status s =
          CheckObject(image, "image", {"width", "height"}, {"file"});
      !s.ok()) {
    return s;
  }
  absl::StatusOr<int64_t> width = GetPositive(image, "width", "image");
  if (!width.ok()) return width.status();
  absl::StatusOr<int64_t> height = GetPositive(image, "height", "image");
  if (!height.ok()) return height.status();
  scene.width = *width;
  scene.height = *height;
  if (image.contains("file")) {
    absl::StatusOr<std::string> file = GetString(image, "file", "image");
    if (!file.ok()) return file.status();
    scene.source_tag = *std::move(file);
  }

  const json& instances = root.at("instances");
  if (!instances.is_array()) {
    return SchemaError("document", "'instances' must be an array");
  }
  for (size_t i = 0; i < instances.size(); ++i) {
    absl::StatusOr<Instance> inst =
        ParseInstance(instances[i], StrCat("instances[", i, "]"));
    if (!inst.ok()) return inst.status();
    scene.instances.push_back(*std::move(inst));
  }

  const json& relations = root.at("relations");
  if (!relations.is_array()) {
    return SchemaError("document", "'relations' must be an array");
  }
  for (size_t i = 0; i < relations.size(); ++i) {
    absl::StatusOr<Relation> rel =
        ParseRelation(relations[i], StrCat("relations[", i, "]"));
    if (!rel.ok()) return rel.status();
    scene.relations.push_back(*std::move(rel));
  }
  return scene;
}

absl::StatusOr<SceneAnnotation> ParseScene(std::string_view document,
                                           const ValidationOptions& options) {
  absl::StatusOr<SceneAnnotation> scene = ParseSceneStructure(document);
  if (!scene.ok()) return scene;
  std::vector<Violation> violations = ValidateScene(*scene, options);
  for (const Violation& v : violations) {
    if (v.warning) continue;
    std::string message =
        StrCat("semantic error [", ViolationCodeName(v.code), "]: ", v.message);
    size_t extra = 0;
    for (const Violation& other : violations) extra += other.warning ? 0 : 1;
    if (extra > 1) message += StrCat(" (and ", extra - 1, " more)");
    return absl::FailedPreconditionError(message);
  }
  scene->Normalize();
  return scene;
}

std::string SerializeScene(const SceneAnnotation& input) {
  SceneAnnotation scene = input;
  scene.Normalize();
  json root = json::object();
  root["version"] = std::string(kSceneFormatVersion);
  json image = {{"width", scene.width}, {"height", scene.height}};
  if (!scene.source_tag.empty()) image["file"] = scene.source_tag;
  root["image"] = std::move(image);
  json instances = json::array();
  for (const Instance& inst : scene.instances) {
    json node = json::object();
    node["id"] = inst.id;
    node["kind"] = std::string(KindName(inst.kind));
    node["classes"] = inst.classes;
    node["properties"] = inst.properties;
    node["free_standing"] = inst.free_standing;
    node["mask"] = {{"format", std::string(kMaskFormat)},
                    {"width", inst.mask.width()},
                    {"height", inst.mask.height()},
                    {"runs", inst.mask.runs()}};
    instances.push_back(std::move(node));
  }
  root["instances"] = std::move(instances);
  json relations = json::array();
  for (const Relation& rel : scene.relations) {
    relations.push_back({{"kind", std::string(RelationKindName(rel.kind))},
                         {"subject", rel.subject},
                         {"object", rel.object}});
  }
  root["relations"] = std::move(relations);
  return root.dump() + "\n";
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) return absl::DataLossError(StrCat("cannot read ", path));
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(StrCat("cannot write ", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(StrCat("write failed: ", path));
  return absl::OkStatus();
}

}  // namespace vessel_eval
