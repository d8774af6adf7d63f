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

// Scene annotation documents (format version "1.0").
//
//   {
//     "version": "1.0",
//     "image": {"width": W, "height": H, "file": "optional.jpg"},
//     "instances": [
//       {"id": "v1", "kind": "vessel", "classes": ["tube", "vessel"],
//        "properties": ["transparent"], "free_standing": false,
//        "mask": {"format": "rle_v1", "width": W, "height": H,
//                 "runs": [zero-run, one-run, ...]}}
//     ],
//     "relations": [{"kind": "inside", "subject": "m1", "object": "v1"}]
//   }
//
// Error categories returned by the parsers:
//   InvalidArgument     syntax errors (with byte offset) and schema errors
//                       (missing, unknown or mistyped fields);
//   FailedPrecondition  semantic errors (invariant violations naming ids).

#ifndef VESSEL_EVAL_SCENE_IO_H_
#define VESSEL_EVAL_SCENE_IO_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "vessel_eval/scene.h"

namespace vessel_eval {

inline constexpr std::string_view kSceneFormatVersion = "1.0";
inline constexpr std::string_view kMaskFormat = "rle_v1";

// Syntax and schema checks only; invariants are left to ValidateScene.
absl::StatusOr<SceneAnnotation> ParseSceneStructure(std::string_view document);

// Structure plus full validation. Warnings (see ValidationOptions) do not
// fail the parse.
absl::StatusOr<SceneAnnotation> ParseScene(
    std::string_view document, const ValidationOptions& options = {});

// Deterministic output: sorted keys, instances sorted by id, relations sorted
// by (kind, subject, object), one line terminated by '\n'.
std::string SerializeScene(const SceneAnnotation& scene);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_SCENE_IO_H_
