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

#ifndef VESSEL_EVAL_SCENE_H_
#define VESSEL_EVAL_SCENE_H_

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "vessel_eval/mask.h"
#include "vessel_eval/taxonomy.h"

namespace vessel_eval {

// One annotated object: a vessel, a material phase or a vessel part.
struct Instance {
  std::string id;
  InstanceKind kind = InstanceKind::kVessel;
  BinaryMask mask;
  LabelSet classes;
  LabelSet properties;
  // Material or part deliberately not placed inside any vessel.
  bool free_standing = false;

  // classes ∪ properties; the label set every metric is keyed by.
  LabelSet Labels() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

enum class RelationKind { kInside, kContain, kLinked };

std::string_view RelationKindName(RelationKind kind);
absl::StatusOr<RelationKind> ParseRelationKind(std::string_view name);

// Directed fact `kind(subject, object)`: inside(m, v) reads "m is inside v".
struct Relation {
  RelationKind kind = RelationKind::kInside;
  std::string subject;
  std::string object;

  friend auto operator<=>(const Relation&, const Relation&) = default;
  friend bool operator==(const Relation&, const Relation&) = default;
};

struct SceneAnnotation {
  int64_t width = 1;
  int64_t height = 1;
  std::vector<Instance> instances;
  std::vector<Relation> relations;
  // Provenance, e.g. the source image file name.
  std::string source_tag;

  const Instance* Find(std::string_view id) const;

  // Sorts instances by id and relations by (kind, subject, object), and
  // drops duplicate relations. Documents are always written in this order.
  void Normalize();

  friend bool operator==(const SceneAnnotation&,
                         const SceneAnnotation&) = default;
};

enum class ViolationCode {
  kDuplicateId,
  kEmptyId,
  kUnknownLabel,
  kLabelKindMismatch,
  kLabelRoleMismatch,
  kTaxonomyNotClosed,
  kMaskDimensionMismatch,
  kSelfRelation,
  kDanglingEndpoint,
  kMissingReciprocal,
  kLinkedNotSymmetric,
  kLinkedNonVessel,
  kInsideCycle,
  kNotContained,
};

std::string_view ViolationCodeName(ViolationCode code);

struct Violation {
  ViolationCode code;
  // Offending instance ids; relation violations name subject then object.
  std::vector<std::string> ids;
  std::string message;
  bool warning = false;
};

struct ValidationOptions {
  const Taxonomy* taxonomy = &Taxonomy::Default();
  // Report unknown labels as warnings instead of errors.
  bool unknown_labels_are_warnings = false;
};

// Every invariant violation of `scene`. The result contains no errors
// (warnings are allowed) iff the scene is valid.
std::vector<Violation> ValidateScene(const SceneAnnotation& scene,
                                     const ValidationOptions& options = {});

bool HasErrors(const std::vector<Violation>& violations);

// Ids X with inside(X, vessel) for which no other vessel W has both
// inside(X, W) and inside(W, vessel): the content sitting directly in the
// vessel rather than in a vessel nested within it.
absl::StatusOr<std::set<std::string>> DirectContentOf(
    const SceneAnnotation& scene, std::string_view vessel_id);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_SCENE_H_
