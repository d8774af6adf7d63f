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

#include "vessel_eval/scene.h"

#include <algorithm>
#include <functional>
#include <map>
#include <utility>

#include "str_cat.h"

namespace vessel_eval {
namespace {

std::string_view RoleName(LabelRole role) {
  return role == LabelRole::kClass ? "class" : "property";
}

void CheckLabels(const Instance& inst, const LabelSet& labels, LabelRole role,
                 const ValidationOptions& options,
                 std::vector<Violation>* out) {
  const Taxonomy& taxonomy = *options.taxonomy;
  for (const std::string& label : labels) {
    const TaxonomyEntry* entry = taxonomy.Find(label);
    if (entry == nullptr) {
      out->push_back({ViolationCode::kUnknownLabel,
                      {inst.id},
                      StrCat("instance '", inst.id, "' has unknown ",
                             RoleName(role), " '", label, "'"),
                      options.unknown_labels_are_warnings});
      continue;
    }
    if (entry->role != role) {
      out->push_back({ViolationCode::kLabelRoleMismatch,
                      {inst.id},
                      StrCat("'", label, "' is a ", RoleName(entry->role),
                             " but appears among the ", RoleName(role),
                             " labels of instance '", inst.id, "'")});
      continue;
    }
    if (entry->kind != inst.kind) {
      out->push_back({ViolationCode::kLabelKindMismatch,
                      {inst.id},
                      StrCat(KindName(inst.kind), " instance '", inst.id,
                             "' carries ", KindName(entry->kind), " ",
                             RoleName(role), " '", label, "'")});
      continue;
    }
    for (const std::string& ancestor : taxonomy.Ancestors(label)) {
      if (!labels.contains(ancestor)) {
        out->push_back({ViolationCode::kTaxonomyNotClosed,
                        {inst.id},
                        StrCat("instance '", inst.id, "' has '", label,
                               "' but not its superclass '", ancestor, "'")});
      }
    }
  }
}

// Nontrivial strongly connected components of the vessel inside-graph.
std::vector<std::vector<std::string>> InsideCycles(
    const std::map<std::string, std::vector<std::string>>& graph) {
  std::map<std::string, int> index, low;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> cycles;
  int counter = 0;
  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    auto it = graph.find(v);
    if (it != graph.end()) {
      for (const std::string& w : it->second) {
        if (!index.contains(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> component;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component.push_back(w);
      } while (w != v);
      if (component.size() > 1) {
        std::sort(component.begin(), component.end());
        cycles.push_back(std::move(component));
      }
    }
  };
  for (const auto& [v, unused] : graph) {
    if (!index.contains(v)) visit(v);
  }
  std::sort(cycles.begin(), cycles.end());
  return cycles;
}

}  // namespace

LabelSet Instance::Labels() const {
  LabelSet labels = classes;
  labels.insert(properties.begin(), properties.end());
  return labels;
}

std::string_view RelationKindName(RelationKind kind) {
  switch (kind) {
    case RelationKind::kInside:
      return "inside";
    case RelationKind::kContain:
      return "contain";
    case RelationKind::kLinked:
      return "linked";
  }
  return "unknown";
}

absl::StatusOr<RelationKind> ParseRelationKind(std::string_view name) {
  if (name == "inside") return RelationKind::kInside;
  if (name == "contain") return RelationKind::kContain;
  if (name == "linked") return RelationKind::kLinked;
  return absl::InvalidArgumentError(
      StrCat("unknown relation kind '", name, "'"));
}

const Instance* SceneAnnotation::Find(std::string_view id) const {
  for (const Instance& inst : instances) {
    if (inst.id == id) return &inst;
  }
  return nullptr;
}

void SceneAnnotation::Normalize() {
  std::stable_sort(
      instances.begin(), instances.end(),
      [](const Instance& a, const Instance& b) { return a.id < b.id; });
  std::sort(relations.begin(), relations.end());
  relations.erase(std::unique(relations.begin(), relations.end()),
                  relations.end());
}

std::string_view ViolationCodeName(ViolationCode code) {
  switch (code) {
    case ViolationCode::kDuplicateId:
      return "duplicate_id";
    case ViolationCode::kEmptyId:
      return "empty_id";
    case ViolationCode::kUnknownLabel:
      return "unknown_label";
    case ViolationCode::kLabelKindMismatch:
      return "label_kind_mismatch";
    case ViolationCode::kLabelRoleMismatch:
      return "label_role_mismatch";
    case ViolationCode::kTaxonomyNotClosed:
      return "taxonomy_not_closed";
    case ViolationCode::kMaskDimensionMismatch:
      return "mask_dimension_mismatch";
    case ViolationCode::kSelfRelation:
      return "self_relation";
    case ViolationCode::kDanglingEndpoint:
      return "dangling_endpoint";
    case ViolationCode::kMissingReciprocal:
      return "missing_reciprocal";
    case ViolationCode::kLinkedNotSymmetric:
      return "linked_not_symmetric";
    case ViolationCode::kLinkedNonVessel:
      return "linked_non_vessel";
    case ViolationCode::kInsideCycle:
      return "inside_cycle";
    case ViolationCode::kNotContained:
      return "not_contained";
  }
  return "unknown";
}

std::vector<Violation> ValidateScene(const SceneAnnotation& scene,
                                     const ValidationOptions& options) {
  std::vector<Violation> out;
  std::map<std::string, const Instance*> by_id;
  for (const Instance& inst : scene.instances) {
    if (inst.id.empty()) {
      out.push_back({ViolationCode::kEmptyId, {}, "instance with empty id"});
      continue;
    }
    if (!by_id.emplace(inst.id, &inst).second) {
      out.push_back({ViolationCode::kDuplicateId,
                     {inst.id},
                     StrCat("duplicate instance id '", inst.id, "'")});
    }
  }

  for (const Instance& inst : scene.instances) {
    if (inst.mask.width() != scene.width ||
        inst.mask.height() != scene.height) {
      out.push_back({ViolationCode::kMaskDimensionMismatch,
                     {inst.id},
                     StrCat("mask of '", inst.id, "' is ", inst.mask.width(),
                            "x", inst.mask.height(), ", image is ", scene.width,
                            "x", scene.height)});
    }
    CheckLabels(inst, inst.classes, LabelRole::kClass, options, &out);
    CheckLabels(inst, inst.properties, LabelRole::kProperty, options, &out);
  }

  std::set<Relation> relation_set(scene.relations.begin(),
                                  scene.relations.end());
  std::map<std::string, std::vector<std::string>> vessel_inside;
  std::map<std::string, std::vector<std::string>> inside_edges;
  for (const Relation& rel : relation_set) {
    const std::string_view kind = RelationKindName(rel.kind);
    if (rel.subject == rel.object) {
      out.push_back(
          {ViolationCode::kSelfRelation,
           {rel.subject, rel.object},
           StrCat(kind, " relation of '", rel.subject, "' with itself")});
      continue;
    }
    auto subject = by_id.find(rel.subject);
    auto object = by_id.find(rel.object);
    if (subject == by_id.end() || object == by_id.end()) {
      out.push_back({ViolationCode::kDanglingEndpoint,
                     {rel.subject, rel.object},
                     StrCat(kind, "(", rel.subject, ", ", rel.object,
                            ") references an unknown instance")});
      continue;
    }
    switch (rel.kind) {
      case RelationKind::kInside:
      case RelationKind::kContain: {
        const RelationKind dual = rel.kind == RelationKind::kInside
                                      ? RelationKind::kContain
                                      : RelationKind::kInside;
        if (!relation_set.contains({dual, rel.object, rel.subject})) {
          out.push_back({ViolationCode::kMissingReciprocal,
                         {rel.subject, rel.object},
                         StrCat(kind, "(", rel.subject, ", ", rel.object,
                                ") has no reciprocal ", RelationKindName(dual),
                                "(", rel.object, ", ", rel.subject, ")")});
        }
        if (rel.kind == RelationKind::kInside) {
          inside_edges[rel.subject].push_back(rel.object);
          if (subject->second->kind == InstanceKind::kVessel &&
              object->second->kind == InstanceKind::kVessel) {
            vessel_inside[rel.subject].push_back(rel.object);
          }
        }
        break;
      }
      case RelationKind::kLinked:
        if (subject->second->kind != InstanceKind::kVessel ||
            object->second->kind != InstanceKind::kVessel) {
          out.push_back({ViolationCode::kLinkedNonVessel,
                         {rel.subject, rel.object},
                         StrCat("linked(", rel.subject, ", ", rel.object,
                                ") joins a non-vessel instance")});
        }
        if (!relation_set.contains(
                {RelationKind::kLinked, rel.object, rel.subject})) {
          out.push_back({ViolationCode::kLinkedNotSymmetric,
                         {rel.subject, rel.object},
                         StrCat("linked(", rel.subject, ", ", rel.object,
                                ") has no mirror linked(", rel.object, ", ",
                                rel.subject, ")")});
        }
        break;
    }
  }

  for (std::vector<std::string>& cycle : InsideCycles(vessel_inside)) {
    out.push_back(
        {ViolationCode::kInsideCycle, cycle,
         StrCat("vessels form an inside cycle: ", StrJoin(cycle, ", "))});
  }

  for (const Instance& inst : scene.instances) {
    if (inst.kind == InstanceKind::kVessel || inst.free_standing) continue;
    std::set<std::string> seen = {inst.id};
    std::vector<std::string> frontier = {inst.id};
    bool contained = false;
    while (!frontier.empty() && !contained) {
      const std::string current = frontier.back();
      frontier.pop_back();
      auto it = inside_edges.find(current);
      if (it == inside_edges.end()) continue;
      for (const std::string& outer : it->second) {
        auto found = by_id.find(outer);
        if (found != by_id.end() &&
            found->second->kind == InstanceKind::kVessel) {
          contained = true;
          break;
        }
        if (seen.insert(outer).second) frontier.push_back(outer);
      }
    }
    if (!contained) {
      out.push_back({ViolationCode::kNotContained,
                     {inst.id},
                     StrCat(KindName(inst.kind), " '", inst.id,
                            "' is inside no vessel and is not marked "
                            "free_standing")});
    }
  }
  return out;
}

bool HasErrors(const std::vector<Violation>& violations) {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return !v.warning; });
}

absl::StatusOr<std::set<std::string>> DirectContentOf(
    const SceneAnnotation& scene, std::string_view vessel_id) {
  const Instance* vessel = scene.Find(vessel_id);
  if (vessel == nullptr) {
    return absl::NotFoundError(StrCat("no instance with id '", vessel_id, "'"));
  }
  if (vessel->kind != InstanceKind::kVessel) {
    return absl::InvalidArgumentError(StrCat("instance '", vessel_id, "' is a ",
                                             KindName(vessel->kind),
                                             ", not a vessel"));
  }
  std::set<std::pair<std::string_view, std::string_view>> inside;
  for (const Relation& rel : scene.relations) {
    if (rel.kind == RelationKind::kInside) {
      inside.emplace(rel.subject, rel.object);
    }
  }
  std::vector<std::string_view> nested;
  for (const Instance& inst : scene.instances) {
    if (inst.kind == InstanceKind::kVessel && inst.id != vessel_id &&
        inside.contains({inst.id, vessel_id})) {
      nested.push_back(inst.id);
    }
  }
  std::set<std::string> content;
  for (const auto& [subject, object] : inside) {
    if (object != vessel_id || subject == vessel_id) continue;
    const bool via_nested =
        std::any_of(nested.begin(), nested.end(), [&](std::string_view w) {
          return w != subject && inside.contains({subject, w});
        });
    if (!via_nested) content.emplace(subject);
  }
  return content;
}

}  // namespace vessel_eval
