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

#include "vessel_eval/taxonomy.h"

#include <utility>

#include "str_cat.h"

namespace vessel_eval {

std::string_view KindName(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kVessel:
      return "vessel";
    case InstanceKind::kMaterial:
      return "material";
    case InstanceKind::kPart:
      return "part";
  }
  return "unknown";
}

absl::StatusOr<InstanceKind> ParseKind(std::string_view name) {
  if (name == "vessel") return InstanceKind::kVessel;
  if (name == "material") return InstanceKind::kMaterial;
  if (name == "part") return InstanceKind::kPart;
  return absl::InvalidArgumentError(
      StrCat("unknown instance kind '", name, "'"));
}

const Taxonomy& Taxonomy::Default() {
  static const Taxonomy* const taxonomy = [] {
    auto* t = new Taxonomy();
    auto add = [t](std::string name, InstanceKind kind, LabelRole role,
                   std::string parent) {
      absl::Status status =
          t->Add({std::move(name), kind, role, std::move(parent)});
      (void)status;
    };
    using K = InstanceKind;
    using R = LabelRole;
    add("vessel", K::kVessel, R::kClass, "");
    for (const char* name :
         {"tube", "iv_bag", "iv_bottle", "drip_chamber", "bottle", "syringe",
          "pipette", "beaker", "bowl", "cup", "plate", "flask", "jar"}) {
      add(name, K::kVessel, R::kClass, "vessel");
    }
    add("filled", K::kMaterial, R::kClass, "");
    for (const char* name : {"liquid", "suspension", "solid", "foam", "gel"}) {
      add(name, K::kMaterial, R::kClass, "filled");
    }
    add("blood", K::kMaterial, R::kClass, "liquid");
    add("urine", K::kMaterial, R::kClass, "liquid");
    add("powder", K::kMaterial, R::kClass, "solid");
    add("granular", K::kMaterial, R::kClass, "solid");
    for (const char* name : {"label", "spike", "cork"}) {
      add(name, K::kPart, R::kClass, "");
    }
    for (const char* name : {"transparent", "semi_transparent", "opaque"}) {
      add(name, K::kVessel, R::kProperty, "");
    }
    for (const char* name : {"scattered", "on_surface"}) {
      add(name, K::kMaterial, R::kProperty, "");
    }
    return t;
  }();
  return *taxonomy;
}

absl::Status Taxonomy::Add(TaxonomyEntry entry) {
  if (entry.name.empty()) {
    return absl::InvalidArgumentError("taxonomy label must be nonempty");
  }
  if (entries_.contains(entry.name)) {
    return absl::AlreadyExistsError(
        StrCat("label '", entry.name, "' already defined"));
  }
  if (!entry.parent.empty()) {
    const TaxonomyEntry* parent = Find(entry.parent);
    if (parent == nullptr) {
      return absl::NotFoundError(StrCat("parent '", entry.parent, "' of '",
                                        entry.name, "' is not defined"));
    }
    if (parent->kind != entry.kind || parent->role != entry.role) {
      return absl::InvalidArgumentError(StrCat(
          "label '", entry.name, "' differs in kind or role from its parent"));
    }
  }
  std::string key = entry.name;
  entries_.emplace(std::move(key), std::move(entry));
  return absl::OkStatus();
}

const TaxonomyEntry* Taxonomy::Find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> Taxonomy::Ancestors(std::string_view name) const {
  std::vector<std::string> out;
  const TaxonomyEntry* entry = Find(name);
  while (entry != nullptr && !entry->parent.empty()) {
    out.push_back(entry->parent);
    entry = Find(entry->parent);
  }
  return out;
}

LabelSet Taxonomy::Close(const LabelSet& labels) const {
  LabelSet closed = labels;
  for (const std::string& label : labels) {
    for (std::string& ancestor : Ancestors(label)) {
      closed.insert(std::move(ancestor));
    }
  }
  return closed;
}

std::vector<std::string> Taxonomy::Leaves(InstanceKind kind,
                                          LabelRole role) const {
  std::set<std::string_view> parents;
  for (const auto& [name, entry] : entries_) {
    if (!entry.parent.empty()) parents.insert(entry.parent);
  }
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) {
    if (entry.kind == kind && entry.role == role && !parents.contains(name)) {
      out.push_back(name);
    }
  }
  return out;
}

std::vector<std::string> Taxonomy::Names(InstanceKind kind,
                                         LabelRole role) const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) {
    if (entry.kind == kind && entry.role == role) out.push_back(name);
  }
  return out;
}

}  // namespace vessel_eval
