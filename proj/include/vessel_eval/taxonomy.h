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

#ifndef VESSEL_EVAL_TAXONOMY_H_
#define VESSEL_EVAL_TAXONOMY_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace vessel_eval {

enum class InstanceKind { kVessel, kMaterial, kPart };

std::string_view KindName(InstanceKind kind);
absl::StatusOr<InstanceKind> ParseKind(std::string_view name);

// Class and property names attached to an instance. Ordered so that every
// report and document built from it is deterministic.
using LabelSet = std::set<std::string>;

enum class LabelRole { kClass, kProperty };

struct TaxonomyEntry {
  std::string name;
  InstanceKind kind = InstanceKind::kVessel;
  LabelRole role = LabelRole::kClass;
  // Empty for roots.
  std::string parent;
};

// Closed set of class and property labels with their subclass edges.
//
// The default taxonomy covers vessels (tube, syringe, ...) under "vessel",
// material phases under "filled" (blood and urine under "liquid", powder and
// granular under "solid"), the part classes label/spike/cork, and the
// appearance properties of vessels and materials.
class Taxonomy {
 public:
  Taxonomy() = default;

  static const Taxonomy& Default();

  // Extends the taxonomy. The parent, when given, must already exist and
  // share the entry's kind and role.
  absl::Status Add(TaxonomyEntry entry);

  const TaxonomyEntry* Find(std::string_view name) const;
  bool Contains(std::string_view name) const { return Find(name) != nullptr; }

  // Ancestors from nearest to root, excluding `name` itself.
  std::vector<std::string> Ancestors(std::string_view name) const;

  // Adds every ancestor of every known label. Unknown labels pass through.
  LabelSet Close(const LabelSet& labels) const;

  // Labels of the given kind and role that have no children.
  std::vector<std::string> Leaves(InstanceKind kind, LabelRole role) const;
  std::vector<std::string> Names(InstanceKind kind, LabelRole role) const;

 private:
  std::map<std::string, TaxonomyEntry, std::less<>> entries_;
};

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_TAXONOMY_H_
