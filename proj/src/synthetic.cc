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

#include "vessel_eval/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <utility>

#include "json.hpp"
#include "str_cat.h"

namespace vessel_eval {
namespace {

using nlohmann::json;

constexpr int64_t kMinImageSide = 32;
constexpr int64_t kMinCellSide = 24;
constexpr int kMaxMaterials = 8;
constexpr int kMaxParts = 4;

// ---------------------------------------------------------------------------
// Row-extent shapes. spans[i] covers columns [first, second) of row y0 + i;
// first >= second marks an empty row.

struct Shape {
  int64_t y0 = 0;
  std::vector<std::pair<int64_t, int64_t>> spans;
};

int64_t SpanLength(const std::pair<int64_t, int64_t>& s) {
  return std::max<int64_t>(0, s.second - s.first);
}

int64_t Area(const Shape& s) {
  int64_t area = 0;
  for (const auto& span : s.spans) area += SpanLength(span);
  return area;
}

int64_t Intersection(const Shape& a, const Shape& b) {
  const int64_t lo = std::max(a.y0, b.y0);
  const int64_t hi = std::min(a.y0 + static_cast<int64_t>(a.spans.size()),
                              b.y0 + static_cast<int64_t>(b.spans.size()));
  int64_t total = 0;
  for (int64_t y = lo; y < hi; ++y) {
    const auto& sa = a.spans[y - a.y0];
    const auto& sb = b.spans[y - b.y0];
    total += SpanLength(
        {std::max(sa.first, sb.first), std::min(sa.second, sb.second)});
  }
  return total;
}

// Same arithmetic as the evaluator's IOU: integer counts, one division.
double ShapeIou(const Shape& a, const Shape& b) {
  const int64_t inter = Intersection(a, b);
  const int64_t uni = Area(a) + Area(b) - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Drops empty rows at both ends.
Shape Trim(Shape s) {
  size_t first = 0;
  while (first < s.spans.size() && SpanLength(s.spans[first]) == 0) ++first;
  size_t last = s.spans.size();
  while (last > first && SpanLength(s.spans[last - 1]) == 0) --last;
  Shape out;
  out.y0 = s.y0 + static_cast<int64_t>(first);
  out.spans.assign(s.spans.begin() + first, s.spans.begin() + last);
  return out;
}

// Clips to the image, turning out-of-range rows and columns into empty rows.
Shape Clip(Shape s, int64_t width, int64_t height) {
  Shape out;
  out.y0 = std::max<int64_t>(0, s.y0);
  for (size_t i = 0; i < s.spans.size(); ++i) {
    const int64_t y = s.y0 + static_cast<int64_t>(i);
    if (y < 0 || y >= height) continue;
    out.spans.push_back({std::clamp<int64_t>(s.spans[i].first, 0, width),
                         std::clamp<int64_t>(s.spans[i].second, 0, width)});
  }
  return Trim(std::move(out));
}

Shape Rect(int64_t x0, int64_t y0, int64_t x1, int64_t y1, int64_t width,
           int64_t height) {
  Shape s;
  s.y0 = y0;
  s.spans.assign(static_cast<size_t>(std::max<int64_t>(0, y1 - y0)), {x0, x1});
  return Clip(std::move(s), width, height);
}

Shape Ellipse(int64_t x0, int64_t y0, int64_t x1, int64_t y1, int64_t width,
              int64_t height) {
  const double cx = 0.5 * static_cast<double>(x0 + x1);
  const double cy = 0.5 * static_cast<double>(y0 + y1);
  const double rx = 0.5 * static_cast<double>(x1 - x0);
  const double ry = 0.5 * static_cast<double>(y1 - y0);
  Shape s;
  s.y0 = y0;
  for (int64_t y = y0; y < y1; ++y) {
    const double t = (static_cast<double>(y) + 0.5 - cy) / ry;
    const double half = rx * std::sqrt(std::max(0.0, 1.0 - t * t));
    s.spans.push_back({std::llround(cx - half), std::llround(cx + half)});
  }
  return Clip(std::move(s), width, height);
}

// Rows [begin, end) of `s`.
Shape Rows(const Shape& s, int64_t begin, int64_t end) {
  Shape out;
  out.y0 = std::max(begin, s.y0);
  const int64_t stop =
      std::min(end, s.y0 + static_cast<int64_t>(s.spans.size()));
  for (int64_t y = out.y0; y < stop; ++y)
    out.spans.push_back(s.spans[y - s.y0]);
  return Trim(std::move(out));
}

// Grows (step > 0) or shrinks (step < 0) by |step| pixels on every side.
Shape Morph(const Shape& s, int step, int64_t width, int64_t height) {
  if (step == 0 || s.spans.empty()) return s;
  Shape out;
  if (step > 0) {
    out.y0 = s.y0 - step;
    for (int i = 0; i < step; ++i) out.spans.push_back(s.spans.front());
    out.spans.insert(out.spans.end(), s.spans.begin(), s.spans.end());
    for (int i = 0; i < step; ++i) out.spans.push_back(s.spans.back());
    for (auto& span : out.spans) {
      span.first -= step;
      span.second += step;
    }
    return Clip(std::move(out), width, height);
  }
  const size_t cut = static_cast<size_t>(-step);
  if (s.spans.size() <= 2 * cut) return Shape{s.y0, {}};
  out.y0 = s.y0 + static_cast<int64_t>(cut);
  out.spans.assign(s.spans.begin() + cut, s.spans.end() - cut);
  for (auto& span : out.spans) {
    span.first -= step;
    span.second += step;
  }
  return Trim(std::move(out));
}

absl::StatusOr<BinaryMask> ToMask(const Shape& s, int64_t width,
                                  int64_t height) {
  std::vector<RowSpan> spans;
  spans.reserve(s.spans.size());
  for (size_t i = 0; i < s.spans.size(); ++i) {
    if (SpanLength(s.spans[i]) == 0) continue;
    spans.push_back(
        {s.y0 + static_cast<int64_t>(i), s.spans[i].first, s.spans[i].second});
  }
  return BinaryMask::FromRowSpans(width, height, spans);
}

// ---------------------------------------------------------------------------
// Random draws.

class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream) {
    std::seed_seq seq{
        static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
        static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
    gen_.seed(seq);
  }

  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int64_t Int(int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(gen_);
  }
  bool Bernoulli(double p) { return std::bernoulli_distribution(p)(gen_); }
  template <typename T>
  const T& Pick(const std::vector<T>& items) {
    return items[static_cast<size_t>(
        Int(0, static_cast<int64_t>(items.size()) - 1))];
  }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Scene model.

struct GenInstance {
  std::string id;
  InstanceKind kind = InstanceKind::kVessel;
  Shape shape;
  LabelSet classes;
  LabelSet properties;
  // Vessels this instance is inside (GT indices).
  std::vector<int> parents;
  // Prediction side: index of the GT source, or -1 when spurious.
  int source = -1;
};

struct GenScene {
  std::vector<GenInstance> instances;
  // Unordered vessel pairs (GT indices, first < second).
  std::set<std::pair<int, int>> links;
};

LabelSet LabelsOf(const GenInstance& inst) {
  LabelSet labels = inst.classes;
  labels.insert(inst.properties.begin(), inst.properties.end());
  return labels;
}

std::vector<std::string> Choices(InstanceKind kind) {
  std::vector<std::string> names =
      Taxonomy::Default().Names(kind, LabelRole::kClass);
  std::erase_if(names, [](const std::string& n) {
    return n == "vessel" || n == "filled";
  });
  return names;
}

LabelSet Closed(const std::string& leaf) {
  return Taxonomy::Default().Close({leaf});
}

const std::vector<std::string>& VesselProperties() {
  static const auto* const kProps = new std::vector<std::string>(
      {"opaque", "semi_transparent", "transparent"});
  return *kProps;
}

std::string Id(const char* pattern, int a, int b = 0) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

// Fills one vessel's bounding box with material bands and parts.
void AddContent(const SyntheticPlan& plan, int vessel, int64_t x0, int64_t y0,
                int64_t x1, int64_t y1, Rng& rng, GenScene* scene) {
  const Shape vessel_shape = scene->instances[vessel].shape;
  const std::string vid = scene->instances[vessel].id;
  const int64_t h = y1 - y0;
  const int64_t air =
      std::llround(static_cast<double>(h) * rng.Uniform(0.2, 0.35));
  int count = static_cast<int>(rng.Int(plan.materials.min, plan.materials.max));
  const int64_t region = h - air;
  count = static_cast<int>(std::min<int64_t>(count, region / 2));
  std::vector<double> weights(count);
  for (double& w : weights) w = rng.Uniform(1.0, 2.0);
  double total = 0.0;
  for (double w : weights) total += w;
  int64_t row = y0 + air;
  double acc = 0.0;
  for (int m = 0; m < count; ++m) {
    acc += weights[m];
    const int64_t end =
        m + 1 == count
            ? y1
            : y0 + air +
                  std::llround(static_cast<double>(region) * acc / total);
    Shape band = Rows(vessel_shape, row, end);
    row = end;
    GenInstance inst;
    inst.id = StrCat(vid, Id("_m%d", m));
    inst.kind = InstanceKind::kMaterial;
    inst.classes = Closed(rng.Pick(Choices(InstanceKind::kMaterial)));
    if (rng.Bernoulli(0.2)) inst.properties.insert("scattered");
    if (rng.Bernoulli(0.1)) inst.properties.insert("on_surface");
    inst.parents = {vessel};
    if (Area(band) == 0) continue;
    inst.shape = std::move(band);
    scene->instances.push_back(std::move(inst));
  }

  const int parts = static_cast<int>(rng.Int(plan.parts.min, plan.parts.max));
  const int64_t part_h = std::max<int64_t>(2, air / 2);
  const int64_t slot = (x1 - x0) / (2 * parts + 1);
  if (parts == 0 || air < 4 || slot < 2) return;
  const int64_t top = y0 + air / 4;
  for (int p = 0; p < parts; ++p) {
    GenInstance inst;
    inst.id = StrCat(vid, Id("_p%d", p));
    inst.kind = InstanceKind::kPart;
    inst.classes = Closed(rng.Pick(Choices(InstanceKind::kPart)));
    const int64_t left = x0 + (2 * p + 1) * slot;
    inst.shape =
        Rect(left, top, left + slot, top + part_h, plan.width, plan.height);
    inst.parents = {vessel};
    scene->instances.push_back(std::move(inst));
  }
}

GenScene BuildGt(const SyntheticPlan& plan, Rng& rng) {
  GenScene scene;
  int n = static_cast<int>(rng.Int(plan.vessels.min, plan.vessels.max));
  if (plan.nested) n = std::max(n, 1);
  if (n == 0) return scene;
  const int cols =
      static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  const int64_t cell_w = plan.width / cols;
  const int64_t cell_h = plan.height / rows;
  std::vector<int> vessel_index;
  for (int v = 0; v < n; ++v) {
    const int64_t cx0 = (v % cols) * cell_w;
    const int64_t cy0 = (v / cols) * cell_h;
    int64_t x0, y0, x1, y1;
    if (plan.overlap) {
      const auto w = static_cast<int64_t>(rng.Uniform(1.0, 1.25) * cell_w);
      const auto h = static_cast<int64_t>(rng.Uniform(1.0, 1.25) * cell_h);
      x0 = std::max<int64_t>(0, cx0 + (cell_w - w) / 2);
      y0 = std::max<int64_t>(0, cy0 + (cell_h - h) / 2);
      x1 = std::min(plan.width, x0 + w);
      y1 = std::min(plan.height, y0 + h);
    } else {
      const int64_t mx = cell_w / 8, my = cell_h / 8;
      const int64_t inner_w = cell_w - 2 * mx, inner_h = cell_h - 2 * my;
      const auto w = static_cast<int64_t>(rng.Uniform(0.55, 0.85) * inner_w);
      const auto h = static_cast<int64_t>(rng.Uniform(0.6, 0.9) * inner_h);
      x0 = cx0 + mx + rng.Int(0, inner_w - w);
      y0 = cy0 + my + rng.Int(0, inner_h - h);
      x1 = x0 + w;
      y1 = y0 + h;
    }
    const bool tube = plan.nested && v == 0;
    const bool ellipse = !tube && rng.Bernoulli(0.5);
    GenInstance vessel;
    vessel.id = Id("v%02d", v);
    vessel.kind = InstanceKind::kVessel;
    vessel.shape = ellipse ? Ellipse(x0, y0, x1, y1, plan.width, plan.height)
                           : Rect(x0, y0, x1, y1, plan.width, plan.height);
    vessel.classes = Closed(tube ? std::string("tube")
                                 : rng.Pick(Choices(InstanceKind::kVessel)));
    vessel.properties = {rng.Pick(VesselProperties())};
    const int index = static_cast<int>(scene.instances.size());
    vessel_index.push_back(index);
    scene.instances.push_back(std::move(vessel));
    // The tube's only content is the pipette.
    if (!tube) AddContent(plan, index, x0, y0, x1, y1, rng, &scene);

    if (tube) {
      const int64_t pw = std::max<int64_t>(3, (x1 - x0) / 5);
      const int64_t ph = (y1 - y0) * 7 / 10;
      const int64_t px0 = x0 + ((x1 - x0) - pw) / 2;
      const int64_t py0 = y0 + (y1 - y0) / 20;
      GenInstance pipette;
      pipette.id = StrCat(scene.instances[index].id, "_pipette");
      pipette.kind = InstanceKind::kVessel;
      pipette.shape =
          Rect(px0, py0, px0 + pw, py0 + ph, plan.width, plan.height);
      pipette.classes = Closed("pipette");
      pipette.properties = {"transparent"};
      pipette.parents = {index};
      const int pipette_index = static_cast<int>(scene.instances.size());
      GenInstance blood;
      blood.id = StrCat(pipette.id, "_m0");
      blood.kind = InstanceKind::kMaterial;
      blood.shape = Rows(pipette.shape, py0 + ph * 6 / 10, py0 + ph);
      blood.classes = Closed("blood");
      blood.parents = {pipette_index, index};
      scene.instances.push_back(std::move(pipette));
      scene.instances.push_back(std::move(blood));
    }
  }
  for (size_t a = 0; a < vessel_index.size(); ++a) {
    for (size_t b = a + 1; b < vessel_index.size(); ++b) {
      if (rng.Bernoulli(plan.link)) {
        scene.links.insert({vessel_index[a], vessel_index[b]});
      }
    }
  }
  return scene;
}

// Removes GT content instances with IOU > 0.5 against an earlier instance of
// the same kind. Vessels are disjoint or nested small by construction.
void DeduplicateGt(GenScene* scene) {
  std::vector<bool> removed(scene->instances.size(), false);
  for (size_t j = 0; j < scene->instances.size(); ++j) {
    const GenInstance& b = scene->instances[j];
    if (b.kind == InstanceKind::kVessel) continue;
    for (size_t i = 0; i < j; ++i) {
      const GenInstance& a = scene->instances[i];
      if (removed[i] || a.kind != b.kind) continue;
      if (ShapeIou(a.shape, b.shape) > kMatchIouThreshold) removed[j] = true;
    }
  }
  // Only content is removed and content is never a parent, so every parent
  // index survives the compaction.
  std::vector<int> new_index(scene->instances.size(), -1);
  std::vector<GenInstance> kept;
  for (size_t i = 0; i < scene->instances.size(); ++i) {
    if (removed[i]) continue;
    new_index[i] = static_cast<int>(kept.size());
    kept.push_back(std::move(scene->instances[i]));
  }
  for (GenInstance& inst : kept) {
    for (int& p : inst.parents) p = new_index[p];
  }
  std::set<std::pair<int, int>> links;
  for (const auto& [a, b] : scene->links)
    links.insert({new_index[a], new_index[b]});
  scene->instances = std::move(kept);
  scene->links = std::move(links);
}

const PerturbSpec& SpecFor(const SyntheticPlan& plan, InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kVessel:
      return plan.vessel;
    case InstanceKind::kMaterial:
      return plan.material;
    case InstanceKind::kPart:
      return plan.part;
  }
  return plan.vessel;
}

bool ClashesWithOtherGt(const GenScene& gt, const Shape& shape,
                        InstanceKind kind, int source) {
  for (int g = 0; g < static_cast<int>(gt.instances.size()); ++g) {
    const GenInstance& other = gt.instances[g];
    if (g == source || other.kind != kind) continue;
    if (ShapeIou(shape, other.shape) > kMatchIouThreshold) return true;
  }
  return false;
}

struct PredPlan {
  std::vector<GenInstance> instances;
  // Unordered pairs of GT vessel indices linked in the prediction.
  std::set<std::pair<int, int>> links;
  // pred index of the prediction derived from GT instance g, or -1.
  std::vector<int> pred_of_gt;
};

PredPlan BuildPred(const SyntheticPlan& plan, const GenScene& gt, Rng& rng) {
  PredPlan pred;
  pred.pred_of_gt.assign(gt.instances.size(), -1);
  std::vector<GenInstance> spurious;
  int spurious_count = 0;
  for (int g = 0; g < static_cast<int>(gt.instances.size()); ++g) {
    const GenInstance& src = gt.instances[g];
    const PerturbSpec& spec = SpecFor(plan, src.kind);
    const bool drop = rng.Bernoulli(spec.drop);
    const bool flip = rng.Bernoulli(spec.flip);
    const int step = static_cast<int>(rng.Int(-spec.morph, spec.morph));
    const bool extra = rng.Bernoulli(spec.spurious);
    const std::string flipped = rng.Pick(Choices(src.kind));
    const double fw = rng.Uniform(0.1, 0.25), fh = rng.Uniform(0.1, 0.25);
    const double fx = rng.Uniform(0.0, 1.0), fy = rng.Uniform(0.0, 1.0);
    const std::string extra_class = rng.Pick(Choices(src.kind));
    const std::string extra_prop = rng.Pick(VesselProperties());

    if (!drop) {
      GenInstance p = src;
      p.id = "p_" + src.id;
      p.source = g;
      if (flip) {
        LabelSet classes = Closed(flipped);
        // A draw of the same leaf is no flip; take the next choice instead.
        if (classes == src.classes) {
          const std::vector<std::string> choices = Choices(src.kind);
          auto it = std::find(choices.begin(), choices.end(), flipped);
          classes =
              Closed(choices[(it - choices.begin() + 1) % choices.size()]);
        }
        p.classes = std::move(classes);
      }
      Shape morphed = Morph(src.shape, step, plan.width, plan.height);
      if (Area(morphed) > 0 && !ClashesWithOtherGt(gt, morphed, src.kind, g)) {
        p.shape = std::move(morphed);
      }
      pred.pred_of_gt[g] = static_cast<int>(pred.instances.size());
      pred.instances.push_back(std::move(p));
    }

    if (extra) {
      // Vessel: anywhere in the image. Content: inside the source's vessel.
      int64_t bx0 = 0, by0 = 0, bx1 = plan.width, by1 = plan.height;
      int parent = -1;
      if (src.kind != InstanceKind::kVessel && !src.parents.empty()) {
        parent = src.parents.front();
        const Shape& vs = gt.instances[parent].shape;
        by0 = vs.y0;
        by1 = vs.y0 + static_cast<int64_t>(vs.spans.size());
        bx0 = plan.width;
        bx1 = 0;
        for (const auto& span : vs.spans) {
          if (SpanLength(span) == 0) continue;
          bx0 = std::min(bx0, span.first);
          bx1 = std::max(bx1, span.second);
        }
      }
      const auto w =
          std::max<int64_t>(2, static_cast<int64_t>(fw * (bx1 - bx0)));
      const auto h =
          std::max<int64_t>(2, static_cast<int64_t>(fh * (by1 - by0)));
      const int64_t x0 =
          bx0 + static_cast<int64_t>(fx * std::max<int64_t>(0, bx1 - bx0 - w));
      const int64_t y0 =
          by0 + static_cast<int64_t>(fy * std::max<int64_t>(0, by1 - by0 - h));
      GenInstance s;
      s.id = Id("s_%03d", spurious_count++);
      s.kind = src.kind;
      s.shape = Rect(x0, y0, x0 + w, y0 + h, plan.width, plan.height);
      s.classes = Closed(extra_class);
      if (src.kind == InstanceKind::kVessel) s.properties = {extra_prop};
      if (parent >= 0) s.parents = {parent};
      if (Area(s.shape) > 0 && !ClashesWithOtherGt(gt, s.shape, s.kind, -1)) {
        spurious.push_back(std::move(s));
      }
    }
  }
  for (GenInstance& s : spurious) pred.instances.push_back(std::move(s));

  std::vector<int> vessels;
  for (int g = 0; g < static_cast<int>(gt.instances.size()); ++g) {
    if (gt.instances[g].kind == InstanceKind::kVessel) vessels.push_back(g);
  }
  for (size_t a = 0; a < vessels.size(); ++a) {
    for (size_t b = a + 1; b < vessels.size(); ++b) {
      const std::pair<int, int> pair{vessels[a], vessels[b]};
      const bool linked = gt.links.contains(pair);
      const bool toggle =
          rng.Bernoulli(linked ? plan.link_drop : plan.link_spurious);
      const bool kept =
          pred.pred_of_gt[pair.first] >= 0 && pred.pred_of_gt[pair.second] >= 0;
      if (kept && linked != toggle) pred.links.insert(pair);
    }
  }
  return pred;
}

void AddContainment(std::vector<Relation>* relations, const std::string& inner,
                    const std::string& outer) {
  relations->push_back({RelationKind::kInside, inner, outer});
  relations->push_back({RelationKind::kContain, outer, inner});
}

void AddLink(std::vector<Relation>* relations, const std::string& a,
             const std::string& b) {
  relations->push_back({RelationKind::kLinked, a, b});
  relations->push_back({RelationKind::kLinked, b, a});
}

absl::StatusOr<Instance> ToInstance(const GenInstance& g, int64_t width,
                                    int64_t height) {
  absl::StatusOr<BinaryMask> mask = ToMask(g.shape, width, height);
  if (!mask.ok()) return mask.status();
  Instance inst;
  inst.id = g.id;
  inst.kind = g.kind;
  inst.mask = *std::move(mask);
  inst.classes = g.classes;
  inst.properties = g.properties;
  return inst;
}

absl::StatusOr<SceneAnnotation> MaterializeGt(const SyntheticPlan& plan,
                                              const std::string& name,
                                              const GenScene& gt) {
  SceneAnnotation scene;
  scene.width = plan.width;
  scene.height = plan.height;
  scene.source_tag = name;
  for (const GenInstance& g : gt.instances) {
    absl::StatusOr<Instance> inst = ToInstance(g, plan.width, plan.height);
    if (!inst.ok()) return inst.status();
    scene.instances.push_back(*std::move(inst));
    for (int p : g.parents) {
      AddContainment(&scene.relations, g.id, gt.instances[p].id);
    }
  }
  for (const auto& [a, b] : gt.links) {
    AddLink(&scene.relations, gt.instances[a].id, gt.instances[b].id);
  }
  scene.Normalize();
  return scene;
}

absl::StatusOr<SceneAnnotation> MaterializePred(const SyntheticPlan& plan,
                                                const std::string& name,
                                                const PredPlan& pred) {
  SceneAnnotation scene;
  scene.width = plan.width;
  scene.height = plan.height;
  scene.source_tag = name;
  auto pred_id = [&](int gt_index) -> const std::string* {
    const int p = pred.pred_of_gt[gt_index];
    return p < 0 ? nullptr : &pred.instances[p].id;
  };
  for (const GenInstance& p : pred.instances) {
    absl::StatusOr<Instance> inst = ToInstance(p, plan.width, plan.height);
    if (!inst.ok()) return inst.status();
    bool placed = false;
    for (int parent : p.parents) {
      if (const std::string* outer = pred_id(parent); outer != nullptr) {
        AddContainment(&scene.relations, p.id, *outer);
        placed = true;
      }
    }
    inst->free_standing = p.kind != InstanceKind::kVessel && !placed;
    scene.instances.push_back(*std::move(inst));
  }
  for (const auto& [a, b] : pred.links) {
    AddLink(&scene.relations, *pred_id(a), *pred_id(b));
  }
  scene.Normalize();
  return scene;
}

// ---------------------------------------------------------------------------
// Expected counters for one scene.

struct SceneCounters {
  std::map<std::string, PoolReport> pools;
  std::map<std::string, RelationCounts> relations;
  int64_t unmapped = 0;
};

const char* PoolName(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kVessel:
      return kPoolVessel;
    case InstanceKind::kMaterial:
      return kPoolMaterial;
    case InstanceKind::kPart:
      return kPoolPart;
  }
  return kPoolVessel;
}

void CountPool(const GenScene& gt, const PredPlan& pred, InstanceKind kind,
               PoolReport* pool) {
  // GT segments of the pool in document (id) order, as the evaluator sees
  // them; sums are accumulated in that order.
  std::vector<int> gts;
  for (int g = 0; g < static_cast<int>(gt.instances.size()); ++g) {
    if (gt.instances[g].kind == kind) gts.push_back(g);
  }
  std::sort(gts.begin(), gts.end(), [&](int a, int b) {
    return gt.instances[a].id < gt.instances[b].id;
  });
  std::vector<int> preds;
  for (int p = 0; p < static_cast<int>(pred.instances.size()); ++p) {
    if (pred.instances[p].kind == kind) preds.push_back(p);
  }

  std::set<std::string> labels;
  for (int g : gts) {
    for (const std::string& l : LabelsOf(gt.instances[g])) labels.insert(l);
  }
  std::set<std::string> all_labels = labels;
  for (int p : preds) {
    for (const std::string& l : LabelsOf(pred.instances[p]))
      all_labels.insert(l);
  }

  // IOU of each GT segment with its own prediction; 0 when dropped.
  std::map<int, double> iou;
  for (int g : gts) {
    const int p = pred.pred_of_gt[g];
    iou[g] =
        p < 0 ? 0.0 : ShapeIou(gt.instances[g].shape, pred.instances[p].shape);
  }

  PanopticTable& with_class = pool->with_class;
  for (const std::string& c : all_labels) {
    PanopticCounts& counts = with_class.classes[c];
    std::set<int> matched_preds;
    for (int g : gts) {
      const GenInstance& gi = gt.instances[g];
      if (!LabelsOf(gi).contains(c)) continue;
      ++counts.gt_segments;
      const int p = pred.pred_of_gt[g];
      if (p >= 0 && LabelsOf(pred.instances[p]).contains(c) &&
          iou[g] > kMatchIouThreshold) {
        ++counts.tp;
        counts.iou_sum += iou[g];
        matched_preds.insert(p);
      } else {
        ++counts.fn;
      }
    }
    for (int p : preds) {
      if (LabelsOf(pred.instances[p]).contains(c) &&
          !matched_preds.contains(p)) {
        counts.fp += 1.0;
      }
    }
  }

  PanopticTable& agnostic = pool->class_agnostic;
  int64_t matched = 0;
  for (int g : gts) {
    const bool hit = pred.pred_of_gt[g] >= 0 && iou[g] > kMatchIouThreshold;
    if (hit) ++matched;
    for (const std::string& c : LabelsOf(gt.instances[g])) {
      PanopticCounts& counts = agnostic.classes[c];
      ++counts.gt_segments;
      if (hit) {
        ++counts.tp;
        counts.iou_sum += iou[g];
      } else {
        ++counts.fn;
      }
    }
  }
  agnostic.unmatched_predictions = static_cast<int64_t>(preds.size()) - matched;
}

void CountRelations(const GenScene& gt, const PredPlan& pred,
                    SceneCounters* out) {
  auto matched = [&](int g) {
    const int p = pred.pred_of_gt[g];
    return p >= 0 && ShapeIou(gt.instances[g].shape, pred.instances[p].shape) >
                         kMatchIouThreshold;
  };
  std::vector<int> vessels;
  for (int g = 0; g < static_cast<int>(gt.instances.size()); ++g) {
    if (gt.instances[g].kind == InstanceKind::kVessel) vessels.push_back(g);
  }
  // Ordered (inner, outer) vessel containment, in GT indices.
  std::set<std::pair<int, int>> gt_inside, pred_inside;
  for (int v : vessels) {
    for (int parent : gt.instances[v].parents) gt_inside.insert({v, parent});
  }
  std::set<std::pair<int, int>> pred_links;
  // Containment between two kept vessels is always predicted.
  for (const auto& [inner, outer] : gt_inside) {
    if (pred.pred_of_gt[inner] < 0 || pred.pred_of_gt[outer] < 0) continue;
    if (matched(inner) && matched(outer)) {
      pred_inside.insert({inner, outer});
    } else {
      out->unmapped += 2;  // inside and contain
    }
  }
  for (const auto& link : pred.links) {
    if (matched(link.first) && matched(link.second)) {
      pred_links.insert(link);
    } else {
      out->unmapped += 2;  // both directions
    }
  }

  auto tally = [](bool in_gt, bool in_pred, RelationCounts* c) {
    c->tp += in_gt && in_pred;
    c->fp += !in_gt && in_pred;
    c->fn += in_gt && !in_pred;
  };
  RelationCounts& inside = out->relations["inside"];
  RelationCounts& contain = out->relations["contain"];
  RelationCounts& linked = out->relations["linked"];
  RelationCounts& none = out->relations["none"];
  std::set<std::pair<int, int>> all_inside = gt_inside;
  all_inside.insert(pred_inside.begin(), pred_inside.end());
  for (const auto& pair : all_inside) {
    tally(gt_inside.contains(pair), pred_inside.contains(pair), &inside);
    tally(gt_inside.contains(pair), pred_inside.contains(pair), &contain);
  }
  std::set<std::pair<int, int>> all_links = gt.links;
  all_links.insert(pred_links.begin(), pred_links.end());
  for (const auto& pair : all_links) {
    tally(gt.links.contains(pair), pred_links.contains(pair), &linked);
  }
  for (size_t a = 0; a < vessels.size(); ++a) {
    for (size_t b = a + 1; b < vessels.size(); ++b) {
      const int x = vessels[a], y = vessels[b];
      const std::pair<int, int> pair{x, y};
      const bool gt_rel = gt.links.contains(pair) ||
                          gt_inside.contains({x, y}) ||
                          gt_inside.contains({y, x});
      const bool pred_rel = pred_links.contains(pair) ||
                            pred_inside.contains({x, y}) ||
                            pred_inside.contains({y, x});
      tally(!gt_rel, !pred_rel, &none);
    }
  }
}

SceneCounters CountScene(const GenScene& gt, const PredPlan& pred) {
  SceneCounters out;
  for (InstanceKind kind :
       {InstanceKind::kVessel, InstanceKind::kMaterial, InstanceKind::kPart}) {
    CountPool(gt, pred, kind, &out.pools[PoolName(kind)]);
  }
  CountRelations(gt, pred, &out);
  return out;
}

void Accumulate(const SceneCounters& scene, ExpectedCounters* total) {
  ++total->scene_count;
  for (const auto& [name, pool] : scene.pools) {
    PoolReport& into = total->pools[name];
    for (auto [from, to] :
         {std::pair{&pool.with_class, &into.with_class},
          std::pair{&pool.class_agnostic, &into.class_agnostic}}) {
      for (const auto& [label, c] : from->classes) {
        PanopticCounts& t = to->classes[label];
        t.tp += c.tp;
        t.fp += c.fp;
        t.fn += c.fn;
        t.iou_sum += c.iou_sum;
        t.gt_segments += c.gt_segments;
      }
      to->unmatched_predictions += from->unmatched_predictions;
    }
  }
  for (const auto& [name, c] : scene.relations) {
    RelationCounts& t = total->relations[name];
    t.tp += c.tp;
    t.fp += c.fp;
    t.fn += c.fn;
  }
  total->unmapped_pred_relations += scene.unmapped;
}

// Class-agnostic false positives: the unmatched predictions of the whole set,
// split by each label's share of GT segments.
void SplitAgnosticFalsePositives(PanopticTable* table) {
  int64_t total = 0;
  for (const auto& [label, c] : table->classes) total += c.gt_segments;
  for (auto& [label, c] : table->classes) {
    c.fp = total == 0 ? 0.0
                      : static_cast<double>(table->unmatched_predictions) *
                            (static_cast<double>(c.gt_segments) /
                             static_cast<double>(total));
  }
}

// ---------------------------------------------------------------------------
// Documents.

json CountsJson(const PanopticTable& table) {
  json classes = json::object();
  for (const auto& [label, c] : table.classes) {
    classes[label] = {{"tp", c.tp},
                      {"fp", c.fp},
                      {"fn", c.fn},
                      {"iou_sum", c.iou_sum},
                      {"gt_segments", c.gt_segments}};
  }
  return {{"classes", std::move(classes)},
          {"unmatched_predictions", table.unmatched_predictions}};
}

PanopticTable CountsFromJson(const json& node, MatchMode mode) {
  PanopticTable table;
  table.mode = mode;
  table.unmatched_predictions = node.at("unmatched_predictions").get<int64_t>();
  for (const auto& [label, c] : node.at("classes").items()) {
    PanopticCounts& counts = table.classes[label];
    counts.tp = c.at("tp").get<int64_t>();
    counts.fp = c.at("fp").get<double>();
    counts.fn = c.at("fn").get<int64_t>();
    counts.iou_sum = c.at("iou_sum").get<double>();
    counts.gt_segments = c.at("gt_segments").get<int64_t>();
  }
  return table;
}

absl::Status CheckKeys(const json& node, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  if (!node.is_object()) {
    return absl::InvalidArgumentError(StrCat(where, " must be an object"));
  }
  for (const auto& [key, unused] : node.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      return absl::InvalidArgumentError(
          StrCat("unknown plan field '", where, ".", key, "'"));
    }
  }
  return absl::OkStatus();
}

CountRange RangeFromJson(const json& node) {
  if (!node.is_array() || node.size() != 2) {
    throw json::type_error::create(302, "range must be a [min, max] array",
                                   &node);
  }
  return {node[0].get<int>(), node[1].get<int>()};
}

absl::Status PerturbFromJson(const json& node, std::string_view where,
                             PerturbSpec* spec) {
  if (absl::Status s =
          CheckKeys(node, where, {"drop", "spurious", "flip", "morph"});
      !s.ok()) {
    return s;
  }
  spec->drop = node.value("drop", spec->drop);
  spec->spurious = node.value("spurious", spec->spurious);
  spec->flip = node.value("flip", spec->flip);
  spec->morph = node.value("morph", spec->morph);
  return absl::OkStatus();
}

absl::Status CheckProbability(double p, std::string_view name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        StrCat(name, " must be a probability in [0, 1], got ", p));
  }
  return absl::OkStatus();
}

absl::Status CheckRange(const CountRange& r, std::string_view name, int cap) {
  if (r.min < 0 || r.min > r.max || r.max > cap) {
    return absl::InvalidArgumentError(
        StrCat(name, " range [", r.min, ", ", r.max,
               "] must satisfy 0 <= min <= max <= ", cap));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidatePlan(const SyntheticPlan& plan) {
  if (plan.scenes < 0) {
    return absl::InvalidArgumentError("scene count must be non-negative");
  }
  if (plan.width < kMinImageSide || plan.height < kMinImageSide) {
    return absl::InvalidArgumentError(
        StrCat("image must be at least ", kMinImageSide, "x", kMinImageSide));
  }
  if (absl::Status s = CheckRange(plan.vessels, "vessels", 64); !s.ok())
    return s;
  if (absl::Status s = CheckRange(plan.materials, "materials", kMaxMaterials);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckRange(plan.parts, "parts", kMaxParts); !s.ok()) {
    return s;
  }
  const int n = std::max(plan.vessels.max, 1);
  const int cols =
      static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  if (plan.width / cols < kMinCellSide || plan.height / rows < kMinCellSide) {
    return absl::InvalidArgumentError(
        StrCat(plan.vessels.max, " vessels do not fit a ", plan.width, "x",
               plan.height, " image"));
  }
  for (const auto& [p, name] : {std::pair{plan.link, "link"},
                                {plan.link_drop, "link_drop"},
                                {plan.link_spurious, "link_spurious"}}) {
    if (absl::Status s = CheckProbability(p, name); !s.ok()) return s;
  }
  for (const auto& [spec, name] : {std::pair{&plan.vessel, "vessel"},
                                   {&plan.material, "material"},
                                   {&plan.part, "part"}}) {
    for (const auto& [p, field] : {std::pair{spec->drop, "drop"},
                                   {spec->spurious, "spurious"},
                                   {spec->flip, "flip"}}) {
      if (absl::Status s = CheckProbability(p, StrCat(name, ".", field));
          !s.ok()) {
        return s;
      }
    }
    if (spec->morph < 0) {
      return absl::InvalidArgumentError(
          StrCat(name, ".morph must be non-negative"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<SyntheticPlan> ParsePlan(std::string_view document) {
  SyntheticPlan plan;
  try {
    const json doc = json::parse(document);
    if (absl::Status s =
            CheckKeys(doc, "plan",
                      {"scenes", "width", "height", "seed", "vessels",
                       "materials", "parts", "overlap", "nested", "link",
                       "link_drop", "link_spurious", "perturb"});
        !s.ok()) {
      return s;
    }
    plan.scenes = doc.value("scenes", plan.scenes);
    plan.width = doc.value("width", plan.width);
    plan.height = doc.value("height", plan.height);
    plan.seed = doc.value("seed", plan.seed);
    if (doc.contains("vessels")) plan.vessels = RangeFromJson(doc["vessels"]);
    if (doc.contains("materials")) {
      plan.materials = RangeFromJson(doc["materials"]);
    }
    if (doc.contains("parts")) plan.parts = RangeFromJson(doc["parts"]);
    plan.overlap = doc.value("overlap", plan.overlap);
    plan.nested = doc.value("nested", plan.nested);
    plan.link = doc.value("link", plan.link);
    plan.link_drop = doc.value("link_drop", plan.link_drop);
    plan.link_spurious = doc.value("link_spurious", plan.link_spurious);
    if (doc.contains("perturb")) {
      const json& perturb = doc["perturb"];
      if (absl::Status s =
              CheckKeys(perturb, "perturb", {"vessel", "material", "part"});
          !s.ok()) {
        return s;
      }
      for (const auto& [key, spec] : {std::pair{"vessel", &plan.vessel},
                                      {"material", &plan.material},
                                      {"part", &plan.part}}) {
        if (!perturb.contains(key)) continue;
        if (absl::Status s =
                PerturbFromJson(perturb[key], StrCat("perturb.", key), spec);
            !s.ok()) {
          return s;
        }
      }
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("malformed plan: ", e.what()));
  }
  if (absl::Status s = ValidatePlan(plan); !s.ok()) return s;
  return plan;
}

std::string SerializeExpected(const ExpectedCounters& expected) {
  json pools = json::object();
  for (const auto& [name, pool] : expected.pools) {
    pools[name] = {{"with_class", CountsJson(pool.with_class)},
                   {"class_agnostic", CountsJson(pool.class_agnostic)}};
  }
  json relations = json::object();
  for (const auto& [name, c] : expected.relations) {
    relations[name] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
  }
  json doc = {{"format", "vessel_eval.expected"},
              {"version", "1.0"},
              {"scene_count", expected.scene_count},
              {"pools", std::move(pools)},
              {"relations", std::move(relations)},
              {"unmapped_pred_relations", expected.unmapped_pred_relations}};
  return doc.dump(1) + "\n";
}

absl::StatusOr<ExpectedCounters> ParseExpected(std::string_view document) {
  try {
    const json doc = json::parse(document);
    if (doc.at("format").get<std::string>() != "vessel_eval.expected") {
      return absl::InvalidArgumentError("not an expected-counters document");
    }
    ExpectedCounters out;
    out.scene_count = doc.at("scene_count").get<int64_t>();
    for (const auto& [name, pool] : doc.at("pools").items()) {
      PoolReport& p = out.pools[name];
      p.with_class =
          CountsFromJson(pool.at("with_class"), MatchMode::kWithClass);
      p.class_agnostic =
          CountsFromJson(pool.at("class_agnostic"), MatchMode::kClassAgnostic);
    }
    for (const auto& [name, c] : doc.at("relations").items()) {
      out.relations[name] = {c.at("tp").get<int64_t>(),
                             c.at("fp").get<int64_t>(),
                             c.at("fn").get<int64_t>()};
    }
    out.unmapped_pred_relations =
        doc.at("unmapped_pred_relations").get<int64_t>();
    return out;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        StrCat("malformed expected-counters document: ", e.what()));
  }
}

absl::StatusOr<SyntheticDataset> GenerateSynthetic(const SyntheticPlan& plan) {
  if (absl::Status s = ValidatePlan(plan); !s.ok()) return s;
  SyntheticDataset data;
  for (int i = 0; i < plan.scenes; ++i) {
    Rng rng(plan.seed, static_cast<uint64_t>(i));
    GenScene gt = BuildGt(plan, rng);
    DeduplicateGt(&gt);
    const PredPlan pred = BuildPred(plan, gt, rng);

    SyntheticScene scene;
    scene.name = Id("scene_%04d.json", i);
    absl::StatusOr<SceneAnnotation> gt_doc =
        MaterializeGt(plan, scene.name, gt);
    if (!gt_doc.ok()) return gt_doc.status();
    absl::StatusOr<SceneAnnotation> pred_doc =
        MaterializePred(plan, scene.name, pred);
    if (!pred_doc.ok()) return pred_doc.status();
    for (const SceneAnnotation* doc : {&*gt_doc, &*pred_doc}) {
      const std::vector<Violation> violations = ValidateScene(*doc);
      if (HasErrors(violations)) {
        return absl::InternalError(
            StrCat("generated ", scene.name,
                   " is invalid: ", violations.front().message));
      }
    }
    scene.gt = *std::move(gt_doc);
    scene.pred = *std::move(pred_doc);
    Accumulate(CountScene(gt, pred), &data.expected);
    data.scenes.push_back(std::move(scene));
  }
  for (auto& [name, pool] : data.expected.pools) {
    SplitAgnosticFalsePositives(&pool.class_agnostic);
  }
  for (const char* name : kRelationClasses) data.expected.relations[name];
  return data;
}

}  // namespace vessel_eval
