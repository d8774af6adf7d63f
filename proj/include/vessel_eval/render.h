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

#ifndef VESSEL_EVAL_RENDER_H_
#define VESSEL_EVAL_RENDER_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "vessel_eval/scene.h"

namespace vessel_eval {

struct RgbImage {
  int64_t width = 0;
  int64_t height = 0;
  // Row-major, three bytes per pixel.
  std::vector<uint8_t> pixels;
};

// Stable color of an instance id (FNV-1a hash of the id).
std::array<uint8_t, 3> InstanceColor(std::string_view id);

// Draws materials and parts as tinted regions and vessels as outlines over a
// dark background of the scene's size, with a legend of ids and classes in
// the top-left corner. A scene without instances gives a plain background.
absl::StatusOr<RgbImage> RenderOverlay(const SceneAnnotation& scene);

// Binary PPM (P6).
std::string EncodePpm(const RgbImage& image);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_RENDER_H_
