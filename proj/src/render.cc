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

#include "vessel_eval/render.h"

#include <cctype>
#include <limits>

#include "str_cat.h"
#include "vessel_eval/taxonomy.h"

namespace vessel_eval {
namespace {

constexpr uint8_t kBackground = 32;
constexpr int kGlyphWidth = 5;
constexpr int kGlyphHeight = 7;
constexpr int kLineHeight = kGlyphHeight + 3;
constexpr int64_t kMaxRenderPixels = int64_t{1} << 28;

// 5x7 bitmaps; each string is one row, '#' set. Letters render uppercase.
struct Glyph {
  char c;
  const char* rows[kGlyphHeight];
};

constexpr Glyph kFont[] = {
    {'A', {" ### ", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
    {'B', {"#### ", "#   #", "#   #", "#### ", "#   #", "#   #", "#### "}},
    {'C', {" ### ", "#   #", "#    ", "#    ", "#    ", "#   #", " ### "}},
    {'D', {"#### ", "#   #", "#   #", "#   #", "#   #", "#   #", "#### "}},
    {'E', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#####"}},
    {'F', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#    "}},
    {'G', {" ### ", "#   #", "#    ", "# ###", "#   #", "#   #", " ####"}},
    {'H', {"#   #", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
    {'I', {" ### ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
    {'J', {"  ###", "   # ", "   # ", "   # ", "   # ", "#  # ", " ##  "}},
    {'K', {"#   #", "#  # ", "# #  ", "##   ", "# #  ", "#  # ", "#   #"}},
    {'L', {"#    ", "#    ", "#    ", "#    ", "#    ", "#    ", "#####"}},
    {'M', {"#   #", "## ##", "# # #", "# # #", "#   #", "#   #", "#   #"}},
    {'N', {"#   #", "#   #", "##  #", "# # #", "#  ##", "#   #", "#   #"}},
    {'O', {" ### ", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "}},
    {'P', {"#### ", "#   #", "#   #", "#### ", "#    ", "#    ", "#    "}},
    {'Q', {" ### ", "#   #", "#   #", "#   #", "# # #", "#  # ", " ## #"}},
    {'R', {"#### ", "#   #", "#   #", "#### ", "# #  ", "#  # ", "#   #"}},
    {'S', {" ####", "#    ", "#    ", " ### ", "    #", "    #", "#### "}},
    {'T', {"#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  "}},
    {'U', {"#   #", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "}},
    {'V', {"#   #", "#   #", "#   #", "#   #", "#   #", " # # ", "  #  "}},
    {'W', {"#   #", "#   #", "#   #", "# # #", "# # #", "# # #", " # # "}},
    {'X', {"#   #", "#   #", " # # ", "  #  ", " # # ", "#   #", "#   #"}},
    {'Y', {"#   #", "#   #", " # # ", "  #  ", "  #  ", "  #  ", "  #  "}},
    {'Z', {"#####", "    #", "   # ", "  #  ", " #   ", "#    ", "#####"}},
    {'0', {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "}},
    {'1', {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
    {'2', {" ### ", "#   #", "    #", "   # ", "  #  ", " #   ", "#####"}},
    {'3', {"#####", "   # ", "  #  ", "   # ", "    #", "#   #", " ### "}},
    {'4', {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "}},
    {'5', {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "}},
    {'6', {"  ## ", " #   ", "#    ", "#### ", "#   #", "#   #", " ### "}},
    {'7', {"#####", "    #", "   # ", "  #  ", " #   ", " #   ", " #   "}},
    {'8', {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "}},
    {'9', {" ### ", "#   #", "#   #", " ####", "    #", "   # ", " ##  "}},
    {'_', {"     ", "     ", "     ", "     ", "     ", "     ", "#####"}},
    {'-', {"     ", "     ", "     ", " ### ", "     ", "     ", "     "}},
    {':', {"     ", "  #  ", "  #  ", "     ", "  #  ", "  #  ", "     "}},
    {',', {"     ", "     ", "     ", "     ", "  #  ", "  #  ", " #   "}},
    {'.', {"     ", "     ", "     ", "     ", "     ", "  #  ", "  #  "}},
    {'?', {" ### ", "#   #", "    #", "   # ", "  #  ", "     ", "  #  "}},
};

const Glyph* FindGlyph(char c) {
  const char upper =
      static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const Glyph& g : kFont) {
    if (g.c == upper) return &g;
  }
  return c == ' ' ? nullptr : FindGlyph('?');
}

class Canvas {
 public:
  explicit Canvas(RgbImage* image) : image_(image) {}

  void Set(int64_t x, int64_t y, const std::array<uint8_t, 3>& rgb) {
    if (x < 0 || y < 0 || x >= image_->width || y >= image_->height) return;
    uint8_t* p = &image_->pixels[3 * (y * image_->width + x)];
    for (int k = 0; k < 3; ++k) p[k] = rgb[k];
  }

  // 50% blend of `rgb` over the current pixel.
  void Tint(int64_t x, int64_t y, const std::array<uint8_t, 3>& rgb) {
    uint8_t* p = &image_->pixels[3 * (y * image_->width + x)];
    for (int k = 0; k < 3; ++k)
      p[k] = static_cast<uint8_t>((p[k] + rgb[k]) / 2);
  }

  void Box(int64_t x0, int64_t y0, int64_t w, int64_t h,
           const std::array<uint8_t, 3>& rgb) {
    for (int64_t y = y0; y < y0 + h; ++y) {
      for (int64_t x = x0; x < x0 + w; ++x) Set(x, y, rgb);
    }
  }

  void Text(int64_t x, int64_t y, std::string_view text,
            const std::array<uint8_t, 3>& rgb) {
    for (char c : text) {
      if (const Glyph* g = FindGlyph(c); g != nullptr) {
        for (int r = 0; r < kGlyphHeight; ++r) {
          for (int k = 0; k < kGlyphWidth; ++k) {
            if (g->rows[r][k] == '#') Set(x + k, y + r, rgb);
          }
        }
      }
      x += kGlyphWidth + 1;
    }
  }

 private:
  RgbImage* image_;
};

// Most specific classes: those that are no other class's ancestor.
std::string LeafClasses(const Instance& inst) {
  LabelSet ancestors;
  for (const std::string& c : inst.classes) {
    for (const std::string& a : Taxonomy::Default().Ancestors(c)) {
      ancestors.insert(a);
    }
  }
  std::string out;
  for (const std::string& c : inst.classes) {
    if (ancestors.contains(c)) continue;
    out += out.empty() ? c : "," + c;
  }
  return out;
}

}  // namespace

std::array<uint8_t, 3> InstanceColor(std::string_view id) {
  uint32_t h = 2166136261u;
  for (char c : id) {
    h ^= static_cast<uint8_t>(c);
    h *= 16777619u;
  }
  // Keep channels bright enough to stand out from the background.
  return {static_cast<uint8_t>(64 + (h & 0xff) % 192),
          static_cast<uint8_t>(64 + ((h >> 8) & 0xff) % 192),
          static_cast<uint8_t>(64 + ((h >> 16) & 0xff) % 192)};
}

absl::StatusOr<RgbImage> RenderOverlay(const SceneAnnotation& scene) {
  if (scene.width <= 0 || scene.height <= 0 ||
      scene.width > kMaxRenderPixels / scene.height) {
    return absl::InvalidArgumentError(
        StrCat("cannot render a ", scene.width, "x", scene.height, " image"));
  }
  RgbImage image;
  image.width = scene.width;
  image.height = scene.height;
  image.pixels.assign(static_cast<size_t>(3 * scene.width * scene.height),
                      kBackground);
  Canvas canvas(&image);

  for (const Instance& inst : scene.instances) {
    if (!inst.mask.SameDimensions(
            BinaryMask::Empty(scene.width, scene.height))) {
      return absl::InvalidArgumentError(
          StrCat("instance '", inst.id, "' does not match the image size"));
    }
  }
  for (const Instance& inst : scene.instances) {
    if (inst.kind == InstanceKind::kVessel) continue;
    const std::vector<uint8_t> bits = inst.mask.Decode();
    const auto color = InstanceColor(inst.id);
    for (int64_t i = 0; i < static_cast<int64_t>(bits.size()); ++i) {
      if (bits[i]) canvas.Tint(i % scene.width, i / scene.width, color);
    }
  }
  for (const Instance& inst : scene.instances) {
    if (inst.kind != InstanceKind::kVessel) continue;
    const std::vector<uint8_t> bits = inst.mask.Decode();
    const auto color = InstanceColor(inst.id);
    auto in = [&](int64_t x, int64_t y) {
      return x >= 0 && y >= 0 && x < scene.width && y < scene.height &&
             bits[y * scene.width + x];
    };
    for (int64_t y = 0; y < scene.height; ++y) {
      for (int64_t x = 0; x < scene.width; ++x) {
        if (in(x, y) && (!in(x - 1, y) || !in(x + 1, y) || !in(x, y - 1) ||
                         !in(x, y + 1))) {
          canvas.Set(x, y, color);
        }
      }
    }
  }

  int64_t y = 2;
  for (const Instance& inst : scene.instances) {
    const auto color = InstanceColor(inst.id);
    canvas.Box(2, y, kGlyphHeight, kGlyphHeight, color);
    canvas.Text(2 + kGlyphHeight + 3, y, inst.id + " " + LeafClasses(inst),
                {255, 255, 255});
    y += kLineHeight;
  }
  return image;
}

std::string EncodePpm(const RgbImage& image) {
  std::string out = StrCat("P6\n", image.width, " ", image.height, "\n255\n");
  out.append(reinterpret_cast<const char*>(image.pixels.data()),
             image.pixels.size());
  return out;
}

}  // namespace vessel_eval
