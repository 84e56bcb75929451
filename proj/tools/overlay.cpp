/* Copyright 2026 The rinkreg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "overlay.hpp"

#include "rinkreg/errors.hpp"

namespace rinkreg::cli {
namespace {

Rgb FrameTone(std::uint8_t cls) {
  if (cls == Index(SegClass::kBackground)) return {24, 24, 24};
  const auto g = static_cast<std::uint8_t>(70 + 12 * cls);
  return {g, g, g};
}

void DrawStrokes(std::vector<std::uint8_t>& rgb, const SegMap& tmpl, const Homography& h, int w, int hgt, Rgb tone) {
  SegMap warped(1, 1);
  try {
    warped = WarpRaster(tmpl, h, w, hgt);
  } catch (const Error&) {
    return;
  }
  const std::uint8_t bg = Index(SegClass::kBackground);
  for (int y = 0; y < hgt; ++y)
    for (int x = 0; x < w; ++x) {
      const std::uint8_t c = warped.at(x, y);
      bool on = IsStrokeClass(static_cast<SegClass>(c));
      // Rink outline: foreground pixels with a Background 4-neighbour.
      if (!on && c != bg) {
        on = (x > 0 && warped.at(x - 1, y) == bg) || (x + 1 < w && warped.at(x + 1, y) == bg) ||
             (y > 0 && warped.at(x, y - 1) == bg) || (y + 1 < hgt && warped.at(x, y + 1) == bg);
      }
      if (!on) continue;
      std::uint8_t* p = rgb.data() + 3 * (static_cast<std::size_t>(y) * w + x);
      p[0] = tone[0];
      p[1] = tone[1];
      p[2] = tone[2];
    }
}

}  // namespace

bool IsStrokeClass(SegClass c) {
  switch (c) {
    case SegClass::kBlueLines:
    case SegClass::kCenterLine:
    case SegClass::kCenterFaceoffCircle:
    case SegClass::kOuterFaceoffCircles:
    case SegClass::kGoalCreases:
      return true;
    default:
      return false;
  }
}

std::vector<std::uint8_t> RenderOverlay(const SegMap& frame, const SegMap& tmpl, const std::optional<Homography>& h_init,
                                        const std::optional<Homography>& h_final,
                                        const std::optional<Homography>& h_truth) {
  const int w = frame.width(), h = frame.height();
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Rgb t = FrameTone(frame.data()[i]);
    rgb[3 * i] = t[0];
    rgb[3 * i + 1] = t[1];
    rgb[3 * i + 2] = t[2];
  }
  if (h_truth) DrawStrokes(rgb, tmpl, *h_truth, w, h, kTruthTone);
  if (h_init) DrawStrokes(rgb, tmpl, *h_init, w, h, kInitTone);
  if (h_final) DrawStrokes(rgb, tmpl, *h_final, w, h, kFinalTone);
  return rgb;
}

}  // namespace rinkreg::cli
