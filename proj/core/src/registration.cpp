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

#include "rinkreg/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "raster_util.hpp"
#include "rinkreg/random.hpp"

namespace rinkreg {
namespace {

constexpr std::size_t kMinComponentPx = 15;
constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Nelder-Mead

struct NmResult {
  std::vector<double> x;
  double f = kInf;
  int evals = 0;
};

template <typename F>
NmResult NelderMead(F&& f, const std::vector<double>& x0, const std::vector<double>& step, int max_evals,
                    double xtol) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fs(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };
  fs[0] = eval(pts[0]);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i + 1][i] += step[i];
    fs[i + 1] = eval(pts[i + 1]);
  }
  std::vector<std::size_t> order(n + 1);
  std::vector<double> c(n), xr(n), xe(n), xc(n);
  auto along = [&](std::vector<double>& out, const std::vector<double>& from, double t) {
    for (std::size_t k = 0; k < n; ++k) out[k] = c[k] + t * (from[k] - c[k]);
  };
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(pts[i][k] - pts[best][k]));
    if (size < xtol) break;

    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) c[k] += pts[i][k] / static_cast<double>(n);
    }
    along(xr, pts[worst], -1.0);
    const double fr = eval(xr);
    if (fr < fs[best]) {
      along(xe, pts[worst], -2.0);
      const double fe = evals < max_evals ? eval(xe) : kInf;
      if (fe < fr) {
        pts[worst] = xe;
        fs[worst] = fe;
      } else {
        pts[worst] = xr;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      pts[worst] = xr;
      fs[worst] = fr;
      continue;
    }
    const bool outside = fr < fs[worst];
    along(xc, outside ? xr : pts[worst], 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fs[worst])) {
      pts[worst] = xc;
      fs[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n && evals < max_evals; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
      fs[i] = eval(pts[i]);
    }
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  return {pts[best], fs[best], evals};
}

// ---------------------------------------------------------------------------
// Soft masks

// Separable box filter of width 2r+1 with zero padding, applied in place to
// the window [x0, x1) x [y0, y1) of a plane with row stride `stride`. Values
// outside the window are treated as zero.
void BoxBlur(float* plane, int stride, const MaskObjective::Window& win, int radius, std::vector<float>& tmp) {
  const int w = win.x1 - win.x0;
  const int h = win.y1 - win.y0;
  if (radius <= 0 || w <= 0 || h <= 0) return;
  const float norm = 1.0f / static_cast<float>(2 * radius + 1);
  const std::size_t need = static_cast<std::size_t>(w) * h + w + w + 2 * radius;
  if (tmp.size() < need) tmp.resize(need);
  float* rows = tmp.data();
  float* acc = rows + static_cast<std::size_t>(w) * h;
  float* pad = acc + w;
  std::fill(pad, pad + w + 2 * radius, 0.0f);
  for (int y = 0; y < h; ++y) {
    const float* in = plane + static_cast<std::size_t>(y + win.y0) * stride + win.x0;
    float* out = rows + static_cast<std::size_t>(y) * w;
    std::copy(in, in + w, pad + radius);
    std::fill(out, out + w, 0.0f);
    for (int k = 0; k <= 2 * radius; ++k) {
      const float* src = pad + k;
      for (int x = 0; x < w; ++x) out[x] += src[x];
    }
  }
  std::fill(acc, acc + w, 0.0f);
  for (int y = 0; y < std::min(radius, h); ++y) {
    const float* r = rows + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) acc[x] += r[x];
  }
  const float norm2 = norm * norm;
  for (int y = 0; y < h; ++y) {
    if (y + radius < h) {
      const float* r = rows + static_cast<std::size_t>(y + radius) * w;
      for (int x = 0; x < w; ++x) acc[x] += r[x];
    }
    if (y > radius) {
      const float* r = rows + static_cast<std::size_t>(y - radius - 1) * w;
      for (int x = 0; x < w; ++x) acc[x] -= r[x];
    }
    float* out = plane + static_cast<std::size_t>(y + win.y0) * stride + win.x0;
    for (int x = 0; x < w; ++x) out[x] = acc[x] * norm2;
  }
}

std::array<double, 9> Adjugate(const std::array<double, 9>& m) {
  return {m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
          m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
          m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
}

int FactorFor(Size2 frame, int long_side) {
  const int longest = std::max(frame.width, frame.height);
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(longest) / std::max(1, long_side))));
}

using Window = MaskObjective::Window;

// Cap on template samples per working pixel along each axis.
constexpr int kMaxSupersample = 2;

bool Empty(const Window& w) { return w.x0 >= w.x1 || w.y0 >= w.y1; }

Window Union(const Window& a, const Window& b) {
  if (Empty(a)) return b;
  if (Empty(b)) return a;
  return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1), std::max(a.y1, b.y1)};
}

// Running bounding box of written pixels, grown by the blur radius at the end.
struct BoxTracker {
  std::array<Window, kNumClasses> box;
  BoxTracker() { box.fill({std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1}); }
  void Add(int c, int x, int y) {
    Window& b = box[c];
    b.x0 = std::min(b.x0, x);
    b.y0 = std::min(b.y0, y);
    b.x1 = std::max(b.x1, x + 1);
    b.y1 = std::max(b.y1, y + 1);
  }
  Window Grown(int c, int r, int w, int h) const {
    const Window& b = box[c];
    if (Empty(b)) return {};
    return {std::max(0, b.x0 - r), std::max(0, b.y0 - r), std::min(w, b.x1 + r), std::min(h, b.y1 + r)};
  }
};

void ClearWindow(float* plane, int stride, const Window& w) {
  if (Empty(w)) return;
  for (int y = w.y0; y < w.y1; ++y) {
    float* row = plane + static_cast<std::size_t>(y) * stride;
    std::fill(row + w.x0, row + w.x1, 0.0f);
  }
}

}  // namespace

// Background is never stored: every pixel's class weights sum to one on both
// sides and blurring is linear, so its difference plane is minus the sum of
// the others.
MaskObjective::MaskObjective(const SegMap& seg, const SegMap& tmpl, int factor, int blur_px)
    : tmpl_(&tmpl), factor_(std::max(1, factor)), blur_(std::max(0, blur_px / 2)) {
  ww_ = std::max(1, seg.width() / factor_);
  wh_ = std::max(1, seg.height() / factor_);
  const std::size_t n = static_cast<std::size_t>(ww_) * wh_;
  seg_planes_.assign(kNumClasses * n, 0.0f);
  const int fx = std::min(factor_, seg.width());
  const int fy = std::min(factor_, seg.height());
  const float inv = 1.0f / static_cast<float>(fx * fy);
  const std::uint8_t bg = Index(SegClass::kBackground);
  BoxTracker boxes;
  for (int j = 0; j < wh_; ++j)
    for (int i = 0; i < ww_; ++i)
      for (int y = j * factor_; y < j * factor_ + fy; ++y)
        for (int x = i * factor_; x < i * factor_ + fx; ++x) {
          const std::uint8_t c = seg.at(x, y);
          if (c == bg) continue;
          seg_planes_[c * n + static_cast<std::size_t>(j) * ww_ + i] += inv;
          boxes.Add(c, i, j);
        }
  // Chessboard distance from each template pixel to the nearest pixel of
  // another class (or the raster edge), by two chamfer passes.
  const int tw = tmpl.width(), th = tmpl.height();
  uniform_radius_.assign(static_cast<std::size_t>(tw) * th, 0.0f);
  auto at = [&](int x, int y) -> float& { return uniform_radius_[static_cast<std::size_t>(y) * tw + x]; };
  for (int y = 0; y < th; ++y)
    for (int x = 0; x < tw; ++x) {
      float d = 1e9f;
      const std::uint8_t c = tmpl.at(x, y);
      for (int dy = -1; dy <= 0; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx >= 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (!tmpl.contains(nx, ny) || tmpl.at(nx, ny) != c) d = 0.0f;
          else d = std::min(d, at(nx, ny) + 1.0f);
        }
      at(x, y) = d;
    }
  for (int y = th - 1; y >= 0; --y)
    for (int x = tw - 1; x >= 0; --x) {
      float d = at(x, y);
      const std::uint8_t c = tmpl.at(x, y);
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx <= 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (!tmpl.contains(nx, ny) || tmpl.at(nx, ny) != c) d = 0.0f;
          else d = std::min(d, at(nx, ny) + 1.0f);
        }
      at(x, y) = d;
    }

  std::vector<float> tmp;
  for (int c = 1; c < kNumClasses; ++c) {
    seg_win_[c] = boxes.Grown(c, blur_, ww_, wh_);
    if (Empty(seg_win_[c])) continue;
    float* plane = seg_planes_.data() + c * n;
    BoxBlur(plane, ww_, seg_win_[c], blur_, tmp);
  }
}

void MaskObjective::RenderTemplate(const Homography& h, std::vector<float>& planes,
                                   std::array<Window, kNumClasses>& windows) const {
  const std::size_t n = static_cast<std::size_t>(ww_) * wh_;
  if (planes.size() != kNumClasses * n) {
    planes.assign(kNumClasses * n, 0.0f);
  } else {
    for (int c = 1; c < kNumClasses; ++c) ClearWindow(planes.data() + c * n, ww_, windows[c]);
  }
  windows.fill({});
  const SegMap& t = *tmpl_;
  const int tw = t.width(), th = t.height();
  const auto tdata = t.data();
  const auto a = Adjugate(h.entries());
  const double f = factor_;
  // The template is seen only where the homogeneous depth has the sign it
  // has at the frame centre.
  const double cx = 0.5 * ww_ * f, cy = 0.5 * wh_ * f;
  const double side = (a[6] * cx + a[7] * cy + a[8]) < 0.0 ? -1.0 : 1.0;
  const std::uint8_t bg = Index(SegClass::kBackground);
  float* base = planes.data();
  BoxTracker boxes;
  // Adds the bilinear one-hot weights of template point (u, v), in pixel
  // coordinates whose integer values are pixel centres.
  auto sample = [&](double u, double v, float weight, std::size_t pix, int i, int j) {
    if (!(u > -1.0 && v > -1.0 && u < tw && v < th)) return;
    const int x0 = static_cast<int>(u + 1.0) - 1;  // floor on (-1, tw)
    const int y0 = static_cast<int>(v + 1.0) - 1;
    std::uint8_t cls[4];
    if (x0 >= 0 && y0 >= 0 && x0 + 1 < tw && y0 + 1 < th) {
      const std::size_t k = static_cast<std::size_t>(y0) * tw + x0;
      cls[0] = tdata[k];
      cls[1] = tdata[k + 1];
      cls[2] = tdata[k + tw];
      cls[3] = tdata[k + tw + 1];
    } else {
      for (int q = 0; q < 4; ++q) {
        const int qx = x0 + (q & 1);
        const int qy = y0 + (q >> 1);
        cls[q] = (qx >= 0 && qy >= 0 && qx < tw && qy < th) ? tdata[static_cast<std::size_t>(qy) * tw + qx] : bg;
      }
    }
    if (cls[0] == cls[1] && cls[0] == cls[2] && cls[0] == cls[3]) {
      if (cls[0] == bg) return;
      base[cls[0] * n + pix] += weight;
      boxes.Add(cls[0], i, j);
      return;
    }
    const float ax = static_cast<float>(u - x0);
    const float ay = static_cast<float>(v - y0);
    const float wts[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
    for (int q = 0; q < 4; ++q) {
      if (cls[q] == bg) continue;
      base[cls[q] * n + pix] += weight * wts[q];
      boxes.Add(cls[q], i, j);
    }
  };
  for (int j = 0; j < wh_; ++j) {
    const double py = (j + 0.5) * f;
    double nu = a[0] * 0.5 * f + a[1] * py + a[2];
    double nv = a[3] * 0.5 * f + a[4] * py + a[5];
    double t3 = a[6] * 0.5 * f + a[7] * py + a[8];
    for (int i = 0; i < ww_; ++i, nu += a[0] * f, nv += a[3] * f, t3 += a[6] * f) {
      const std::size_t pix = static_cast<std::size_t>(j) * ww_ + i;
      if (t3 * side <= kHorizonTol) continue;
      const double r3 = 1.0 / t3;
      const double u = nu * r3;
      const double v = nv * r3;
      // Distant ice covers several template pixels per working pixel; sample
      // it as densely as its footprint near class changes so it is
      // area-averaged like the frame side.
      const double reach = f * r3 * side *
                           std::max(std::abs(a[0] - u * a[6]) + std::abs(a[1] - u * a[7]),
                                    std::abs(a[3] - v * a[6]) + std::abs(a[4] - v * a[7]));
      int ss = 1;
      if (reach > 1.0) {
        const bool inside = u >= 0.0 && v >= 0.0 && u < tw && v < th;
        const bool near_raster = u > -reach - 1.0 && v > -reach - 1.0 && u < tw + reach + 1.0 && v < th + reach + 1.0;
        const bool uniform =
            inside && uniform_radius_[static_cast<std::size_t>(v) * tw + static_cast<std::size_t>(u)] > reach + 1.0;
        if (near_raster && !uniform) ss = reach >= kMaxSupersample ? kMaxSupersample : static_cast<int>(std::ceil(reach));
      }
      if (ss == 1) {
        sample(u - 0.5, v - 0.5, 1.0f, pix, i, j);
        continue;
      }
      const float weight = 1.0f / static_cast<float>(ss * ss);
      for (int sy = 0; sy < ss; ++sy) {
        const double qy = j * f + (sy + 0.5) * f / ss;
        for (int sx = 0; sx < ss; ++sx) {
          const double qx = i * f + (sx + 0.5) * f / ss;
          const double q3 = a[6] * qx + a[7] * qy + a[8];
          if (q3 * side <= kHorizonTol) continue;
          sample((a[0] * qx + a[1] * qy + a[2]) / q3 - 0.5, (a[3] * qx + a[4] * qy + a[5]) / q3 - 0.5, weight, pix, i,
                 j);
        }
      }
    }
  }
  thread_local std::vector<float> tmp;
  for (int c = 1; c < kNumClasses; ++c) {
    windows[c] = boxes.Grown(c, blur_, ww_, wh_);
    BoxBlur(base + c * n, ww_, windows[c], blur_, tmp);
  }
}

double MaskObjective::L1(const Homography& h) const {
  thread_local std::vector<float> planes;
  thread_local std::array<Window, kNumClasses> windows{};
  thread_local std::vector<float> bg_diff;
  RenderTemplate(h, planes, windows);
  const std::size_t n = static_cast<std::size_t>(ww_) * wh_;
  bg_diff.assign(n, 0.0f);
  double total = 0.0;
  for (int c = 1; c < kNumClasses; ++c) {
    const Window u = Union(windows[c], seg_win_[c]);
    if (Empty(u)) continue;
    double s = 0.0;
    for (int y = u.y0; y < u.y1; ++y) {
      const std::size_t row = static_cast<std::size_t>(y) * ww_;
      const float* a = planes.data() + c * n + row;
      const float* b = seg_planes_.data() + c * n + row;
      float* acc = bg_diff.data() + row;
      float rs = 0.0f;
      for (int x = u.x0; x < u.x1; ++x) {
        const float d = a[x] - b[x];
        rs += std::abs(d);
        acc[x] += d;
      }
      s += rs;
    }
    total += s;
  }
  double s = 0.0;
  for (int y = 0; y < wh_; ++y) {
    const float* acc = bg_diff.data() + static_cast<std::size_t>(y) * ww_;
    float rs = 0.0f;
    for (int x = 0; x < ww_; ++x) rs += std::abs(acc[x]);
    s += rs;
  }
  total += s;
  return total / (static_cast<double>(kNumClasses) * static_cast<double>(n));
}

double MaskObjective::SoftIou(const Homography& h) const {
  thread_local std::vector<float> planes;
  thread_local std::array<Window, kNumClasses> windows{};
  RenderTemplate(h, planes, windows);
  const std::size_t n = static_cast<std::size_t>(ww_) * wh_;
  double inter = 0.0, uni = 0.0;
  for (int c = 1; c < kNumClasses; ++c) {
    const Window u = Union(windows[c], seg_win_[c]);
    if (Empty(u)) continue;
    for (int y = u.y0; y < u.y1; ++y) {
      const std::size_t row = static_cast<std::size_t>(y) * ww_;
      const float* a = planes.data() + c * n + row;
      const float* b = seg_planes_.data() + c * n + row;
      for (int x = u.x0; x < u.x1; ++x) {
        inter += std::min(a[x], b[x]);
        uni += std::max(a[x], b[x]);
      }
    }
  }
  return uni > 0.0 ? inter / uni : 0.0;
}

// ---------------------------------------------------------------------------
// Frame keypoints

namespace {

struct Component {
  std::vector<int> pixels;
  bool touches_border = false;
  Point2 centroid;
};

Component Describe(std::vector<int> pixels, int w, int h) {
  Component c;
  double sx = 0.0, sy = 0.0;
  for (int idx : pixels) {
    const int x = idx % w;
    const int y = idx / w;
    sx += x + 0.5;
    sy += y + 0.5;
    if (x == 0 || y == 0 || x == w - 1 || y == h - 1) c.touches_border = true;
  }
  c.centroid = {sx / pixels.size(), sy / pixels.size()};
  c.pixels = std::move(pixels);
  return c;
}

bool NearBackground(const SegMap& seg, int x, int y, int radius) {
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (seg.contains(x + dx, y + dy) && seg.at(x + dx, y + dy) == Index(SegClass::kBackground)) return true;
  return false;
}

// Ends of a thin band that stop at the rink boundary rather than at the
// frame edge or at another marking.
void LineEnds(const SegMap& seg, SegClass cls, KeypointTag tag, std::vector<FrameKeypoint>& out) {
  const int w = seg.width(), h = seg.height();
  for (auto& pixels : detail::ClassComponents(seg, Index(cls))) {
    if (pixels.size() < kMinComponentPx) continue;
    const Component comp = Describe(std::move(pixels), w, h);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int idx : comp.pixels) {
      const double dx = idx % w + 0.5 - comp.centroid.x;
      const double dy = idx / w + 0.5 - comp.centroid.y;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
    const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    const Point2 dir{std::cos(theta), std::sin(theta)};
    double tmin = kInf, tmax = -kInf;
    for (int idx : comp.pixels) {
      const double t = (idx % w + 0.5 - comp.centroid.x) * dir.x + (idx / w + 0.5 - comp.centroid.y) * dir.y;
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
    }
    if (tmax - tmin < 8.0) continue;  // blob, not a band
    for (const double t_end : {tmin, tmax}) {
      bool border = false, boundary = false;
      for (int idx : comp.pixels) {
        const int x = idx % w, y = idx / w;
        const double t = (x + 0.5 - comp.centroid.x) * dir.x + (y + 0.5 - comp.centroid.y) * dir.y;
        if (std::abs(t - t_end) > 2.0) continue;
        if (x <= 1 || y <= 1 || x >= w - 2 || y >= h - 2) border = true;
        if (NearBackground(seg, x, y, 1)) boundary = true;
      }
      if (border || !boundary) continue;
      out.push_back({comp.centroid + t_end * dir, cls, tag});
    }
  }
}

// Points where the defence zone, the area behind the goal line and the
// outside of the rink meet.
void GoalLineEnds(const SegMap& seg, std::vector<FrameKeypoint>& out) {
  const int w = seg.width(), h = seg.height();
  const std::uint8_t behind = Index(SegClass::kBehindGoal);
  const std::uint8_t defense = Index(SegClass::kDefenseZones);
  const std::uint8_t bg = Index(SegClass::kBackground);
  // Pixel corners whose surrounding 2r x 2r block holds all three classes;
  // the block is centred on the corner so neither side biases the centroid.
  SegMap mask(w, h);
  constexpr int r = 2;
  for (int y = r; y <= h - r; ++y)
    for (int x = r; x <= w - r; ++x) {
      bool has_behind = false, has_defense = false, has_bg = false;
      for (int yy = y - r; yy < y + r; ++yy)
        for (int xx = x - r; xx < x + r; ++xx) {
          const std::uint8_t c = seg.at(xx, yy);
          has_behind |= c == behind;
          has_defense |= c == defense;
          has_bg |= c == bg;
        }
      if (has_behind && has_defense && has_bg) mask.set(x, y, std::uint8_t{1});
    }
  for (auto& pixels : detail::ClassComponents(mask, 1)) {
    if (pixels.size() < 3 || pixels.size() > 400) continue;
    Component comp = Describe(std::move(pixels), w, h);
    const Point2 c = comp.centroid - Point2{0.5, 0.5};
    if (c.x < 4 || c.y < 4 || c.x > w - 4 || c.y > h - 4) continue;
    out.push_back({c, SegClass::kDefenseZones, KeypointTag::kGoalLineEnd});
  }
}

}  // namespace

std::vector<FrameKeypoint> ExtractFrameKeypoints(const SegMap& seg) {
  const int w = seg.width(), h = seg.height();
  std::vector<FrameKeypoint> out;
  auto blobs = [&](SegClass cls) {
    std::vector<Component> comps;
    for (auto& pixels : detail::ClassComponents(seg, Index(cls))) {
      if (pixels.size() < kMinComponentPx) continue;
      Component c = Describe(std::move(pixels), w, h);
      if (!c.touches_border) comps.push_back(std::move(c));
    }
    return comps;
  };

  const auto outer_spots = blobs(SegClass::kOuterFaceoffSpots);
  for (const auto& c : outer_spots) out.push_back({c.centroid, SegClass::kOuterFaceoffSpots, KeypointTag::kOuterFaceoffCentre});
  // Faceoff circles whose spot was lost still locate the circle centre.
  for (const auto& c : blobs(SegClass::kOuterFaceoffCircles)) {
    int x0 = w, y0 = h, x1 = -1, y1 = -1;
    for (int idx : c.pixels) {
      x0 = std::min(x0, idx % w);
      x1 = std::max(x1, idx % w);
      y0 = std::min(y0, idx / w);
      y1 = std::max(y1, idx / w);
    }
    const bool has_spot = std::any_of(outer_spots.begin(), outer_spots.end(), [&](const Component& s) {
      return s.centroid.x > x0 && s.centroid.x < x1 + 1 && s.centroid.y > y0 && s.centroid.y < y1 + 1;
    });
    if (!has_spot) out.push_back({c.centroid, SegClass::kOuterFaceoffCircles, KeypointTag::kOuterFaceoffCentre});
  }
  for (const auto& c : blobs(SegClass::kInnerFaceoffSpots)) {
    out.push_back({c.centroid, SegClass::kInnerFaceoffSpots, KeypointTag::kInnerFaceoffSpot});
  }
  for (const auto& c : blobs(SegClass::kCenterFaceoffCircle)) {
    out.push_back({c.centroid, SegClass::kCenterFaceoffCircle, KeypointTag::kCentreCircleCentre});
  }
  LineEnds(seg, SegClass::kBlueLines, KeypointTag::kBlueLineEnd, out);
  LineEnds(seg, SegClass::kCenterLine, KeypointTag::kCentreLineEnd, out);
  GoalLineEnds(seg, out);
  return out;
}

// ---------------------------------------------------------------------------
// Initial estimate

void InitConfig::Validate() const {
  if (ransac_iters <= 0) throw std::invalid_argument("ransac_iters must be > 0");
  if (!(inlier_tol_px > 0.0)) throw std::invalid_argument("inlier_tol_px must be > 0");
  if (min_keypoints < 4) throw std::invalid_argument("min_keypoints must be >= 4");
  if (fallback_grid < 2) throw std::invalid_argument("fallback_grid must be >= 2");
  if (!(min_overlap >= 0.0 && min_overlap <= 1.0)) throw std::invalid_argument("min_overlap must be in [0,1]");
  if (!(accept_overlap >= min_overlap && accept_overlap <= 1.0)) {
    throw std::invalid_argument("accept_overlap must be in [min_overlap,1]");
  }
}

namespace {

// Sign of the homogeneous depth on the side of the horizon the frame centre
// sees.
double VisibleSide(const Homography& h, Size2 frame) {
  const auto a = Adjugate(h.entries());
  const double cx = 0.5 * frame.width, cy = 0.5 * frame.height;
  const double t3 = a[6] * cx + a[7] * cy + a[8];
  if (std::abs(t3) <= kHorizonTol) return 1.0;
  const double u = (a[0] * cx + a[1] * cy + a[2]) / t3;
  const double v = (a[3] * cx + a[4] * cy + a[5]) / t3;
  const auto& m = h.entries();
  return m[6] * u + m[7] * v + m[8] < 0.0 ? -1.0 : 1.0;
}

// Projection that refuses points at or beyond the visible horizon.
std::optional<Point2> Project(const Homography& h, double side, const Point2& p) {
  const auto& m = h.entries();
  const double w = m[6] * p.x + m[7] * p.y + m[8];
  if (!(w * side > kHorizonTol)) return std::nullopt;
  return Point2{(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

// The member of {h, h∘Mx, h∘My, h∘Mx∘My} (template reflections about its
// centre lines) that a broadcast camera could have produced.
std::optional<Homography> Canonical(const Homography& h, Size2 frame, Size2 tmpl) {
  const double tw = tmpl.width, th = tmpl.height;
  const Homography mirrors[4] = {
      Homography::Identity(), Homography::FromMatrix({-1, 0, tw, 0, 1, 0, 0, 0, 1}),
      Homography::FromMatrix({1, 0, 0, 0, -1, th, 0, 0, 1}), Homography::FromMatrix({-1, 0, tw, 0, -1, th, 0, 0, 1})};
  for (const auto& m : mirrors) {
    try {
      const Homography c = Compose(h, m);
      if (HasBroadcastOrientation(c, frame)) return c;
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

struct Hypothesis {
  Homography h;
  int inliers = -1;
  double error = kInf;
};

void Score(Hypothesis& hyp, Size2 frame, const std::vector<FrameKeypoint>& frame_kps,
           const std::array<std::vector<Point2>, kNumKeypointTags>& tmpl_by_tag, double tol,
           std::vector<Correspondence>* matches = nullptr) {
  std::array<std::vector<std::optional<Point2>>, kNumKeypointTags> projected;
  const double side = VisibleSide(hyp.h, frame);
  for (int t = 0; t < kNumKeypointTags; ++t)
    for (const auto& p : tmpl_by_tag[t]) projected[t].push_back(Project(hyp.h, side, p));
  hyp.inliers = 0;
  hyp.error = 0.0;
  for (const auto& kp : frame_kps) {
    const int t = static_cast<int>(kp.tag);
    double best = tol;
    int best_i = -1;
    for (std::size_t i = 0; i < projected[t].size(); ++i) {
      if (!projected[t][i]) continue;
      const double d = Distance(*projected[t][i], kp.point);
      if (d < best) {
        best = d;
        best_i = static_cast<int>(i);
      }
    }
    if (best_i < 0) {
      hyp.error += tol;
      continue;
    }
    ++hyp.inliers;
    hyp.error += best;
    if (matches) matches->push_back({tmpl_by_tag[t][best_i], kp.point});
  }
}

bool Better(const Hypothesis& a, const Hypothesis& b) {
  return a.inliers > b.inliers || (a.inliers == b.inliers && a.error < b.error);
}

std::optional<Homography> KeypointEstimate(const SegMap& seg, const RinkSpec& spec, const InitConfig& cfg,
                                           Size2 tmpl_size) {
  const Size2 frame{seg.width(), seg.height()};
  const std::vector<FrameKeypoint> kps = ExtractFrameKeypoints(seg);
  if (static_cast<int>(kps.size()) < cfg.min_keypoints) return std::nullopt;
  std::array<std::vector<Point2>, kNumKeypointTags> tmpl_by_tag;
  for (const auto& k : TemplateKeypoints(spec, tmpl_size)) tmpl_by_tag[static_cast<int>(k.tag)].push_back(k.point);

  Rng rng(cfg.seed);
  Hypothesis best;
  std::vector<int> idx(kps.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int it = 0; it < cfg.ransac_iters; ++it) {
    for (int k = 0; k < 4; ++k) std::swap(idx[k], idx[k + rng.Below(idx.size() - k)]);
    std::array<Correspondence, 4> pairs;
    bool repeat = false;
    for (int k = 0; k < 4; ++k) {
      const auto& cands = tmpl_by_tag[static_cast<int>(kps[idx[k]].tag)];
      pairs[k] = {cands[rng.Below(cands.size())], kps[idx[k]].point};
      for (int j = 0; j < k; ++j) repeat |= pairs[j].src == pairs[k].src;
    }
    if (repeat) continue;
    Hypothesis hyp;
    try {
      const auto c = Canonical(DltSolve(pairs), frame, tmpl_size);
      if (!c) continue;
      hyp.h = *c;
    } catch (const DegenerateError&) {
      continue;
    }
    Score(hyp, frame, kps, tmpl_by_tag, cfg.inlier_tol_px);
    if (Better(hyp, best)) best = hyp;
  }
  if (best.inliers < 4) return std::nullopt;

  // Least-squares refit on the inlier matches.
  for (int round = 0; round < 2; ++round) {
    std::vector<Correspondence> matches;
    Hypothesis scored = best;
    Score(scored, frame, kps, tmpl_by_tag, cfg.inlier_tol_px, &matches);
    if (matches.size() < 4) break;
    try {
      const auto c = Canonical(DltSolve(matches), frame, tmpl_size);
      if (!c) break;
      Hypothesis refit{*c};
      Score(refit, frame, kps, tmpl_by_tag, cfg.inlier_tol_px);
      if (refit.inliers < best.inliers) break;
      best = refit;
    } catch (const DegenerateError&) {
      break;
    }
  }
  return best.h;
}

std::vector<double> Linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  return v;
}

std::optional<Homography> PoseHomography(const std::vector<double>& x, const CameraRig& rig) {
  try {
    return CameraHomography({x[0], x[1], std::exp(x[2])}, rig);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Homography GridEstimate(const SegMap& seg, const InitConfig& cfg, const MaskObjective& coarse, Size2 tmpl_size) {
  CameraRig rig = cfg.rig;
  rig.frame_size = {seg.width(), seg.height()};
  rig.template_size = tmpl_size;
  const PoseRanges& r = cfg.poses;
  const int n = cfg.fallback_grid;
  struct Scored {
    std::vector<double> x;
    double f;
  };
  std::vector<Scored> scored;
  for (double pan : Linspace(r.pan_min, r.pan_max, n))
    for (double tilt : Linspace(r.tilt_min, r.tilt_max, n))
      for (double lc : Linspace(std::log(r.coverage_min), std::log(r.coverage_max), n)) {
        std::vector<double> x{pan, tilt, lc};
        const auto h = PoseHomography(x, rig);
        if (h) scored.push_back({x, coarse.L1(*h)});
      }
  if (scored.empty()) throw InitFailed("camera pose grid produced no valid homography", 0.0);
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.f < b.f; });

  const std::vector<double> step{0.5 * (r.pan_max - r.pan_min) / (n - 1), 0.5 * (r.tilt_max - r.tilt_min) / (n - 1),
                                 0.5 * std::log(r.coverage_max / r.coverage_min) / (n - 1)};
  auto f = [&](const std::vector<double>& x) {
    const auto h = PoseHomography(x, rig);
    return h ? coarse.L1(*h) : kInf;
  };
  Scored best = scored.front();
  const std::size_t starts = std::min<std::size_t>(3, scored.size());
  for (std::size_t s = 0; s < starts; ++s) {
    const NmResult res = NelderMead(f, scored[s].x, step, 90, 1e-3);
    if (res.f < best.f) best = {res.x, res.f};
  }
  return *PoseHomography(best.x, rig);
}

}  // namespace

InitEstimate EstimateInitial(const SegMap& seg, const RinkSpec& spec, const InitConfig& cfg, Size2 template_size) {
  cfg.Validate();
  const SegMap tmpl = Rasterize(spec, template_size.width, template_size.height);
  const Size2 frame{seg.width(), seg.height()};
  const MaskObjective scorer(seg, tmpl, FactorFor(frame, 320));

  InitEstimate best;
  best.overlap = -1.0;
  if (const auto h = KeypointEstimate(seg, spec, cfg, template_size)) {
    best = {*h, scorer.SoftIou(*h), true};
  }
  if (best.overlap < cfg.accept_overlap) {
    const MaskObjective coarse(seg, tmpl, FactorFor(frame, 160));
    const Homography g = GridEstimate(seg, cfg, coarse, template_size);
    const double overlap = scorer.SoftIou(g);
    if (overlap > best.overlap) best = {g, overlap, false};
  }
  if (best.overlap < cfg.min_overlap) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "initial estimate overlap %.3f below floor %.3f", std::max(0.0, best.overlap),
                  cfg.min_overlap);
    throw InitFailed(msg, std::max(0.0, best.overlap));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Refinement

void RefineConfig::Validate() const {
  if (!(corner_step_px > 0.0)) throw std::invalid_argument("corner_step_px must be > 0");
  if (max_evals <= 0) throw std::invalid_argument("max_evals must be > 0");
  if (!(accept_tol > 0.0 && accept_tol < 1.0)) throw std::invalid_argument("accept_tol must be in (0,1)");
  if (work_long_side <= 0) throw std::invalid_argument("work_long_side must be > 0");
  if (blur_px < 1) throw std::invalid_argument("blur_px must be >= 1");
  if (!(corner_weight >= 0.0)) throw std::invalid_argument("corner_weight must be >= 0");
}

std::string_view RefineObjectiveName(RefineObjective o) {
  return o == RefineObjective::kL1Mask ? "l1_mask" : "smooth_l1_corners_plus_l1_mask";
}

RefineObjective ParseRefineObjective(std::string_view name) {
  if (name == "l1_mask") return RefineObjective::kL1Mask;
  if (name == "smooth_l1_corners_plus_l1_mask") return RefineObjective::kSmoothL1CornersPlusL1Mask;
  throw std::invalid_argument("unknown refine objective '" + std::string(name) + "'");
}

namespace {

RefineResult RefineWith(const MaskObjective& obj, Size2 frame, const Homography& h, const RefineConfig& cfg) {
  const Quad rect = RectCorners(0, 0, frame.width, frame.height);
  const bool prior = cfg.objective == RefineObjective::kSmoothL1CornersPlusL1Mask;
  auto warp = [&](const std::vector<double>& d) -> std::optional<Homography> {
    Quad moved = rect;
    for (int k = 0; k < 4; ++k) moved[k] += Point2{d[2 * k], d[2 * k + 1]};
    try {
      return Compose(FromFourPoints(rect, moved), h);
    } catch (const DegenerateError&) {
      return std::nullopt;
    }
  };
  auto f = [&](const std::vector<double>& d) {
    const auto hh = warp(d);
    if (!hh) return kInf;
    double v = obj.L1(*hh);
    if (prior) {
      double s = 0.0;
      for (double di : d) s += std::abs(di) < 1.0 ? 0.5 * di * di : std::abs(di) - 0.5;
      v += cfg.corner_weight * s / 8.0;
    }
    return v;
  };
  const std::vector<double> zero(8, 0.0);
  const double f0 = f(zero);
  const NmResult res = NelderMead(f, zero, std::vector<double>(8, cfg.corner_step_px), cfg.max_evals - 1, 0.05);
  RefineResult out{h, f0, {}, res.evals + 1};
  if (std::isfinite(res.f) && f0 - res.f >= cfg.accept_tol * f0) {
    if (const auto hh = warp(res.x)) {
      out.h = *hh;
      out.objective = res.f;
      for (int k = 0; k < 4; ++k) out.displacement[k] = {res.x[2 * k], res.x[2 * k + 1]};
    }
  }
  return out;
}

}  // namespace

RefineResult Refine(const SegMap& seg, const RinkSpec& spec, const Homography& h, const RefineConfig& cfg,
                    Size2 template_size) {
  cfg.Validate();
  const SegMap tmpl = Rasterize(spec, template_size.width, template_size.height);
  const Size2 frame{seg.width(), seg.height()};
  const MaskObjective obj(seg, tmpl, FactorFor(frame, cfg.work_long_side), cfg.blur_px);
  return RefineWith(obj, frame, h, cfg);
}

// ---------------------------------------------------------------------------
// Register

std::string_view RegStatusName(RegStatus s) {
  switch (s) {
    case RegStatus::kConverged:
      return "Converged";
    case RegStatus::kIterationCap:
      return "IterationCap";
    case RegStatus::kInitFailed:
      return "InitFailed";
  }
  return "?";
}

RegStatus ParseRegStatus(std::string_view name) {
  if (name == "Converged") return RegStatus::kConverged;
  if (name == "IterationCap") return RegStatus::kIterationCap;
  if (name == "InitFailed") return RegStatus::kInitFailed;
  throw std::invalid_argument("unknown registration status '" + std::string(name) + "'");
}

const Homography& RegistrationResult::AfterIterations(int k) const {
  if (k <= 0 || iterations.empty()) return h_init;
  return iterations[std::min<std::size_t>(k, iterations.size()) - 1].h;
}

RegistrationResult Register(const SegMap& seg, const RinkSpec& spec, const InitConfig& init_cfg,
                            const RefineConfig& ref_cfg, int n_iters, Size2 template_size) {
  if (n_iters < 0) throw std::invalid_argument("n_iters must be >= 0");
  init_cfg.Validate();
  ref_cfg.Validate();
  RegistrationResult result;
  InitEstimate init;
  try {
    init = EstimateInitial(seg, spec, init_cfg, template_size);
  } catch (const InitFailed&) {
    result.status = RegStatus::kInitFailed;
    return result;
  }
  result.h_init = result.h_final = init.h;

  const SegMap tmpl = Rasterize(spec, template_size.width, template_size.height);
  const Size2 frame{seg.width(), seg.height()};
  const MaskObjective obj(seg, tmpl, FactorFor(frame, ref_cfg.work_long_side), ref_cfg.blur_px);
  double current = obj.L1(init.h);
  result.init_objective = current;
  result.status = RegStatus::kIterationCap;
  for (int it = 0; it < n_iters; ++it) {
    RefineResult step;
    try {
      step = RefineWith(obj, frame, result.h_final, ref_cfg);
    } catch (const Error&) {
      break;
    }
    const double l1 = obj.L1(step.h);
    const bool improved = current - l1 >= ref_cfg.accept_tol * current;
    if (improved) {
      result.h_final = step.h;
      current = l1;
    }
    result.iterations.push_back({result.h_final, current});
    if (!improved) {
      result.status = RegStatus::kConverged;
      break;
    }
  }
  return result;
}

std::vector<Homography> SmoothSequence(const std::vector<RegistrationResult>& results, double alpha,
                                       const std::array<double, 8>& scales) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
  if (results.empty()) throw std::invalid_argument("smooth_sequence needs at least one result");
  std::vector<Homography> out;
  out.reserve(results.size());
  std::optional<EmaState> state;
  for (const auto& r : results) {
    if (r.status == RegStatus::kInitFailed) {
      out.push_back(state ? Denormalize({state->phi, scales}) : r.h_final);
      continue;
    }
    const auto theta = Normalize(r.h_final, scales).v;
    if (!state) {
      state = EmaState{theta, alpha, 1};
    } else {
      state = EmaUpdate(*state, theta);
    }
    out.push_back(Denormalize({state->phi, scales}));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

std::string RegistrationResultToJson(const RegistrationResult& r, const std::string& id) {
  using nlohmann::json;
  json j;
  if (!id.empty()) j["id"] = id;
  const bool failed = r.status == RegStatus::kInitFailed;
  j["h_init"] = failed ? json(nullptr) : json(r.h_init.entries());
  j["h_final"] = failed ? json(nullptr) : json(r.h_final.entries());
  j["iterations"] = json::array();
  for (const auto& it : r.iterations) j["iterations"].push_back({{"h", it.h.entries()}, {"objective", it.objective}});
  j["status"] = RegStatusName(r.status);
  return j.dump();
}

RegistrationResult RegistrationResultFromJson(std::string_view line, std::string* id) {
  using nlohmann::json;
  try {
    const json j = json::parse(line);
    RegistrationResult r;
    r.status = ParseRegStatus(j.at("status").get<std::string>());
    if (id) *id = j.value("id", std::string());
    if (r.status != RegStatus::kInitFailed) {
      r.h_init = Homography::FromMatrix(j.at("h_init").get<std::array<double, 9>>());
      r.h_final = Homography::FromMatrix(j.at("h_final").get<std::array<double, 9>>());
    }
    for (const auto& it : j.at("iterations")) {
      r.iterations.push_back({Homography::FromMatrix(it.at("h").get<std::array<double, 9>>()),
                              it.at("objective").get<double>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("registration result: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("registration result: ") + e.what());
  } catch (const DegenerateError& e) {
    throw ParseError(std::string("registration result: ") + e.what());
  }
}

}  // namespace rinkreg
