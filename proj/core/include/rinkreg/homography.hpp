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

#ifndef RINKREG_HOMOGRAPHY_HPP_
#define RINKREG_HOMOGRAPHY_HPP_

#include <array>
#include <span>
#include <vector>

#include "rinkreg/geometry.hpp"
#include "rinkreg/seg_map.hpp"

namespace rinkreg {

// Tolerances shared by the projective kernel and its tests.
inline constexpr double kGeometricTol = 1e-6;   // pixels
inline constexpr double kAlgebraicTol = 1e-9;   // matrix entries, determinants
inline constexpr double kRoundTripTol = 1e-12;  // normalize/denormalize
inline constexpr double kHorizonTol = 1e-12;    // |w| below which a point is at infinity

// Invertible 3x3 projective map, row-major, scale-fixed so m[2][2] == 1.
class Homography {
 public:
  Homography() : Homography(Identity()) {}

  // Scale-fixes `m` by its bottom-right entry and validates it. Throws
  // DegenerateError when that entry is ~0, any entry is non-finite, or the
  // scale-fixed determinant is within kAlgebraicTol of zero.
  static Homography FromMatrix(const std::array<double, 9>& m);
  static Homography Identity();
  static Homography Scaling(double sx, double sy);
  static Homography Translation(double tx, double ty);

  double operator()(int row, int col) const { return m_[row * 3 + col]; }
  const std::array<double, 9>& entries() const { return m_; }
  double Determinant() const;

  friend bool operator==(const Homography&, const Homography&) = default;

 private:
  explicit Homography(const std::array<double, 9>& m) : m_(m) {}
  std::array<double, 9> m_;
};

double MaxAbsDifference(const Homography& a, const Homography& b);

// Maps p through h. Throws HorizonError when |w| <= kHorizonTol.
Point2 Apply(const Homography& h, const Point2& p);

// Homogeneous third coordinate of h * (p, 1).
double ProjectiveDepth(const Homography& h, const Point2& p);

// (a ∘ b): apply b first, then a.
Homography Compose(const Homography& a, const Homography& b);
Homography Invert(const Homography& h);

struct Correspondence {
  Point2 src;
  Point2 dst;
};

// Throws DegenerateError unless there are >= 4 pairs with pairwise distinct
// sources (1e-6 px).
void ValidateCorrespondences(std::span<const Correspondence> pairs);

// Direct linear transform with isotropic (Hartley) normalization of both
// point sets and an SVD null-space solve. Exact for 4 pairs, least squares
// in the algebraic error for more.
Homography DltSolve(std::span<const Correspondence> pairs);

using Quad = std::array<Point2, 4>;

// Images of the four reference corners under h.
Quad FourPointForm(const Homography& h, const Quad& rect);

// Homography taking each rect corner to the matching displaced corner.
Homography FromFourPoints(const Quad& rect, const Quad& displaced);

// Axis-aligned rectangle corners in clockwise order from the top-left.
Quad RectCorners(double x0, double y0, double x1, double y1);

// Normalized 8-parameter form: v_i = m_i / s_i over the entries other than
// m[2][2].
struct NormalizedH {
  std::array<double, 8> v{};
  std::array<double, 8> scales{};
};

// Per-entry standard deviations of 10,000 ground-truth homographies drawn
// with the default synthetic camera pool and augmentation settings
// (tools/rinkreg calibrate-scales regenerates them).
const std::array<double, 8>& DefaultNormalizationScales();

NormalizedH Normalize(const Homography& h, const std::array<double, 8>& scales);
Homography Denormalize(const NormalizedH& n);

enum class Sampling { kNearest, kBilinearOneHot };

// Inverse-maps every output pixel centre through h^-1 and samples src.
// Samples outside src, or on the far side of the horizon relative to the
// output centre, become Background. Throws DegenerateError if h is singular.
SegMap WarpRaster(const SegMap& src, const Homography& h, int out_w, int out_h,
                  Sampling sampling = Sampling::kNearest);

// Exponential moving average of an 8-vector:
//   phi <- alpha * phi + (1 - alpha) * theta
struct EmaState {
  std::array<double, 8> phi{};
  double alpha = 0.9;
  long t = 0;
};

EmaState EmaUpdate(const EmaState& state, const std::array<double, 8>& theta);

}  // namespace rinkreg

#endif  // RINKREG_HOMOGRAPHY_HPP_
