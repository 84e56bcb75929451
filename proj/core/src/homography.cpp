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

#include "rinkreg/homography.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "rinkreg/errors.hpp"

namespace rinkreg {
namespace {

using Mat3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;

Mat3 ToEigen(const std::array<double, 9>& m) { return Eigen::Map<const Mat3>(m.data()); }

std::array<double, 9> FromEigen(const Mat3& m) {
  std::array<double, 9> out;
  Eigen::Map<Mat3>(out.data()) = m;
  return out;
}

// Similarity that moves the centroid to the origin and the mean distance
// to sqrt(2).
Mat3 IsotropicNormalizer(std::span<const Point2> pts) {
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= static_cast<double>(pts.size());
  if (!(mean_dist > 0.0)) throw DegenerateError("DLT: all points coincide");
  const double s = std::sqrt(2.0) / mean_dist;
  Mat3 t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

bool AnyThreeCollinear(std::span<const Point2> pts) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const Point2 a = pts[j] - pts[i];
        const Point2 b = pts[k] - pts[i];
        const double scale = std::max({Norm(a) * Norm(b), Norm(b - a) * Norm(a), 1e-300});
        if (std::abs(Cross(a, b)) <= 1e-10 * scale) return true;
      }
  return false;
}

}  // namespace

Homography Homography::FromMatrix(const std::array<double, 9>& m) {
  double max_abs = 0.0;
  for (double v : m) {
    if (!std::isfinite(v)) throw DegenerateError("homography has non-finite entries");
    max_abs = std::max(max_abs, std::abs(v));
  }
  if (!(std::abs(m[8]) > 1e-12 * max_abs)) {
    throw DegenerateError("homography cannot be scale-fixed: m[2][2] is ~0");
  }
  std::array<double, 9> fixed;
  for (int i = 0; i < 9; ++i) fixed[i] = m[i] / m[8];
  fixed[8] = 1.0;
  for (double v : fixed) {
    if (!std::isfinite(v)) throw DegenerateError("homography has non-finite entries");
  }
  Homography h(fixed);
  if (std::abs(h.Determinant()) <= kAlgebraicTol) {
    throw DegenerateError("homography is singular (det=" + std::to_string(h.Determinant()) + ")");
  }
  return h;
}

Homography Homography::Identity() { return Homography({1, 0, 0, 0, 1, 0, 0, 0, 1}); }

Homography Homography::Scaling(double sx, double sy) {
  return FromMatrix({sx, 0, 0, 0, sy, 0, 0, 0, 1});
}

Homography Homography::Translation(double tx, double ty) {
  return FromMatrix({1, 0, tx, 0, 1, ty, 0, 0, 1});
}

double Homography::Determinant() const { return ToEigen(m_).determinant(); }

double MaxAbsDifference(const Homography& a, const Homography& b) {
  double d = 0.0;
  for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(a.entries()[i] - b.entries()[i]));
  return d;
}

double ProjectiveDepth(const Homography& h, const Point2& p) {
  return h(2, 0) * p.x + h(2, 1) * p.y + h(2, 2);
}

Point2 Apply(const Homography& h, const Point2& p) {
  const double w = ProjectiveDepth(h, p);
  if (!(std::abs(w) > kHorizonTol)) throw HorizonError("point maps to infinity");
  return {(h(0, 0) * p.x + h(0, 1) * p.y + h(0, 2)) / w,
          (h(1, 0) * p.x + h(1, 1) * p.y + h(1, 2)) / w};
}

Homography Compose(const Homography& a, const Homography& b) {
  return Homography::FromMatrix(FromEigen(ToEigen(a.entries()) * ToEigen(b.entries())));
}

Homography Invert(const Homography& h) {
  const Mat3 m = ToEigen(h.entries());
  if (std::abs(m.determinant()) <= kAlgebraicTol) throw DegenerateError("cannot invert singular homography");
  return Homography::FromMatrix(FromEigen(m.inverse()));
}

void ValidateCorrespondences(std::span<const Correspondence> pairs) {
  if (pairs.size() < 4) {
    throw DegenerateError("need at least 4 correspondences, got " + std::to_string(pairs.size()));
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!std::isfinite(pairs[i].src.x) || !std::isfinite(pairs[i].src.y) ||
        !std::isfinite(pairs[i].dst.x) || !std::isfinite(pairs[i].dst.y)) {
      throw DegenerateError("correspondence has non-finite coordinates");
    }
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      if (Distance(pairs[i].src, pairs[j].src) <= 1e-6) {
        throw DegenerateError("coincident source points in correspondence set");
      }
    }
  }
}

Homography DltSolve(std::span<const Correspondence> pairs) {
  ValidateCorrespondences(pairs);
  const std::size_t n = pairs.size();
  std::vector<Point2> src(n);
  std::vector<Point2> dst(n);
  for (std::size_t i = 0; i < n; ++i) {
    src[i] = pairs[i].src;
    dst[i] = pairs[i].dst;
  }
  if (n == 4 && (AnyThreeCollinear(src) || AnyThreeCollinear(dst))) {
    throw DegenerateError("DLT: three of the four points are collinear");
  }

  const Mat3 ts = IsotropicNormalizer(src);
  const Mat3 td = IsotropicNormalizer(dst);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d s = ts * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
    const Eigen::Vector3d d = td * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
    const double x = s.x(), y = s.y(), u = d.x(), v = d.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // The null space must be one-dimensional: sigma_8 (second smallest of 9)
  // bounded away from zero.
  const double sigma8 = sv.size() >= 8 ? sv(7) : 0.0;
  if (!(sigma8 > 1e-10 * sv(0))) throw DegenerateError("DLT system is rank-deficient");

  const Eigen::VectorXd h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Mat3 full = td.inverse() * hn * ts;
  return Homography::FromMatrix(FromEigen(full));
}

Quad FourPointForm(const Homography& h, const Quad& rect) {
  Quad out;
  for (int i = 0; i < 4; ++i) out[i] = Apply(h, rect[i]);
  return out;
}

Homography FromFourPoints(const Quad& rect, const Quad& displaced) {
  std::array<Correspondence, 4> pairs;
  for (int i = 0; i < 4; ++i) pairs[i] = {rect[i], displaced[i]};
  return DltSolve(pairs);
}

Quad RectCorners(double x0, double y0, double x1, double y1) {
  return {Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}};
}

NormalizedH Normalize(const Homography& h, const std::array<double, 8>& scales) {
  NormalizedH n;
  n.scales = scales;
  for (int i = 0; i < 8; ++i) {
    if (!(scales[i] > 0.0)) throw DegenerateError("normalization scales must be positive");
    n.v[i] = h.entries()[i] / scales[i];
  }
  return n;
}

Homography Denormalize(const NormalizedH& n) {
  std::array<double, 9> m;
  for (int i = 0; i < 8; ++i) m[i] = n.v[i] * n.scales[i];
  m[8] = 1.0;
  return Homography::FromMatrix(m);
}

SegMap WarpRaster(const SegMap& src, const Homography& h, int out_w, int out_h, Sampling sampling) {
  const Mat3 m = ToEigen(h.entries());
  if (std::abs(m.determinant()) <= kAlgebraicTol) throw DegenerateError("cannot warp by singular homography");
  // Adjugate rather than a scale-fixed inverse: it stays valid when the
  // output origin sits on the horizon.
  const Mat3 inv = m.inverse() * m.determinant();

  SegMap out(out_w, out_h);
  const double cx = 0.5 * out_w;
  const double cy = 0.5 * out_h;
  const double ref_w = inv(2, 0) * cx + inv(2, 1) * cy + inv(2, 2);
  const double front = ref_w >= 0.0 ? 1.0 : -1.0;
  const double w_floor = kHorizonTol * (std::abs(inv(2, 0)) + std::abs(inv(2, 1)) + std::abs(inv(2, 2)));
  const int sw = src.width();
  const int sh = src.height();
  std::uint8_t* dst = out.mutable_data().data();

  for (int y = 0; y < out_h; ++y) {
    const double fy = y + 0.5;
    double qx = inv(0, 1) * fy + inv(0, 2) + inv(0, 0) * 0.5;
    double qy = inv(1, 1) * fy + inv(1, 2) + inv(1, 0) * 0.5;
    double qw = inv(2, 1) * fy + inv(2, 2) + inv(2, 0) * 0.5;
    for (int x = 0; x < out_w; ++x, qx += inv(0, 0), qy += inv(1, 0), qw += inv(2, 0)) {
      std::uint8_t cls = 0;
      if (front * qw > w_floor) {
        const double u = qx / qw;
        const double v = qy / qw;
        if (sampling == Sampling::kNearest) {
          if (u >= 0.0 && v >= 0.0 && u < sw && v < sh) {
            cls = src.at(static_cast<int>(u), static_cast<int>(v));
          }
        } else if (u > -1.0 && v > -1.0 && u < sw + 1.0 && v < sh + 1.0) {
          const double su = u - 0.5;
          const double sv = v - 0.5;
          const int i0 = static_cast<int>(std::floor(su));
          const int j0 = static_cast<int>(std::floor(sv));
          const double fx = su - i0;
          const double fyy = sv - j0;
          std::array<double, kNumClasses> acc{};
          const double wts[4] = {(1 - fx) * (1 - fyy), fx * (1 - fyy), (1 - fx) * fyy, fx * fyy};
          const int ii[4] = {i0, i0 + 1, i0, i0 + 1};
          const int jj[4] = {j0, j0, j0 + 1, j0 + 1};
          for (int k = 0; k < 4; ++k) {
            const std::uint8_t c = src.contains(ii[k], jj[k]) ? src.at(ii[k], jj[k]) : 0;
            acc[c] += wts[k];
          }
          cls = static_cast<std::uint8_t>(std::max_element(acc.begin(), acc.end()) - acc.begin());
        }
      }
      dst[static_cast<std::size_t>(y) * out_w + x] = cls;
    }
  }
  return out;
}

EmaState EmaUpdate(const EmaState& state, const std::array<double, 8>& theta) {
  EmaState next = state;
  for (int i = 0; i < 8; ++i) next.phi[i] = state.alpha * state.phi[i] + (1.0 - state.alpha) * theta[i];
  ++next.t;
  return next;
}

}  // namespace rinkreg
