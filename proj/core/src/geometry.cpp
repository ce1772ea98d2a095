#include "hplateau/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace hplateau {

double point_segment_distance(const Vec3& x, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  // Ericson, Real-Time Collision Detection, 5.1.9.
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a == 0.0 && e == 0.0) return r.norm();
  if (a == 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e == 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-300 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  // Parallel segments: the clamped solution above may miss the closest pair.
  double best = ((p0 + s * d1) - (q0 + t * d2)).norm();
  best = std::min({best, point_segment_distance(p0, q0, q1), point_segment_distance(p1, q0, q1),
                   point_segment_distance(q0, p0, p1), point_segment_distance(q1, p0, p1)});
  return best;
}

double point_triangle_distance(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double n2 = n.squaredNorm();
  const double edge = std::min({point_segment_distance(x, a, b), point_segment_distance(x, b, c),
                                point_segment_distance(x, c, a)});
  if (n2 < 1e-300) return edge;
  const double dist_plane = (x - a).dot(n) / std::sqrt(n2);
  const Vec3 proj = x - dist_plane * n / std::sqrt(n2);
  // Barycentric inside test.
  const double w_a = (b - proj).cross(c - proj).dot(n);
  const double w_b = (c - proj).cross(a - proj).dot(n);
  const double w_c = (a - proj).cross(b - proj).dot(n);
  if (w_a >= 0.0 && w_b >= 0.0 && w_c >= 0.0) return std::abs(dist_plane);
  return edge;
}

namespace {

// Distance to a tetrahedron; returns +inf for degenerate ones, whose faces
// are covered by the triangle pass.
double point_tetra_distance(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c,
                            const Vec3& d) {
  Eigen::Matrix3d m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  m.col(2) = d - a;
  const double det = m.determinant();
  const double scale = (b - a).norm() * (c - a).norm() * (d - a).norm();
  if (std::abs(det) <= 1e-12 * scale) return std::numeric_limits<double>::infinity();
  const Vec3 w = m.partialPivLu().solve(x - a);
  if (w.minCoeff() >= 0.0 && w.sum() <= 1.0) return 0.0;
  return std::min({point_triangle_distance(x, a, b, c), point_triangle_distance(x, a, b, d),
                   point_triangle_distance(x, a, c, d), point_triangle_distance(x, b, c, d)});
}

}  // namespace

double convex_hull_distance(const Vec3& x, std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, (x - pts[i]).norm());
    for (std::size_t j = i + 1; j < n; ++j) {
      best = std::min(best, point_segment_distance(x, pts[i], pts[j]));
      for (std::size_t k = j + 1; k < n; ++k) {
        best = std::min(best, point_triangle_distance(x, pts[i], pts[j], pts[k]));
        for (std::size_t l = k + 1; l < n && best > 0.0; ++l)
          best = std::min(best, point_tetra_distance(x, pts[i], pts[j], pts[k], pts[l]));
      }
    }
  }
  return best;
}

int affine_dimension(std::span<const Vec3> pts, double rel_tol) {
  if (pts.size() <= 1) return 0;
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::MatrixXd centered(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) centered.row(i) = (pts[i] - mean).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0;
  int dim = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++dim;
  return dim;
}

double diameter(std::span<const Vec3> pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

namespace {

double directed_hausdorff(std::span<const Segment> from, std::span<const Segment> to, double step) {
  double worst = 0.0;
  for (const auto& s : from) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(s.length() / step)));
    for (int i = 0; i <= pieces; ++i) {
      const Vec3 x = s.a + (s.b - s.a) * (static_cast<double>(i) / pieces);
      double d = std::numeric_limits<double>::infinity();
      for (const auto& t : to) d = std::min(d, point_segment_distance(x, t.a, t.b));
      worst = std::max(worst, d);
    }
  }
  return worst;
}

}  // namespace

double hausdorff_distance(std::span<const Segment> a, std::span<const Segment> b, double step) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed_hausdorff(a, b, step), directed_hausdorff(b, a, step));
}

}  // namespace hplateau
