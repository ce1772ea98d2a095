#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hplateau {

using Vec3 = Eigen::Vector3d;

struct Segment {
  Vec3 a;
  Vec3 b;

  double length() const { return (b - a).norm(); }
  Vec3 direction() const { return (b - a).normalized(); }
};

double point_segment_distance(const Vec3& x, const Vec3& a, const Vec3& b);

// Closest distance between two closed segments.
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

double point_triangle_distance(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c);

// Euclidean distance from x to the convex hull of the given points. Exact:
// minimum over all points, segments, triangles and tetrahedra spanned by
// them, which cover the hull by Caratheodory's theorem.
double convex_hull_distance(const Vec3& x, std::span<const Vec3> points);

// Affine dimension (0..3) of a point cloud, relative tolerance on singular values.
int affine_dimension(std::span<const Vec3> points, double rel_tol = 1e-9);

double diameter(std::span<const Vec3> points);

// Symmetric Hausdorff distance between two unions of segments. Uses the exact
// point-to-segment distance from samples spaced at most `step` apart.
double hausdorff_distance(std::span<const Segment> a, std::span<const Segment> b, double step);

}  // namespace hplateau
