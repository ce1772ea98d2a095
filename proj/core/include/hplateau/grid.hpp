#pragma once

// Uniform Cartesian grids carrying manifold-valued node values over a ball or
// cube domain.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "hplateau/geometry.hpp"
#include "hplateau/manifold.hpp"

namespace hplateau {

struct Domain {
  enum class Kind { ball, cube };

  Kind kind = Kind::ball;
  Vec3 center = Vec3::Zero();
  double radius = 1.0;  // ball radius or cube half-width

  static Domain ball(const Vec3& c, double r) { return {Kind::ball, c, r}; }
  static Domain cube(const Vec3& c, double half) { return {Kind::cube, c, half}; }

  // Strict interior with a relative tolerance, so that nodes lying on the
  // boundary count as outside.
  bool contains(const Vec3& x) const;
  double boundary_distance(const Vec3& x) const;  // >= 0 inside
  // Point of the boundary used to read trace data for a node near it.
  Vec3 boundary_point(const Vec3& x) const;
  bool contains_ball(const Vec3& x, double r) const;
  double volume() const;
};

enum class NodeKind : std::uint8_t { outside, inside, boundary };

class GridMap {
 public:
  // n nodes per axis over [-L, L]^3 + center with L = R + h and h = 2R/(n-3),
  // so that one layer of nodes lies beyond the boundary.
  static GridMap create(const Domain& domain, int n, int nu);

  const Domain& domain() const { return domain_; }
  const std::array<int, 3>& dims() const { return dims_; }
  int nu() const { return nu_; }
  double h() const { return h_; }
  const Vec3& origin() const { return origin_; }
  std::size_t node_count() const { return kinds_.size(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims_[1] + j) * dims_[2] + k;
  }
  std::array<int, 3> coords(std::size_t idx) const;
  Vec3 position(std::size_t idx) const;
  Vec3 position(int i, int j, int k) const {
    return origin_ + h_ * Vec3(i, j, k);
  }
  NodeKind kind(std::size_t idx) const { return kinds_[idx]; }
  const std::vector<NodeKind>& kinds() const { return kinds_; }
  // Stride between neighbours along axis d.
  std::size_t stride(int d) const;

  double* value(std::size_t idx) { return values_.data() + idx * nu_; }
  const double* value(std::size_t idx) const { return values_.data() + idx * nu_; }
  Ambient value_vector(std::size_t idx) const;
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // A cell is indexed by its base node; it is active when the base node and
  // its three forward neighbours all belong to the discrete domain.
  bool cell_active(std::size_t base) const;
  Vec3 cell_center(std::size_t base) const { return position(base) + Vec3::Constant(0.5 * h_); }

  // Fills every boundary node with datum(boundary_point(x)) and every other
  // node with datum evaluated at its own position clamped into the domain.
  void fill(const std::function<Ambient(const Vec3&)>& datum);
  void fill_boundary(const std::function<Ambient(const Vec3&)>& datum);

  std::size_t count(NodeKind k) const;

  // Trilinear interpolation of ambient values; corners outside the discrete
  // domain are skipped and the weights renormalized.
  Ambient interpolate(const Vec3& x) const;

 private:
  Domain domain_;
  std::array<int, 3> dims_{};
  int nu_ = 0;
  double h_ = 0.0;
  Vec3 origin_ = Vec3::Zero();
  std::vector<NodeKind> kinds_;
  std::vector<double> values_;
};

}  // namespace hplateau
