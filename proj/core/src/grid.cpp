#include "hplateau/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hplateau/errors.hpp"

namespace hplateau {

namespace {
constexpr double kRelTol = 1e-9;
}

bool Domain::contains(const Vec3& x) const { return boundary_distance(x) > kRelTol * radius; }

double Domain::boundary_distance(const Vec3& x) const {
  const Vec3 d = x - center;
  if (kind == Kind::ball) return radius - d.norm();
  return radius - d.cwiseAbs().maxCoeff();
}

Vec3 Domain::boundary_point(const Vec3& x) const {
  const Vec3 d = x - center;
  if (kind == Kind::ball) {
    const double n = d.norm();
    if (n == 0.0) return center + Vec3(0, 0, radius);
    return center + d * (radius / n);
  }
  // Nearest point of the cube surface.
  Vec3 c = d.cwiseMax(-Vec3::Constant(radius)).cwiseMin(Vec3::Constant(radius));
  if (d.cwiseAbs().maxCoeff() < radius) {
    int axis = 0;
    d.cwiseAbs().maxCoeff(&axis);
    c[axis] = d[axis] >= 0.0 ? radius : -radius;
  }
  return center + c;
}

bool Domain::contains_ball(const Vec3& x, double r) const {
  return boundary_distance(x) >= r * (1.0 - kRelTol);
}

double Domain::volume() const {
  if (kind == Kind::ball) return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
  return 8.0 * radius * radius * radius;
}

GridMap GridMap::create(const Domain& domain, int n, int nu) {
  if (n < 8) throw Error(Errc::invalid_argument, "grid needs at least 8 nodes per axis");
  if (nu < 1) throw Error(Errc::invalid_argument, "ambient dimension must be positive");
  if (!(domain.radius > 0.0)) throw Error(Errc::invalid_argument, "domain radius must be positive");
  GridMap g;
  g.domain_ = domain;
  g.dims_ = {n, n, n};
  g.nu_ = nu;
  g.h_ = 2.0 * domain.radius / (n - 3);
  g.origin_ = domain.center - Vec3::Constant(domain.radius + g.h_);
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  g.kinds_.assign(total, NodeKind::outside);
  g.values_.assign(total * nu, 0.0);
  for (std::size_t idx = 0; idx < total; ++idx)
    if (domain.contains(g.position(idx))) g.kinds_[idx] = NodeKind::inside;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::size_t idx = g.index(i, j, k);
        if (g.kinds_[idx] != NodeKind::outside) continue;
        // Nodes on the closed boundary, including cube edges and corners.
        if (domain.boundary_distance(g.position(idx)) >= -kRelTol * domain.radius) {
          g.kinds_[idx] = NodeKind::boundary;
          continue;
        }
        const int nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                              {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
        for (const auto& q : nb) {
          if (q[0] < 0 || q[1] < 0 || q[2] < 0 || q[0] >= n || q[1] >= n || q[2] >= n) continue;
          if (g.kinds_[g.index(q[0], q[1], q[2])] == NodeKind::inside) {
            g.kinds_[idx] = NodeKind::boundary;
            break;
          }
        }
      }
  return g;
}

std::array<int, 3> GridMap::coords(std::size_t idx) const {
  const int k = static_cast<int>(idx % dims_[2]);
  const std::size_t r = idx / dims_[2];
  const int j = static_cast<int>(r % dims_[1]);
  const int i = static_cast<int>(r / dims_[1]);
  return {i, j, k};
}

Vec3 GridMap::position(std::size_t idx) const {
  const auto c = coords(idx);
  return position(c[0], c[1], c[2]);
}

std::size_t GridMap::stride(int d) const {
  if (d == 0) return static_cast<std::size_t>(dims_[1]) * dims_[2];
  if (d == 1) return static_cast<std::size_t>(dims_[2]);
  return 1;
}

Ambient GridMap::value_vector(std::size_t idx) const {
  return Eigen::Map<const Ambient>(value(idx), nu_);
}

bool GridMap::cell_active(std::size_t base) const {
  const auto c = coords(base);
  for (int d = 0; d < 3; ++d)
    if (c[d] + 1 >= dims_[d]) return false;
  if (kinds_[base] == NodeKind::outside) return false;
  for (int d = 0; d < 3; ++d)
    if (kinds_[base + stride(d)] == NodeKind::outside) return false;
  return true;
}

void GridMap::fill(const std::function<Ambient(const Vec3&)>& datum) {
  for (std::size_t idx = 0; idx < node_count(); ++idx) {
    const Vec3 x = position(idx);
    const Vec3 y = kinds_[idx] == NodeKind::inside ? x : domain_.boundary_point(x);
    const Ambient v = datum(y);
    std::copy(v.data(), v.data() + nu_, value(idx));
  }
}

void GridMap::fill_boundary(const std::function<Ambient(const Vec3&)>& datum) {
  for (std::size_t idx = 0; idx < node_count(); ++idx) {
    if (kinds_[idx] != NodeKind::boundary) continue;
    const Ambient v = datum(domain_.boundary_point(position(idx)));
    std::copy(v.data(), v.data() + nu_, value(idx));
  }
}

std::size_t GridMap::count(NodeKind k) const {
  return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), k));
}

Ambient GridMap::interpolate(const Vec3& x) const {
  const Vec3 t = (x - origin_) / h_;
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int d = 0; d < 3; ++d) {
    base[d] = std::clamp(static_cast<int>(std::floor(t[d])), 0, dims_[d] - 2);
    frac[d] = std::clamp(t[d] - base[d], 0.0, 1.0);
  }
  Ambient acc = Ambient::Zero(nu_);
  double wsum = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int di = (c >> 2) & 1, dj = (c >> 1) & 1, dk = c & 1;
    const std::size_t idx = index(base[0] + di, base[1] + dj, base[2] + dk);
    if (kinds_[idx] == NodeKind::outside) continue;
    const double w = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) *
                     (dk ? frac[2] : 1.0 - frac[2]);
    acc += w * Eigen::Map<const Ambient>(value(idx), nu_);
    wsum += w;
  }
  if (wsum <= 0.0) throw Error(Errc::invalid_argument, "interpolation point outside the grid domain");
  return acc / wsum;
}

}  // namespace hplateau
