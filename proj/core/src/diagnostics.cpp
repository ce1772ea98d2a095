#include <algorithm>
#include <cmath>

#include "hplateau/errors.hpp"
#include "hplateau/pharmonic.hpp"

namespace hplateau {

namespace {

std::vector<double> cell_energies(const GridMap& u, double p) {
  const double h3 = u.h() * u.h() * u.h();
  std::vector<double> e(u.node_count(), 0.0);
  for (std::size_t c = 0; c < u.node_count(); ++c) {
    if (!u.cell_active(c)) continue;
    const double s = cell_gradient_sq(u, c);
    if (s > 0.0) e[c] = std::pow(s, 0.5 * p) / p * h3;
  }
  return e;
}

struct Offset {
  int di, dj, dk;
};

// Cell base offsets whose centers lie within r of a point at fractional
// position `shift` (in units of h) relative to the base node.
std::vector<Offset> ball_offsets(double r_cells, double shift) {
  std::vector<Offset> out;
  const int m = static_cast<int>(std::ceil(r_cells)) + 1;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k) {
        const double x = i + 0.5 - shift, y = j + 0.5 - shift, z = k + 0.5 - shift;
        if (x * x + y * y + z * z <= r_cells * r_cells * (1.0 + 1e-12)) out.push_back({i, j, k});
      }
  return out;
}

double ball_sum(const GridMap& u, const std::vector<double>& field, const std::array<int, 3>& at,
                const std::vector<Offset>& offsets) {
  const auto& dims = u.dims();
  double s = 0.0;
  for (const auto& o : offsets) {
    const int i = at[0] + o.di, j = at[1] + o.dj, k = at[2] + o.dk;
    if (i < 0 || j < 0 || k < 0 || i >= dims[0] || j >= dims[1] || k >= dims[2]) continue;
    s += field[u.index(i, j, k)];
  }
  return s;
}

}  // namespace

DivergenceReport stress_divergence_residual(const GridMap& u, double p, double margin) {
  DivergenceReport report;
  report.per_node.assign(u.node_count(), 0.0);
  std::vector<Eigen::Matrix3d> T(u.node_count(), Eigen::Matrix3d::Zero());
  std::vector<std::uint8_t> has(u.node_count(), 0);
  for (std::size_t c = 0; c < u.node_count(); ++c) {
    if (!u.cell_active(c)) continue;
    T[c] = stress_tensor(u, c, p).T;
    has[c] = 1;
  }
  const double h = u.h();
  for (std::size_t n = 0; n < u.node_count(); ++n) {
    if (u.kind(n) != NodeKind::inside) continue;
    if (u.domain().boundary_distance(u.position(n)) < margin) continue;
    bool ok = has[n];
    for (int d = 0; d < 3 && ok; ++d) ok = has[n - u.stride(d)];
    if (!ok) continue;
    // Hat field e_a at node n: +T(n - e_j) columns, -T(n) columns.
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    for (int j = 0; j < 3; ++j) r += (T[n - u.stride(j)].col(j) - T[n].col(j)) / h;
    const double res = r.cwiseAbs().maxCoeff();
    report.per_node[n] = res;
    report.max_residual = std::max(report.max_residual, res);
    ++report.tested_nodes;
  }
  return report;
}

std::vector<double> monotonicity_profile(const GridMap& u, double p, const Vec3& x0,
                                         std::span<const double> radii) {
  for (double r : radii)
    if (!(r > 0.0) || !u.domain().contains_ball(x0, r))
      throw Error(Errc::ball_outside_domain, "ball of radius " + std::to_string(r) + " leaves the domain");
  const auto e = cell_energies(u, p);
  std::vector<double> out;
  for (double r : radii) {
    double s = 0.0;
    for (std::size_t c = 0; c < u.node_count(); ++c)
      if (e[c] > 0.0 && (u.cell_center(c) - x0).norm() <= r) s += e[c];
    out.push_back(std::pow(r, p - 3.0) * s);
  }
  return out;
}

EtaMap eta_regularity_map(const GridMap& u, double p, double eta, double r) {
  if (!(p < 2.0)) throw Error(Errc::invalid_argument, "eta map needs p < 2");
  const auto e = cell_energies(u, p);
  // Nodes sit at shift 0 relative to their own base cell.
  const auto offsets = ball_offsets(r / u.h(), 0.0);
  const double bound = eta * std::pow(r, 3.0 - p) / (2.0 - p);
  EtaMap map;
  map.suspect.assign(u.node_count(), 0);
  for (std::size_t n = 0; n < u.node_count(); ++n) {
    if (u.kind(n) == NodeKind::outside) continue;
    const double s = ball_sum(u, e, u.coords(n), offsets);
    if (s > bound) {
      map.suspect[n] = 1;
      ++map.suspect_count;
    } else {
      ++map.regular_count;
    }
  }
  return map;
}

int interior_suspect_count(const GridMap& u, const EtaMap& map, double collar) {
  int count = 0;
  for (std::size_t n = 0; n < u.node_count(); ++n)
    if (map.suspect[n] && u.domain().boundary_distance(u.position(n)) >= collar) ++count;
  return count;
}

// Shared with extraction: ball sums of an arbitrary per-cell field around
// every cell center.
std::vector<double> ball_averaged(const GridMap& grid, const std::vector<double>& field, double rho) {
  const auto offsets = ball_offsets(rho / grid.h(), 0.5);
  std::vector<double> out(grid.node_count(), 0.0);
  for (std::size_t c = 0; c < grid.node_count(); ++c) out[c] = ball_sum(grid, field, grid.coords(c), offsets);
  return out;
}

}  // namespace hplateau
