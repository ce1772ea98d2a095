#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "hplateau/errors.hpp"
#include "hplateau/pharmonic.hpp"

namespace hplateau {

std::vector<double> ball_averaged(const GridMap& grid, const std::vector<double>& field, double rho);

namespace {

struct Fit {
  Vec3 a;
  Vec3 b;
  double rms = 0.0;
};

Fit principal_fit(const std::vector<Vec3>& pts) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Vec3 axis = es.eigenvectors().col(2);
  double lo = 0.0, hi = 0.0, ss = 0.0;
  bool first = true;
  for (const auto& p : pts) {
    const double t = (p - mean).dot(axis);
    if (first || t < lo) lo = t;
    if (first || t > hi) hi = t;
    first = false;
    ss += ((p - mean) - t * axis).squaredNorm();
  }
  return {mean + lo * axis, mean + hi * axis, std::sqrt(ss / static_cast<double>(pts.size()))};
}

// Fits one segment, splitting at the median along the axis while the pooled
// residual of the halves is clearly smaller than that of the whole.
void fit_segments(const std::vector<Vec3>& pts, double h, const ExtractOptions& opts, int depth,
                  std::vector<Fit>& out) {
  const Fit whole = principal_fit(pts);
  const bool can_split = depth < opts.max_depth &&
                         static_cast<int>(pts.size()) >= 2 * opts.min_cluster_cells &&
                         whole.rms > opts.split_rms_cells * h;
  if (can_split) {
    const Vec3 axis = (whole.b - whole.a).normalized();
    std::vector<std::pair<double, std::size_t>> t;
    for (std::size_t i = 0; i < pts.size(); ++i) t.emplace_back((pts[i] - whole.a).dot(axis), i);
    std::sort(t.begin(), t.end());
    std::vector<Vec3> left, right;
    for (std::size_t i = 0; i < t.size(); ++i) (i < t.size() / 2 ? left : right).push_back(pts[t[i].second]);
    const Fit fl = principal_fit(left);
    const Fit fr = principal_fit(right);
    const double pooled = std::sqrt((fl.rms * fl.rms * left.size() + fr.rms * fr.rms * right.size()) /
                                    static_cast<double>(pts.size()));
    if (pooled < 0.7 * whole.rms) {
      fit_segments(left, h, opts, depth + 1, out);
      fit_segments(right, h, opts, depth + 1, out);
      return;
    }
  }
  out.push_back(whole);
}

}  // namespace

Extraction extract_singular_set(const EnergyMeasure& m, const GridMap& grid, const ExtractOptions& opts) {
  if (m.density.size() != grid.node_count())
    throw Error(Errc::invalid_argument, "measure and grid sizes differ");
  Extraction ex;
  ex.chain.provenance = "extracted-from-simulation";
  const double h = grid.h();
  const double rho = opts.ball_cells * h;
  const auto avg = ball_averaged(grid, m.density, rho);

  std::vector<std::uint8_t> marked(grid.node_count(), 0);
  for (std::size_t c = 0; c < grid.node_count(); ++c)
    if (m.active[c] && avg[c] / (2.0 * rho) >= opts.threshold) marked[c] = 1;

  // 26-connected clusters.
  std::vector<int> label(grid.node_count(), -1);
  std::vector<std::vector<std::size_t>> clusters;
  const auto& dims = grid.dims();
  for (std::size_t c = 0; c < grid.node_count(); ++c) {
    if (!marked[c] || label[c] >= 0) continue;
    const int id = static_cast<int>(clusters.size());
    clusters.emplace_back();
    std::deque<std::size_t> queue{c};
    label[c] = id;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      clusters.back().push_back(x);
      const auto q = grid.coords(x);
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          for (int dk = -1; dk <= 1; ++dk) {
            const int i = q[0] + di, j = q[1] + dj, k = q[2] + dk;
            if (i < 0 || j < 0 || k < 0 || i >= dims[0] || j >= dims[1] || k >= dims[2]) continue;
            const std::size_t y = grid.index(i, j, k);
            if (!marked[y] || label[y] >= 0) continue;
            label[y] = id;
            queue.push_back(y);
          }
    }
  }

  std::vector<Fit> fits;
  for (const auto& cl : clusters) {
    if (static_cast<int>(cl.size()) < opts.min_cluster_cells) continue;
    std::vector<Vec3> pts;
    for (std::size_t c : cl) pts.push_back(m.centers[c]);
    const std::size_t before = fits.size();
    fit_segments(pts, h, opts, 0, fits);
    for (std::size_t f = before; f < fits.size(); ++f) ex.cluster_cells.push_back(static_cast<int>(cl.size()));
  }
  // Drop fits that collapsed to a point.
  std::vector<Fit> kept;
  std::vector<int> kept_cells;
  for (std::size_t f = 0; f < fits.size(); ++f)
    if ((fits[f].b - fits[f].a).norm() > h) {
      kept.push_back(fits[f]);
      kept_cells.push_back(ex.cluster_cells[f]);
    }
  ex.cluster_cells = kept_cells;
  if (kept.empty()) {
    ex.cluster_cells.clear();
    return ex;
  }
  ex.no_concentration = false;

  // Endpoints: merge nearby ones, then snap to the boundary.
  std::vector<Vec3> ends;
  for (const auto& f : kept) {
    ends.push_back(f.a);
    ends.push_back(f.b);
  }
  std::vector<int> parent(ends.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < ends.size(); ++i)
    for (std::size_t j = i + 1; j < ends.size(); ++j)
      if (i / 2 != j / 2 && (ends[i] - ends[j]).norm() <= opts.merge_cells * h)
        parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
  std::vector<int> vertex_of(ends.size(), -1);
  std::vector<Vec3> sum;
  std::vector<int> cnt;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const int r = find(static_cast<int>(i));
    if (vertex_of[r] < 0) {
      vertex_of[r] = static_cast<int>(sum.size());
      sum.push_back(Vec3::Zero());
      cnt.push_back(0);
    }
    vertex_of[i] = vertex_of[r];
    sum[vertex_of[i]] += ends[i];
    ++cnt[vertex_of[i]];
  }
  const Domain& dom = grid.domain();
  for (std::size_t v = 0; v < sum.size(); ++v) {
    Vec3 x = sum[v] / cnt[v];
    VertexKind kind = VertexKind::interior;
    if (dom.boundary_distance(x) <= opts.snap_cells * h) {
      x = dom.boundary_point(x);
      kind = VertexKind::boundary;
    }
    ex.chain.vertices.push_back({x, kind});
  }
  for (std::size_t f = 0; f < kept.size(); ++f) {
    const int u = vertex_of[2 * f], v = vertex_of[2 * f + 1];
    if (u == v) continue;
    ex.chain.edges.push_back({u, v, 1});
    ex.fit_rms.push_back(kept[f].rms);
  }

  // Merge nearly collinear edge pairs through interior degree-2 vertices.
  bool changed = true;
  while (changed) {
    changed = false;
    const auto deg = ex.chain.degrees();
    for (std::size_t v = 0; v < ex.chain.vertices.size() && !changed; ++v) {
      if (ex.chain.vertices[v].kind != VertexKind::interior || deg[v] != 2) continue;
      std::vector<std::size_t> inc;
      for (std::size_t e = 0; e < ex.chain.edges.size(); ++e)
        if (ex.chain.edges[e].u == static_cast<int>(v) || ex.chain.edges[e].v == static_cast<int>(v))
          inc.push_back(e);
      const auto other = [&](std::size_t e) {
        return ex.chain.edges[e].u == static_cast<int>(v) ? ex.chain.edges[e].v : ex.chain.edges[e].u;
      };
      const Vec3 x = ex.chain.vertices[v].pos;
      const Vec3 d0 = (ex.chain.vertices[other(inc[0])].pos - x).normalized();
      const Vec3 d1 = (ex.chain.vertices[other(inc[1])].pos - x).normalized();
      if (d0.dot(d1) > -std::cos(std::numbers::pi / 12)) continue;
      ex.chain.edges[inc[0]] = {other(inc[0]), other(inc[1]), ex.chain.edges[inc[0]].cls};
      ex.fit_rms[inc[0]] = std::max(ex.fit_rms[inc[0]], ex.fit_rms[inc[1]]);
      ex.chain.edges.erase(ex.chain.edges.begin() + static_cast<std::ptrdiff_t>(inc[1]));
      ex.fit_rms.erase(ex.fit_rms.begin() + static_cast<std::ptrdiff_t>(inc[1]));
      ex.chain.vertices.erase(ex.chain.vertices.begin() + static_cast<std::ptrdiff_t>(v));
      for (auto& e : ex.chain.edges) {
        if (e.u > static_cast<int>(v)) --e.u;
        if (e.v > static_cast<int>(v)) --e.v;
      }
      changed = true;
    }
  }
  return ex;
}

int detect_charge(const GridMap& u, const TargetManifold& target, const Segment& segment, double radius,
                  int samples) {
  if (!(radius > 0.0)) throw Error(Errc::invalid_argument, "loop radius must be positive");
  const Vec3 c = 0.5 * (segment.a + segment.b);
  Vec3 n = segment.b - segment.a;
  if (n.norm() == 0.0) throw Error(Errc::invalid_argument, "segment has zero length");
  n.normalize();
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (helper - helper.dot(n) * n).normalized();
  const Vec3 e2 = n.cross(e1);
  if (samples <= 0)
    samples = std::max(32, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / (0.25 * u.h()))));
  std::vector<Ambient> loop;
  for (int s = 0; s < samples; ++s) {
    const double phi = 2.0 * std::numbers::pi * s / samples;
    const Vec3 x = c + radius * (std::cos(phi) * e1 + std::sin(phi) * e2);
    if (u.domain().boundary_distance(x) < -0.5 * u.h())
      throw Error(Errc::invalid_argument, "loop leaves the domain");
    loop.push_back(u.interpolate(x));
  }
  return target.loop_class(loop);
}

DensityEstimate segment_density(const EnergyMeasure& m, const Segment& segment, const EnergyTable& table,
                                double tube_radius) {
  DensityEstimate est;
  const double len = segment.length();
  if (!(len > 0.0)) throw Error(Errc::invalid_argument, "segment has zero length");
  for (std::size_t c = 0; c < m.density.size(); ++c) {
    if (!m.active[c] || m.density[c] == 0.0) continue;
    if (point_segment_distance(m.centers[c], segment.a, segment.b) <= tube_radius) est.tube_mass += m.density[c];
  }
  est.theta = est.tube_mass / len;
  if (est.theta <= 0.0) return est;
  double best_gap = kInfinity;
  for (int c = 1; c < table.size(); ++c) {
    const double v = table.energies[c];
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    const double gap = std::abs(est.theta - v) / v;
    if (gap < best_gap) {
      best_gap = gap;
      est.nearest_class = c;
      est.nearest_value = v;
    }
  }
  est.relative_gap = std::isfinite(best_gap) ? best_gap : 0.0;
  return est;
}

}  // namespace hplateau
