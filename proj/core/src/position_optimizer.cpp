#include <algorithm>
#include <cmath>
#include <limits>

#include "hplateau/errors.hpp"
#include "hplateau/plateau.hpp"

namespace hplateau {

Chain topology_chain(const Topology& topology, std::span<const Vec3> boundary,
                     std::span<const Vec3> steiner) {
  if (static_cast<int>(boundary.size()) != topology.boundary_count ||
      static_cast<int>(steiner.size()) != topology.steiner_count)
    throw Error(Errc::invalid_argument, "positions do not match the topology");
  Chain chain;
  for (const auto& p : boundary) chain.vertices.push_back({p, VertexKind::boundary});
  for (const auto& p : steiner) chain.vertices.push_back({p, VertexKind::interior});
  chain.edges = topology.edges;
  return chain;
}

namespace {

struct Network {
  std::vector<Vec3> pos;
  std::vector<bool> movable;
  std::vector<bool> alive;
  std::vector<ChainEdge> edges;
  std::vector<double> weight;  // per edge
  std::vector<bool> edge_alive;

  double mass() const {
    double m = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (edge_alive[e]) m += weight[e] * (pos[edges[e].u] - pos[edges[e].v]).norm();
    return m;
  }

  struct Incident {
    int edge;
    int other;
  };

  std::vector<Incident> incident(int v) const {
    std::vector<Incident> out;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!edge_alive[e]) continue;
      if (edges[e].u == v) out.push_back({static_cast<int>(e), edges[e].v});
      if (edges[e].v == v) out.push_back({static_cast<int>(e), edges[e].u});
    }
    return out;
  }

  // Sum of weighted unit vectors from x toward the neighbours, skipping any
  // neighbour closer than eps.
  Vec3 pull(const std::vector<Incident>& inc, const Vec3& x, double eps, int skip = -1) const {
    Vec3 f = Vec3::Zero();
    for (const auto& i : inc) {
      if (i.edge == skip) continue;
      const Vec3 d = pos[i.other] - x;
      const double n = d.norm();
      if (n > eps) f += weight[i.edge] * d / n;
    }
    return f;
  }

  double local_cost(const std::vector<Incident>& inc, const Vec3& x) const {
    double c = 0.0;
    for (const auto& i : inc) c += weight[i.edge] * (pos[i.other] - x).norm();
    return c;
  }

  // Contracts edge e by merging vertex v into its other endpoint.
  void contract(int e, int v) {
    const int keep = edges[e].u == v ? edges[e].v : edges[e].u;
    edge_alive[e] = false;
    for (std::size_t f = 0; f < edges.size(); ++f) {
      if (!edge_alive[f]) continue;
      if (edges[f].u == v) edges[f].u = keep;
      if (edges[f].v == v) edges[f].v = keep;
    }
    alive[v] = false;
  }
};

}  // namespace

PositionResult optimize_positions(const Topology& topology, std::span<const Vec3> boundary,
                                  const EnergyTable& table, const PositionOptions& opts,
                                  std::span<const Vec3> initial_steiner) {
  if (static_cast<int>(boundary.size()) != topology.boundary_count)
    throw Error(Errc::invalid_argument, "boundary positions do not match the topology");
  if (std::abs(table.p - 2.0) > 1e-12)
    throw Error(Errc::invalid_argument, "position optimizer needs the energy table at p = 2");

  Network net;
  net.pos.assign(boundary.begin(), boundary.end());
  if (!initial_steiner.empty()) {
    if (static_cast<int>(initial_steiner.size()) != topology.steiner_count)
      throw Error(Errc::invalid_argument, "initial interior positions do not match the topology");
    net.pos.insert(net.pos.end(), initial_steiner.begin(), initial_steiner.end());
  } else {
    // Mean of the boundary neighbours, falling back to the boundary centroid.
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : boundary) centroid += p;
    if (!boundary.empty()) centroid /= static_cast<double>(boundary.size());
    for (int s = 0; s < topology.steiner_count; ++s) {
      const int v = topology.boundary_count + s;
      Vec3 acc = Vec3::Zero();
      int n = 0;
      for (const auto& e : topology.edges) {
        const int other = e.u == v ? e.v : (e.v == v ? e.u : -1);
        if (other >= 0 && other < topology.boundary_count) {
          acc += boundary[other];
          ++n;
        }
      }
      net.pos.push_back(n > 0 ? Vec3(0.5 * (acc / n) + 0.5 * centroid) : centroid);
    }
  }
  const int nv = topology.vertex_count();
  net.movable.assign(nv, false);
  for (int v = topology.boundary_count; v < nv; ++v) net.movable[v] = true;
  net.alive.assign(nv, true);
  net.edges = topology.edges;
  net.edge_alive.assign(net.edges.size(), true);
  for (const auto& e : net.edges) {
    if (e.cls < 0 || e.cls >= table.size()) throw Error(Errc::unknown_class, std::to_string(e.cls));
    net.weight.push_back(table.energies[e.cls]);
  }

  double diam = 0.0;
  for (std::size_t i = 0; i < boundary.size(); ++i)
    for (std::size_t j = i + 1; j < boundary.size(); ++j)
      diam = std::max(diam, (boundary[i] - boundary[j]).norm());
  if (diam == 0.0) diam = 1.0;
  const double merge_eps = opts.merge_rel_tol * diam;
  const double move_eps = opts.move_rel_tol * diam;

  // Separate coincident interior starting points.
  for (int a = topology.boundary_count; a < nv; ++a)
    for (int b = a + 1; b < nv; ++b)
      if ((net.pos[a] - net.pos[b]).norm() < 1e-6 * diam)
        net.pos[b] += Vec3(1e-3, 2e-3, 3e-3) * diam * (b - a);

  PositionResult result;
  if (topology.steiner_count == 0) {
    result.no_interior = true;
    result.converged = true;
  }

  const double theta = std::clamp(opts.damping, 1e-3, 1.0);
  long sweep = 0;
  if (opts.record_history) result.mass_history.push_back(net.mass());
  while (!result.no_interior && sweep < opts.max_iterations) {
    ++sweep;
    double max_move = 0.0;
    bool merged = false;
    for (int v = topology.boundary_count; v < nv; ++v) {
      if (!net.alive[v]) continue;
      const auto inc = net.incident(v);
      if (inc.empty()) continue;
      Vec3& x = net.pos[v];
      const Vec3 old = x;

      // Kuhn's test: is some neighbour the minimizer of the local cost?
      int jump_edge = -1;
      Vec3 escape = Vec3::Zero();
      for (const auto& i : inc) {
        const Vec3& y = net.pos[i.other];
        const Vec3 r = net.pull(inc, y, merge_eps, i.edge);
        double w_coincident = net.weight[i.edge];
        for (const auto& k : inc)
          if (k.edge != i.edge && (net.pos[k.other] - y).norm() <= merge_eps)
            w_coincident += net.weight[k.edge];
        const bool on_top = (x - y).norm() <= merge_eps;
        if (r.norm() < w_coincident * (1.0 - 1e-12) ||
            (on_top && r.norm() <= w_coincident * (1.0 + 1e-12))) {
          jump_edge = i.edge;
          break;
        }
        if (on_top) escape = r;
      }
      if (jump_edge >= 0) {
        const auto& e = net.edges[jump_edge];
        x = net.pos[e.u == v ? e.v : e.u];
        max_move = std::max(max_move, (x - old).norm());
        net.contract(jump_edge, v);
        ++result.merges;
        merged = true;
        continue;
      }

      if (escape.squaredNorm() > 0.0) {
        // Sitting on a neighbour that is not optimal: Armijo step along the
        // descent direction of the remaining pulls.
        const Vec3 dir = escape.normalized();
        double min_dist = std::numeric_limits<double>::infinity();
        for (const auto& i : inc) {
          const double d = (net.pos[i.other] - x).norm();
          if (d > merge_eps) min_dist = std::min(min_dist, d);
        }
        const double f0 = net.local_cost(inc, x);
        double t = std::isfinite(min_dist) ? 0.5 * min_dist : diam;
        double slope = 0.0;
        for (const auto& i : inc)
          if ((net.pos[i.other] - x).norm() <= merge_eps) slope += net.weight[i.edge];
        slope -= escape.norm();
        for (int k = 0; k < 60; ++k, t *= 0.5) {
          const Vec3 trial = x + t * dir;
          if (net.local_cost(inc, trial) <= f0 + 1e-4 * t * slope) {
            x = trial;
            break;
          }
        }
        max_move = std::max(max_move, (x - old).norm());
        continue;
      }

      Vec3 num = Vec3::Zero();
      double den = 0.0;
      for (const auto& i : inc) {
        const double d = (net.pos[i.other] - x).norm();
        num += net.weight[i.edge] * net.pos[i.other] / d;
        den += net.weight[i.edge] / d;
      }
      const Vec3 target = num / den;
      const double f0 = net.local_cost(inc, x);
      Vec3 trial = x + theta * (target - x);
      // Weiszfeld never increases the local cost; guard against roundoff.
      if (net.local_cost(inc, trial) <= f0) x = trial;
      max_move = std::max(max_move, (x - old).norm());
    }
    if (opts.record_history) result.mass_history.push_back(net.mass());

    double balance = 0.0;
    for (int v = topology.boundary_count; v < nv; ++v) {
      if (!net.alive[v]) continue;
      balance = std::max(balance, net.pull(net.incident(v), net.pos[v], 0.0).norm());
    }
    if (!merged && max_move <= move_eps && balance <= opts.balance_tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = sweep;

  // Rebuild the chain without contracted vertices and edges.
  std::vector<int> remap(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!net.alive[v]) continue;
    remap[v] = static_cast<int>(result.chain.vertices.size());
    result.chain.vertices.push_back(
        {net.pos[v], v < topology.boundary_count ? VertexKind::boundary : VertexKind::interior});
  }
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    if (!net.edge_alive[e]) continue;
    result.chain.edges.push_back({remap[net.edges[e].u], remap[net.edges[e].v], net.edges[e].cls});
  }
  result.chain.provenance = "solver";
  result.mass = chain_mass(result.chain, table).total_mass;
  result.balance_max = balance_residuals(result.chain, table).max_residual;
  return result;
}

}  // namespace hplateau
