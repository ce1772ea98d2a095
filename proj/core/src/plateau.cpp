#include "hplateau/plateau.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "hplateau/errors.hpp"

namespace hplateau {

namespace {

constexpr std::size_t kMaxTies = 256;

double diameter_of(std::span<const Vec3> pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

// best[mask] = least total length of a perfect matching of the points in
// mask, +inf for odd masks.
std::vector<double> matching_table(const std::vector<std::vector<double>>& dist) {
  const int n = static_cast<int>(dist.size());
  std::vector<double> best(std::size_t{1} << n, kInfinity);
  best[0] = 0.0;
  for (std::uint32_t mask = 1; mask < best.size(); ++mask) {
    if (std::popcount(mask) % 2) continue;
    const int i = std::countr_zero(mask);
    const std::uint32_t rest = mask & ~(1U << i);
    double b = kInfinity;
    for (std::uint32_t r = rest; r; r &= r - 1) {
      const int j = std::countr_zero(r);
      b = std::min(b, dist[i][j] + best[rest & ~(1U << j)]);
    }
    best[mask] = b;
  }
  return best;
}

std::vector<std::vector<double>> distances(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = (pts[i] - pts[j]).norm();
  return d;
}

bool segments_touch(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, double tol) {
  return segment_segment_distance(a, b, c, d) <= tol;
}

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // sorted by first index
  double length = 0.0;
};

class MatchingSearch {
 public:
  MatchingSearch(std::span<const Vec3> pts, double tie_rel_tol, int max_runner_ups, bool noncrossing)
      : pts_(pts),
        dist_(distances(pts)),
        best_(matching_table(dist_)),
        tie_rel_tol_(tie_rel_tol),
        max_runner_ups_(static_cast<std::size_t>(std::max(0, max_runner_ups))),
        noncrossing_(noncrossing),
        tol_(1e-9 * std::max(diameter_of(pts), 1e-300)) {}

  void run() {
    const std::uint32_t full = static_cast<std::uint32_t>(best_.size() - 1);
    optimum_ = noncrossing_ ? kInfinity : best_[full];
    current_.pairs.clear();
    dfs(full, 0.0);
  }

  double optimum() const { return optimum_; }
  const std::vector<Matching>& ties() const { return ties_; }
  const std::vector<Matching>& others() const { return others_; }
  long leaves() const { return leaves_; }

 private:
  double tie_bound() const { return optimum_ * (1.0 + tie_rel_tol_); }

  double prune_bound() const {
    double b = tie_bound();
    if (!std::isfinite(b)) return kInfinity;
    if (others_.size() < max_runner_ups_) return kInfinity;
    if (max_runner_ups_ > 0) b = std::max(b, others_.back().length);
    return b;
  }

  bool crosses(int i, int j) const {
    for (const auto& [a, b] : current_.pairs)
      if (segments_touch(pts_[a], pts_[b], pts_[i], pts_[j], tol_)) return true;
    return false;
  }

  void record(double length) {
    ++leaves_;
    Matching m{current_.pairs, length};
    if (length < optimum_) {
      // A new optimum (only in noncrossing mode): demote stale ties.
      optimum_ = length;
      std::vector<Matching> old;
      old.swap(ties_);
      for (auto& t : old) insert_other(std::move(t));
      std::vector<Matching> keep;
      for (auto& o : others_) {
        if (o.length <= tie_bound()) {
          if (ties_.size() < kMaxTies) ties_.push_back(std::move(o));
        } else {
          keep.push_back(std::move(o));
        }
      }
      others_.swap(keep);
    }
    if (length <= tie_bound()) {
      if (ties_.size() < kMaxTies) ties_.push_back(std::move(m));
      return;
    }
    insert_other(std::move(m));
  }

  void insert_other(Matching m) {
    if (max_runner_ups_ == 0) return;
    auto pos = std::upper_bound(others_.begin(), others_.end(), m.length,
                                [](double v, const Matching& o) { return v < o.length; });
    others_.insert(pos, std::move(m));
    if (others_.size() > max_runner_ups_) others_.pop_back();
  }

  void dfs(std::uint32_t remaining, double partial) {
    if (remaining == 0) {
      record(partial);
      return;
    }
    const int i = std::countr_zero(remaining);
    const std::uint32_t rest = remaining & ~(1U << i);
    std::vector<std::pair<double, int>> children;
    for (std::uint32_t r = rest; r; r &= r - 1) {
      const int j = std::countr_zero(r);
      children.emplace_back(dist_[i][j] + best_[rest & ~(1U << j)], j);
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [bound, j] : children) {
      if (partial + bound > prune_bound() * (1.0 + 1e-15)) break;
      if (noncrossing_ && crosses(i, j)) continue;
      current_.pairs.emplace_back(i, j);
      dfs(rest & ~(1U << j), partial + dist_[i][j]);
      current_.pairs.pop_back();
    }
  }

  std::span<const Vec3> pts_;
  std::vector<std::vector<double>> dist_;
  std::vector<double> best_;
  double tie_rel_tol_;
  std::size_t max_runner_ups_;
  bool noncrossing_;
  double tol_;
  double optimum_ = kInfinity;
  Matching current_;
  std::vector<Matching> ties_;
  std::vector<Matching> others_;
  long leaves_ = 0;
};

Chain matching_chain(std::span<const Vec3> pts, const Matching& m, int cls) {
  Chain c;
  for (const auto& p : pts) c.vertices.push_back({p, VertexKind::boundary});
  for (const auto& [a, b] : m.pairs) c.edges.push_back({a, b, cls});
  c.provenance = "solver";
  return c;
}

struct EdgeKey {
  Vec3 a;
  Vec3 b;
  int cls;
};

std::vector<EdgeKey> chain_keys(const Chain& c) {
  std::vector<EdgeKey> keys;
  auto less = [](const Vec3& x, const Vec3& y) {
    return std::lexicographical_compare(x.data(), x.data() + 3, y.data(), y.data() + 3);
  };
  for (std::size_t e = 0; e < c.edges.size(); ++e) {
    Vec3 a = c.vertices[c.edges[e].u].pos;
    Vec3 b = c.vertices[c.edges[e].v].pos;
    if (less(b, a)) std::swap(a, b);
    keys.push_back({a, b, c.edges[e].cls});
  }
  std::sort(keys.begin(), keys.end(), [&](const EdgeKey& x, const EdgeKey& y) {
    if (!x.a.isApprox(y.a, 0.0)) return less(x.a, y.a);
    return less(x.b, y.b);
  });
  return keys;
}

// Geometric equality of two chains as sets of charged segments.
bool same_chain(const Chain& x, const Chain& y, double tol) {
  if (x.edges.size() != y.edges.size()) return false;
  const auto kx = chain_keys(x);
  auto ky = chain_keys(y);
  std::vector<bool> used(ky.size(), false);
  for (const auto& e : kx) {
    bool found = false;
    for (std::size_t k = 0; k < ky.size() && !found; ++k) {
      if (used[k]) continue;
      const auto& f = ky[k];
      const bool same_cls = f.cls == e.cls;
      const bool fwd = (e.a - f.a).norm() <= tol && (e.b - f.b).norm() <= tol;
      const bool rev = (e.a - f.b).norm() <= tol && (e.b - f.a).norm() <= tol;
      if (same_cls && (fwd || rev)) used[k] = found = true;
    }
    if (!found) return false;
  }
  return true;
}

// Mass lower bound of a topology: exact for direct boundary edges; each
// connected interior component costs at least its lightest weight times a
// minimal matching of its terminals (half of a closed walk around the
// component visits every terminal).
double topology_lower_bound(const Topology& t, const EnergyTable& table,
                            const std::vector<std::vector<double>>& dist,
                            const std::vector<double>& best) {
  const int b = t.boundary_count;
  const int s = t.steiner_count;
  std::vector<int> parent(s);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  double lb = 0.0;
  for (const auto& e : t.edges) {
    if (e.u < b && e.v < b) lb += table.energies[e.cls] * dist[e.u][e.v];
    if (e.u >= b && e.v >= b) parent[find(e.u - b)] = find(e.v - b);
  }
  std::vector<std::uint32_t> terminals(s, 0);
  std::vector<double> wmin(s, kInfinity);
  for (const auto& e : t.edges) {
    if (e.u < b && e.v < b) continue;
    const int root = find((e.u >= b ? e.u : e.v) - b);
    wmin[root] = std::min(wmin[root], table.energies[e.cls]);
    if (e.u < b) terminals[root] |= 1U << e.u;
    if (e.v < b) terminals[root] |= 1U << e.v;
  }
  for (int r = 0; r < s; ++r) {
    if (find(r) != r || terminals[r] == 0) continue;
    const std::uint32_t m = terminals[r];
    double bound = 0.0;
    if (std::popcount(m) % 2 == 0) {
      bound = best[m];
    } else {
      for (std::uint32_t q = m; q; q &= q - 1) bound = std::max(bound, best[m & ~(q & -q)]);
    }
    lb += wmin[r] * bound;
  }
  return lb;
}

}  // namespace

bool has_crossing(const Chain& chain) {
  std::vector<Vec3> pts;
  for (const auto& v : chain.vertices) pts.push_back(v.pos);
  const double tol = 1e-9 * std::max(diameter_of(pts), 1e-300);
  for (std::size_t e = 0; e < chain.edges.size(); ++e) {
    for (std::size_t f = e + 1; f < chain.edges.size(); ++f) {
      const auto& a = chain.edges[e];
      const auto& b = chain.edges[f];
      if (a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v) continue;
      const auto s = chain.segment(e);
      const auto t = chain.segment(f);
      if (segments_touch(s.a, s.b, t.a, t.b, tol)) return true;
    }
  }
  return false;
}

SolveReport minimal_connection_matching(std::span<const Vec3> points, double weight, int cls,
                                        const SolveOptions& opts) {
  if (points.size() % 2) throw Error(Errc::odd_point_count, std::to_string(points.size()) + " points");
  if (static_cast<int>(points.size() / 2) > opts.max_pairs)
    throw Error(Errc::cap_exceeded, std::to_string(points.size() / 2) + " pairs exceed the cap of " +
                                        std::to_string(opts.max_pairs));
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw Error(Errc::invalid_argument, "matching weight must be positive");

  SolveReport report;
  if (points.empty()) {
    report.best.provenance = "solver";
    report.ties.push_back(report.best);
    return report;
  }

  MatchingSearch search(points, opts.tie_rel_tol, opts.max_runner_ups, false);
  search.run();
  bool all_cross = true;
  for (const auto& t : search.ties()) all_cross = all_cross && has_crossing(matching_chain(points, t, cls));
  report.intersecting_optimum = all_cross;

  const MatchingSearch* chosen = &search;
  MatchingSearch fallback(points, opts.tie_rel_tol, opts.max_runner_ups, true);
  if (all_cross && opts.require_noncrossing) {
    fallback.run();
    if (fallback.ties().empty())
      throw Error(Errc::infeasible_class, "no noncrossing matching exists");
    chosen = &fallback;
  }
  report.topologies_total = static_cast<int>(std::min<long>(chosen->leaves(), 1L << 30));
  for (const auto& t : chosen->ties()) report.ties.push_back(matching_chain(points, t, cls));
  report.best = report.ties.front();
  report.mass = weight * chosen->ties().front().length;
  for (const auto& o : chosen->others())
    report.runner_ups.push_back({matching_chain(points, o, cls), weight * o.length});
  return report;
}

SolveReport solve_plateau(const BoundaryChargeSpec& spec, const FiniteGroup& group,
                          const LengthSpectrum& lengths, const SolveOptions& opts) {
  check_spec(spec, group);
  SolveReport report;
  report.best.provenance = "solver";
  if (spec.empty()) {
    report.ties.push_back(report.best);
    return report;
  }
  const EnergyTable table = class_energy_table(group, lengths, 2.0);
  const auto topologies = enumerate_topologies(spec, group, opts.max_steiner);
  report.topologies_total = static_cast<int>(topologies.size());
  if (topologies.empty()) throw Error(Errc::infeasible_class, "no flux-feasible topology");

  const auto dist = distances(spec.points);
  const auto best_matching = matching_table(dist);
  std::vector<double> lb(topologies.size());
  for (std::size_t k = 0; k < topologies.size(); ++k)
    lb[k] = topology_lower_bound(topologies[k], table, dist, best_matching);
  std::vector<std::size_t> order(topologies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return lb[a] < lb[b]; });

  struct Candidate {
    std::size_t index;
    PositionResult result;
    bool crossing;
  };
  std::vector<Candidate> done;
  const double tol = 1e-9 * std::max(diameter_of(spec.points), 1e-300);
  const std::size_t want = static_cast<std::size_t>(std::max(0, opts.max_runner_ups));

  // Threshold beyond which no topology can be a tie or a runner-up.
  auto threshold = [&]() {
    double best = kInfinity;
    for (const auto& c : done)
      if (!opts.require_noncrossing || !c.crossing) best = std::min(best, c.result.mass);
    if (!std::isfinite(best)) return kInfinity;
    const double tie = best * (1.0 + opts.tie_rel_tol);
    std::vector<double> above;
    for (const auto& c : done)
      if (c.result.mass > tie) above.push_back(c.result.mass);
    if (above.size() < want) return kInfinity;
    std::sort(above.begin(), above.end());
    return want == 0 ? tie : std::max(tie, above[want - 1]);
  };

  for (std::size_t k : order) {
    if (lb[k] > threshold() * (1.0 + 1e-12)) break;
    PositionResult r = optimize_positions(topologies[k], spec.points, table, opts.positions);
    report.iterations += r.iterations;
    const bool crossing = has_crossing(r.chain);
    done.push_back({k, std::move(r), crossing});
  }
  report.topologies_pruned = report.topologies_total - static_cast<int>(done.size());

  // Stable argmin by topology index.
  std::stable_sort(done.begin(), done.end(), [](const Candidate& a, const Candidate& b) {
    if (a.result.mass != b.result.mass) return a.result.mass < b.result.mass;
    return a.index < b.index;
  });

  const double overall = done.front().result.mass;
  bool all_cross = true;
  for (const auto& c : done)
    if (c.result.mass <= overall * (1.0 + opts.tie_rel_tol)) all_cross = all_cross && c.crossing;
  report.intersecting_optimum = all_cross;

  const Candidate* best = nullptr;
  for (const auto& c : done) {
    if (opts.require_noncrossing && c.crossing) continue;
    best = &c;
    break;
  }
  if (!best) throw Error(Errc::infeasible_class, "every evaluated topology has crossing segments");

  report.best = best->result.chain;
  report.mass = best->result.mass;
  report.balance_max = best->result.balance_max;
  const double tie = report.mass * (1.0 + opts.tie_rel_tol);
  for (const auto& c : done) {
    if (opts.require_noncrossing && c.crossing) continue;
    const bool dup = std::any_of(report.ties.begin(), report.ties.end(),
                                 [&](const Chain& t) { return same_chain(t, c.result.chain, tol); }) ||
                     std::any_of(report.runner_ups.begin(), report.runner_ups.end(), [&](const RankedChain& t) {
                       return same_chain(t.chain, c.result.chain, tol);
                     });
    if (dup) continue;
    if (c.result.mass <= tie) {
      if (report.ties.size() < kMaxTies) report.ties.push_back(c.result.chain);
    } else if (report.runner_ups.size() < want) {
      report.runner_ups.push_back({c.result.chain, c.result.mass});
    }
  }
  return report;
}

}  // namespace hplateau
