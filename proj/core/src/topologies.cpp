#include <algorithm>
#include <functional>
#include <limits>

#include "hplateau/errors.hpp"
#include "hplateau/plateau.hpp"

namespace hplateau {

namespace {
constexpr int kUnassigned = std::numeric_limits<int>::min();
}  // namespace

// Each spec point has a single incident edge, so the boundary points are the
// leaves of the network. Interior vertices are labelled in order of their
// smallest boundary neighbour; since every interior vertex of degree >= 3 has
// a boundary neighbour when there are at most three of them, this labelling
// is canonical and no two emitted topologies are isomorphic.
std::vector<Topology> enumerate_topologies(const BoundaryChargeSpec& spec, const FiniteGroup& group,
                                           int max_steiner) {
  if (max_steiner < 0 || max_steiner > kMaxSteiner)
    throw Error(Errc::cap_exceeded, "at most " + std::to_string(kMaxSteiner) + " interior vertices");
  if (static_cast<int>(spec.size()) > kMaxSpecPoints)
    throw Error(Errc::cap_exceeded, "at most " + std::to_string(kMaxSpecPoints) + " spec points");
  check_spec(spec, group);

  const int b = static_cast<int>(spec.size());
  const bool abelian = group.is_abelian();
  std::vector<int> nontrivial;
  for (int c = 1; c < group.class_count(); ++c) nontrivial.push_back(c);

  std::vector<Topology> out;
  if (b == 0) {
    out.push_back(Topology{});
    return out;
  }

  for (int s = 0; s <= max_steiner; ++s) {
    std::vector<std::pair<int, int>> inner_pairs;
    for (int x = 0; x < s; ++x)
      for (int y = x + 1; y < s; ++y) inner_pairs.emplace_back(x, y);

    // target[i] >= 0: boundary partner; target[i] <= -1: interior vertex -(target+1).
    std::vector<int> target(b, kUnassigned);

    std::function<void(int)> finish = [&](int /*unused*/) {
      std::vector<std::vector<int>> leaf_charges(s);
      for (int i = 0; i < b; ++i)
        if (target[i] < 0) leaf_charges[-(target[i] + 1)].push_back(group.inverse_class(spec.classes[i]));

      const int pair_masks = 1 << inner_pairs.size();
      for (int mask = 0; mask < pair_masks; ++mask) {
        std::vector<int> chosen;
        for (std::size_t k = 0; k < inner_pairs.size(); ++k)
          if (mask & (1 << k)) chosen.push_back(static_cast<int>(k));
        std::vector<int> degree(s, 0);
        for (int x = 0; x < s; ++x) degree[x] = static_cast<int>(leaf_charges[x].size());
        for (int k : chosen) {
          ++degree[inner_pairs[k].first];
          ++degree[inner_pairs[k].second];
        }
        bool degree_ok = true;
        for (int x = 0; x < s; ++x) degree_ok = degree_ok && degree[x] >= 3;
        if (!degree_ok) continue;

        std::vector<int> cls(chosen.size(), 0);
        std::function<void(std::size_t)> assign = [&](std::size_t k) {
          if (k < chosen.size()) {
            for (int c : nontrivial) {
              cls[k] = c;
              assign(k + 1);
            }
            return;
          }
          std::vector<std::vector<int>> outgoing = leaf_charges;
          for (std::size_t q = 0; q < chosen.size(); ++q) {
            const auto [x, y] = inner_pairs[chosen[q]];
            outgoing[x].push_back(cls[q]);
            outgoing[y].push_back(group.inverse_class(cls[q]));
          }
          for (int x = 0; x < s; ++x)
            if (!flux_reaches(group, outgoing[x], 0, abelian)) return;

          Topology t;
          t.boundary_count = b;
          t.steiner_count = s;
          for (int i = 0; i < b; ++i) {
            if (target[i] >= 0) {
              if (target[i] > i) t.edges.push_back({i, target[i], spec.classes[i]});
            } else {
              t.edges.push_back({i, b - (target[i] + 1), spec.classes[i]});
            }
          }
          for (std::size_t q = 0; q < chosen.size(); ++q) {
            const auto [x, y] = inner_pairs[chosen[q]];
            t.edges.push_back({b + x, b + y, cls[q]});
          }
          out.push_back(std::move(t));
        };
        assign(0);
      }
    };

    std::function<void(int, int)> place = [&](int i, int used) {
      while (i < b && target[i] != kUnassigned) ++i;
      if (i == b) {
        if (used == s) finish(0);
        return;
      }
      // Direct edge to a later boundary point: the partner must see the
      // declared class when the edge arrives.
      for (int k = i + 1; k < b; ++k) {
        if (target[k] != kUnassigned) continue;
        if (group.inverse_class(spec.classes[i]) != spec.classes[k]) continue;
        target[i] = k;
        target[k] = i;
        place(i + 1, used);
        target[i] = kUnassigned;
        target[k] = kUnassigned;
      }
      for (int x = 0; x < std::min(used + 1, s); ++x) {
        target[i] = -(x + 1);
        place(i + 1, std::max(used, x + 1));
        target[i] = kUnassigned;
      }
    };
    place(0, 0);
  }
  return out;
}

}  // namespace hplateau
