#include "hplateau/group_algebra.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "hplateau/errors.hpp"

namespace hplateau {

namespace {

constexpr double kTieRelTol = 1e-12;

bool cost_le(double a, double b) {
  return a <= b + kTieRelTol * std::max(1.0, std::abs(b));
}

std::string triple(int a, int b, int c) {
  std::ostringstream os;
  os << "(" << a << ", " << b << ", " << c << ")";
  return os.str();
}

}  // namespace

FiniteGroup FiniteGroup::from_table(std::vector<std::vector<int>> table) {
  const int n = static_cast<int>(table.size());
  if (n < 1) throw Error(Errc::invalid_argument, "empty multiplication table");
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(table[a].size()) != n)
      throw Error(Errc::invalid_argument, "table row " + std::to_string(a) + " is not of length " +
                                              std::to_string(n));
    for (int b = 0; b < n; ++b) {
      if (table[a][b] < 0 || table[a][b] >= n)
        throw Error(Errc::out_of_range, "mul(" + std::to_string(a) + ", " + std::to_string(b) +
                                            ") = " + std::to_string(table[a][b]) +
                                            " is not an element id");
    }
  }
  for (int a = 0; a < n; ++a) {
    if (table[0][a] != a || table[a][0] != a)
      throw Error(Errc::no_identity, "element 0 does not act as identity on " + std::to_string(a));
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw Error(Errc::not_associative, "triple " + triple(a, b, c));

  FiniteGroup g;
  g.mul_ = std::move(table);
  g.inv_.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (g.mul_[a][b] == 0 && g.mul_[b][a] == 0) {
        g.inv_[a] = b;
        break;
      }
    }
    if (g.inv_[a] < 0) throw Error(Errc::no_inverse, "element " + std::to_string(a));
  }

  g.class_of_.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    if (g.class_of_[a] >= 0) continue;
    const int id = static_cast<int>(g.classes_.size());
    std::vector<int> members;
    for (int x = 0; x < n; ++x) {
      const int conj = g.mul_[g.mul_[x][a]][g.inv_[x]];
      if (g.class_of_[conj] < 0) {
        g.class_of_[conj] = id;
        members.push_back(conj);
      }
    }
    std::sort(members.begin(), members.end());
    g.classes_.push_back(std::move(members));
  }

  const int k = g.class_count();
  g.inverse_class_.resize(k);
  for (int c = 0; c < k; ++c) g.inverse_class_[c] = g.class_of_[g.inv_[g.classes_[c].front()]];

  for (int a = 0; a < n && g.abelian_; ++a)
    for (int b = 0; b < n; ++b)
      if (g.mul_[a][b] != g.mul_[b][a]) {
        g.abelian_ = false;
        break;
      }

  if (k <= kMaxClasses) {
    g.class_product_.assign(k, std::vector<ClassSet>(k, 0));
    for (int ca = 0; ca < k; ++ca)
      for (int cb = 0; cb < k; ++cb) {
        ClassSet s = 0;
        for (int a : g.classes_[ca])
          for (int b : g.classes_[cb]) s |= ClassSet{1} << g.class_of_[g.mul_[a][b]];
        g.class_product_[ca][cb] = s;
      }
  }
  return g;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw Error(Errc::invalid_argument, "cyclic group order must be positive");
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return from_table(std::move(t));
}

FiniteGroup FiniteGroup::symmetric3() {
  // Elements are permutations of {0,1,2} in lexicographic order; id 0 is the identity.
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  auto index_of = [&](const std::array<int, 3>& q) {
    return static_cast<int>(std::find(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<std::vector<int>> t(6, std::vector<int>(6));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
      t[a][b] = index_of(c);
    }
  return from_table(std::move(t));
}

FiniteGroup FiniteGroup::direct_product(const FiniteGroup& a, const FiniteGroup& b) {
  const int na = a.order();
  const int nb = b.order();
  std::vector<std::vector<int>> t(na * nb, std::vector<int>(na * nb));
  for (int x = 0; x < na * nb; ++x)
    for (int y = 0; y < na * nb; ++y)
      t[x][y] = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
  return from_table(std::move(t));
}

ClassSet FiniteGroup::product(ClassSet a, ClassSet b) const {
  ClassSet out = 0;
  for (ClassSet ra = a; ra != 0; ra &= ra - 1) {
    const int ca = std::countr_zero(ra);
    for (ClassSet rb = b; rb != 0; rb &= rb - 1) out |= class_product_[ca][std::countr_zero(rb)];
  }
  return out;
}

LengthSpectrum LengthSpectrum::create(const FiniteGroup& group, std::vector<double> lambda) {
  if (static_cast<int>(lambda.size()) != group.class_count())
    throw Error(Errc::invalid_spectrum, "expected " + std::to_string(group.class_count()) +
                                            " lengths, got " + std::to_string(lambda.size()));
  if (lambda[0] != 0.0) throw Error(Errc::invalid_spectrum, "trivial class must have length 0");
  for (int c = 1; c < group.class_count(); ++c) {
    if (!std::isfinite(lambda[c]) || lambda[c] <= 0.0)
      throw Error(Errc::invalid_spectrum,
                  "nontrivial class " + std::to_string(c) + " needs a positive length");
    const double other = lambda[group.inverse_class(c)];
    if (std::abs(other - lambda[c]) > 1e-12 * std::max(1.0, lambda[c]))
      throw Error(Errc::invalid_spectrum,
                  "class " + std::to_string(c) + " and its inverse class have different lengths");
  }
  return LengthSpectrum(std::move(lambda));
}

double charge_cost(double lambda, double p) {
  if (lambda == 0.0) return 0.0;
  return std::pow(lambda, p) / (std::pow(2.0 * std::numbers::pi, p - 1.0) * p);
}

namespace {

struct SearchContext {
  const FiniteGroup& group;
  std::vector<int> allowed;   // sorted nontrivial classes
  std::vector<double> cost;   // per class id
  ClassSet goal = 0;

  SearchContext(const FiniteGroup& g, const LengthSpectrum& lengths, int cls, double p,
                const ChargePalette& palette)
      : group(g) {
    if (cls < 0 || cls >= g.class_count())
      throw Error(Errc::unknown_class, "class id " + std::to_string(cls));
    if (g.class_count() > kMaxClasses)
      throw Error(Errc::cap_exceeded, "more than 64 conjugacy classes");
    goal = ClassSet{1} << cls;
    if (lengths.size() != g.class_count())
      throw Error(Errc::invalid_spectrum, "length spectrum does not match the group");
    if (!(p >= 1.0 && p <= 2.0)) throw Error(Errc::invalid_argument, "p must lie in [1, 2]");
    if (palette) {
      for (int c : *palette) {
        if (c <= 0 || c >= g.class_count())
          throw Error(Errc::unknown_class, "palette class " + std::to_string(c));
        allowed.push_back(c);
      }
      std::sort(allowed.begin(), allowed.end());
      allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
    } else {
      for (int c = 1; c < g.class_count(); ++c) allowed.push_back(c);
    }
    cost.resize(g.class_count());
    for (int c = 0; c < g.class_count(); ++c) cost[c] = charge_cost(lengths[c], p);
  }

  // Cheapest cost of extending a partial product set until it meets the goal.
  double remaining(ClassSet start, std::unordered_map<ClassSet, double>& memo) const {
    if (auto it = memo.find(start); it != memo.end()) return it->second;
    using Item = std::pair<double, ClassSet>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    std::unordered_map<ClassSet, double> dist;
    dist[start] = 0.0;
    queue.push({0.0, start});
    double best = kInfinity;
    while (!queue.empty()) {
      auto [d, s] = queue.top();
      queue.pop();
      if (d > dist[s]) continue;
      if (s & goal) {
        best = d;
        break;
      }
      for (int c : allowed) {
        const ClassSet next = group.product(s, ClassSet{1} << c);
        const double nd = d + cost[c];
        auto it = dist.find(next);
        if (it == dist.end() || nd < it->second) {
          dist[next] = nd;
          queue.push({nd, next});
        }
      }
    }
    memo[start] = best;
    return best;
  }
};

}  // namespace

Resolution minimal_resolution(const FiniteGroup& group, const LengthSpectrum& lengths, int cls,
                              double p, const ChargePalette& palette) {
  SearchContext ctx(group, lengths, cls, p, palette);
  std::unordered_map<ClassSet, double> memo;
  const ClassSet start = ClassSet{1};  // the empty product is the identity
  const double optimum = ctx.remaining(start, memo);
  if (!std::isfinite(optimum))
    throw Error(Errc::infeasible_class,
                "class " + std::to_string(cls) + " is not reachable with the charge palette");

  // Pre-order DFS over nondecreasing class sequences visits sorted multisets
  // in lexicographic order, so the first co-optimal hit is the tie winner.
  Resolution found;
  bool done = false;
  std::vector<int> prefix;
  std::function<void(ClassSet, double, std::size_t)> visit = [&](ClassSet s, double spent,
                                                                 std::size_t first) {
    if (done) return;
    if (s & ctx.goal) {
      if (cost_le(spent, optimum)) {
        found.classes = prefix;
        found.total_energy = spent;
        done = true;
      }
      return;
    }
    for (std::size_t i = first; i < ctx.allowed.size() && !done; ++i) {
      const int c = ctx.allowed[i];
      const ClassSet next = group.product(s, ClassSet{1} << c);
      const double spent_next = spent + ctx.cost[c];
      if (!cost_le(spent_next + ctx.remaining(next, memo), optimum)) continue;
      prefix.push_back(c);
      visit(next, spent_next, i);
      prefix.pop_back();
    }
  };
  visit(start, 0.0, 0);
  if (!done) throw Error(Errc::infeasible_class, "no witness found for class " + std::to_string(cls));
  return found;
}

double singular_energy(const FiniteGroup& group, const LengthSpectrum& lengths, int cls, double p,
                       const ChargePalette& palette) {
  SearchContext ctx(group, lengths, cls, p, palette);
  std::unordered_map<ClassSet, double> memo;
  const double optimum = ctx.remaining(ClassSet{1}, memo);
  if (!std::isfinite(optimum))
    throw Error(Errc::infeasible_class,
                "class " + std::to_string(cls) + " is not reachable with the charge palette");
  return optimum;
}

double systole(const LengthSpectrum& lengths) {
  double best = kInfinity;
  for (int c = 1; c < lengths.size(); ++c) best = std::min(best, lengths[c]);
  return best;
}

EnergyTable class_energy_table(const FiniteGroup& group, const LengthSpectrum& lengths, double p,
                               const ChargePalette& palette) {
  EnergyTable table;
  table.p = p;
  table.energies.resize(group.class_count());
  table.witness.resize(group.class_count());
  for (int c = 0; c < group.class_count(); ++c) {
    try {
      table.witness[c] = minimal_resolution(group, lengths, c, p, palette);
      table.energies[c] = table.witness[c].total_energy;
    } catch (const Error& e) {
      if (e.code() != Errc::infeasible_class) throw;
      table.energies[c] = kInfinity;
    }
  }
  return table;
}

namespace integer_charges {

double lambda(long degree) { return 2.0 * std::numbers::pi * static_cast<double>(std::labs(degree)); }

IntegerResolution minimal_resolution(long degree, double p, long cap) {
  if (!(p >= 1.0 && p <= 2.0)) throw Error(Errc::invalid_argument, "p must lie in [1, 2]");
  if (cap < 1) throw Error(Errc::invalid_argument, "charge cap must be positive");
  IntegerResolution best;
  if (degree == 0) return best;

  std::vector<long> parts;
  for (long d = -cap; d <= cap; ++d)
    if (d != 0) parts.push_back(d);
  std::vector<double> cost(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) cost[i] = charge_cost(lambda(parts[i]), p);

  // |degree| unit charges are always feasible, and every part costs at least
  // as much as a unit charge, so no optimal resolution has more parts.
  const double unit_total = static_cast<double>(std::labs(degree)) * charge_cost(lambda(1), p);
  const std::size_t max_parts = static_cast<std::size_t>(std::labs(degree));

  double optimum = unit_total;
  std::vector<long> seq;
  // First pass: exact optimum; second pass: lexicographically smallest witness.
  for (int pass = 0; pass < 2; ++pass) {
    bool done = false;
    std::function<void(std::size_t, long, double)> visit = [&](std::size_t first, long sum,
                                                               double spent) {
      if (done) return;
      if (sum == degree && !seq.empty()) {
        if (pass == 0) {
          optimum = std::min(optimum, spent);
        } else if (cost_le(spent, optimum)) {
          best.charges = seq;
          best.total_energy = spent;
          done = true;
        }
        return;
      }
      if (seq.size() >= max_parts) return;
      for (std::size_t i = first; i < parts.size() && !done; ++i) {
        const double s = spent + cost[i];
        if (!cost_le(s, optimum)) continue;
        seq.push_back(parts[i]);
        visit(i, sum + parts[i], s);
        seq.pop_back();
      }
    };
    visit(0, 0, 0.0);
  }
  return best;
}

double singular_energy(long degree, double p, long cap) {
  return minimal_resolution(degree, p, cap).total_energy;
}

}  // namespace integer_charges

FiniteGroup rp2_group() { return FiniteGroup::cyclic(2); }

LengthSpectrum rp2_lengths(const FiniteGroup& group) {
  return LengthSpectrum::create(group, {0.0, std::numbers::sqrt2 * std::numbers::pi});
}

}  // namespace hplateau
