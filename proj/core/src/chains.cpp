#include "hplateau/chains.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hplateau/errors.hpp"

namespace hplateau {

std::vector<Segment> Chain::segments() const {
  std::vector<Segment> out;
  out.reserve(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) out.push_back(segment(e));
  return out;
}

std::vector<int> Chain::degrees() const {
  std::vector<int> deg(vertices.size(), 0);
  for (const auto& e : edges) {
    if (e.u >= 0 && e.u < static_cast<int>(deg.size())) ++deg[e.u];
    if (e.v >= 0 && e.v < static_cast<int>(deg.size())) ++deg[e.v];
  }
  return deg;
}

void check_spec(const BoundaryChargeSpec& spec, const FiniteGroup& group) {
  if (spec.points.size() != spec.classes.size())
    throw Error(Errc::invalid_argument, "spec points and classes differ in count");
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const int c = spec.classes[i];
    if (c < 0 || c >= group.class_count())
      throw Error(Errc::unknown_class, "spec point " + std::to_string(i) + " has class " +
                                           std::to_string(c));
    if (c == 0)
      throw Error(Errc::invalid_argument, "spec point " + std::to_string(i) + " has trivial class");
  }
  std::vector<Vec3> pts = spec.points;
  const double tol = 1e-9 * std::max(diameter(pts), 1e-3);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if ((pts[i] - pts[j]).norm() <= tol)
        throw Error(Errc::degenerate_spec, "spec points " + std::to_string(i) + " and " +
                                               std::to_string(j) + " coincide");
}

double geometric_tolerance(const Chain& chain, const BoundaryChargeSpec& spec) {
  std::vector<Vec3> pts = spec.points;
  for (const auto& v : chain.vertices) pts.push_back(v.pos);
  const double d = diameter(pts);
  return d > 0.0 ? 1e-9 * d : 1e-12;
}

std::string_view to_string(Violation v) noexcept {
  switch (v) {
    case Violation::bad_endpoint: return "bad_endpoint";
    case Violation::degenerate_edge: return "degenerate_edge";
    case Violation::trivial_charge: return "trivial_charge";
    case Violation::unknown_class: return "unknown_class";
    case Violation::segments_intersect: return "segments_intersect";
    case Violation::interior_endpoint: return "interior_endpoint";
    case Violation::interior_flux: return "interior_flux";
    case Violation::boundary_flux: return "boundary_flux";
    case Violation::boundary_vertex_off_spec: return "boundary_vertex_off_spec";
    case Violation::spec_point_unconnected: return "spec_point_unconnected";
  }
  return "unknown";
}

bool ValidationReport::has(Violation kind) const {
  return std::any_of(issues.begin(), issues.end(),
                     [kind](const ValidationIssue& i) { return i.kind == kind; });
}

namespace {

std::string edge_name(std::size_t e) { return "edge " + std::to_string(e); }
std::string vertex_name(std::size_t v) { return "vertex " + std::to_string(v); }

}  // namespace

bool flux_reaches(const FiniteGroup& group, std::span<const int> outgoing, int target, bool abelian) {
  if (abelian) {
    int acc = 0;
    for (int c : outgoing) acc = group.mul(acc, group.class_members(c).front());
    return group.class_of(acc) == target;
  }
  ClassSet acc = ClassSet{1};
  for (int c : outgoing) acc = group.product(acc, ClassSet{1} << c);
  return (acc >> target) & 1U;
}

ValidationReport validate_chain(const Chain& chain, const BoundaryChargeSpec& spec,
                                const FiniteGroup& group, bool abelian) {
  ValidationReport report;
  report.necessary_only = !abelian;
  auto flag = [&](Violation kind, std::string detail) {
    report.issues.push_back({kind, std::move(detail)});
  };

  const int nv = static_cast<int>(chain.vertices.size());
  const double tol = geometric_tolerance(chain, spec);

  std::vector<bool> edge_ok(chain.edges.size(), true);
  for (std::size_t e = 0; e < chain.edges.size(); ++e) {
    const auto& edge = chain.edges[e];
    if (edge.u < 0 || edge.u >= nv || edge.v < 0 || edge.v >= nv || edge.u == edge.v) {
      flag(Violation::bad_endpoint, edge_name(e));
      edge_ok[e] = false;
      continue;
    }
    if (chain.segment(e).length() <= tol) {
      flag(Violation::degenerate_edge, edge_name(e) + " has zero length");
      edge_ok[e] = false;
    }
    if (edge.cls < 0 || edge.cls >= group.class_count()) {
      flag(Violation::unknown_class, edge_name(e) + " class " + std::to_string(edge.cls));
      edge_ok[e] = false;
    } else if (edge.cls == 0) {
      flag(Violation::trivial_charge, edge_name(e));
    }
  }

  // Pairwise disjointness of open segments.
  for (std::size_t e = 0; e < chain.edges.size(); ++e) {
    if (!edge_ok[e]) continue;
    for (std::size_t f = e + 1; f < chain.edges.size(); ++f) {
      if (!edge_ok[f]) continue;
      const auto& a = chain.edges[e];
      const auto& b = chain.edges[f];
      const int shared = (a.u == b.u || a.u == b.v) + (a.v == b.u || a.v == b.v);
      if (shared == 2) {
        flag(Violation::segments_intersect, edge_name(e) + " duplicates " + edge_name(f));
        continue;
      }
      if (shared == 1) {
        const int w = (a.u == b.u || a.u == b.v) ? a.u : a.v;
        const Vec3 x = chain.vertices[a.u == w ? a.v : a.u].pos - chain.vertices[w].pos;
        const Vec3 y = chain.vertices[b.u == w ? b.v : b.u].pos - chain.vertices[w].pos;
        const double cross = x.cross(y).norm();
        if (cross <= 1e-9 * x.norm() * y.norm() && x.dot(y) > 0.0)
          flag(Violation::segments_intersect, edge_name(e) + " overlaps " + edge_name(f));
        continue;
      }
      const auto s = chain.segment(e);
      const auto t = chain.segment(f);
      if (segment_segment_distance(s.a, s.b, t.a, t.b) <= tol)
        flag(Violation::segments_intersect, edge_name(e) + " meets " + edge_name(f));
    }
  }

  std::vector<std::vector<int>> outgoing(nv);
  for (std::size_t e = 0; e < chain.edges.size(); ++e) {
    if (!edge_ok[e]) continue;
    const auto& edge = chain.edges[e];
    outgoing[edge.u].push_back(edge.cls);
    outgoing[edge.v].push_back(group.inverse_class(edge.cls));
  }

  std::vector<bool> spec_hit(spec.size(), false);
  for (int v = 0; v < nv; ++v) {
    const auto& vert = chain.vertices[v];
    if (vert.kind == VertexKind::interior) {
      if (outgoing[v].size() < 2)
        flag(Violation::interior_endpoint,
             vertex_name(v) + " has degree " + std::to_string(outgoing[v].size()));
      if (!flux_reaches(group, outgoing[v], 0, abelian))
        flag(Violation::interior_flux, vertex_name(v));
      continue;
    }
    int match = -1;
    for (std::size_t i = 0; i < spec.size(); ++i)
      if ((spec.points[i] - vert.pos).norm() <= tol) match = static_cast<int>(i);
    if (match < 0) {
      flag(Violation::boundary_vertex_off_spec, vertex_name(v));
      continue;
    }
    spec_hit[match] = true;
    if (!flux_reaches(group, outgoing[v], spec.classes[match], abelian))
      flag(Violation::boundary_flux, vertex_name(v) + " at spec point " + std::to_string(match));
  }
  for (std::size_t i = 0; i < spec.size(); ++i)
    if (!spec_hit[i] && spec.classes[i] != 0)
      flag(Violation::spec_point_unconnected, "spec point " + std::to_string(i));
  return report;
}

namespace {

void require_p2(const EnergyTable& table) {
  if (std::abs(table.p - 2.0) > 1e-12)
    throw Error(Errc::invalid_argument, "mass weights need the energy table at p = 2");
}

double edge_weight(const EnergyTable& table, int cls) {
  if (cls < 0 || cls >= table.size()) throw Error(Errc::unknown_class, std::to_string(cls));
  return table.energies[cls];
}

}  // namespace

MassReport chain_mass(const Chain& chain, const EnergyTable& table) {
  require_p2(table);
  MassReport report;
  for (std::size_t e = 0; e < chain.edges.size(); ++e) {
    EdgeMass m;
    m.edge = static_cast<int>(e);
    m.weight = edge_weight(table, chain.edges[e].cls);
    m.length = chain.segment(e).length();
    m.contribution = m.weight * m.length;
    report.total_mass += m.contribution;
    report.per_edge.push_back(m);
  }
  return report;
}

BalanceReport balance_residuals(const Chain& chain, const EnergyTable& table) {
  require_p2(table);
  std::vector<Vec3> force(chain.vertices.size(), Vec3::Zero());
  for (std::size_t e = 0; e < chain.edges.size(); ++e) {
    const auto& edge = chain.edges[e];
    const double w = edge_weight(table, edge.cls);
    const Vec3 d = chain.vertices[edge.v].pos - chain.vertices[edge.u].pos;
    const double len = d.norm();
    if (len == 0.0) continue;
    force[edge.u] += w * d / len;
    force[edge.v] -= w * d / len;
  }
  BalanceReport report;
  for (std::size_t v = 0; v < chain.vertices.size(); ++v) {
    if (chain.vertices[v].kind != VertexKind::interior) continue;
    const double r = force[v].norm();
    report.residuals.push_back({static_cast<int>(v), r});
    report.max_residual = std::max(report.max_residual, r);
  }
  return report;
}

HullReport convex_hull_containment(const Chain& chain, const BoundaryChargeSpec& spec, double tol) {
  if (spec.empty()) throw Error(Errc::invalid_argument, "hull test needs a nonempty spec");
  if (tol < 0.0) tol = geometric_tolerance(chain, spec);
  HullReport report;
  report.hull_dimension = affine_dimension(spec.points);
  report.degenerate = report.hull_dimension < 3;
  for (const auto& v : chain.vertices) {
    const double d = convex_hull_distance(v.pos, spec.points);
    report.max_violation = std::max(report.max_violation, d);
  }
  report.inside = report.max_violation <= tol;
  if (report.inside) report.max_violation = 0.0;
  return report;
}

}  // namespace hplateau
