#pragma once

// Admissible chains: finite networks of straight segments carrying homotopy
// classes, with validation, mass and stationarity diagnostics.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hplateau/geometry.hpp"
#include "hplateau/group_algebra.hpp"

namespace hplateau {

enum class VertexKind { boundary, interior };

struct ChainVertex {
  Vec3 pos = Vec3::Zero();
  VertexKind kind = VertexKind::interior;
};

// Oriented edge u -> v. Its class is the charge seen leaving u; at v the
// inverse class is seen.
struct ChainEdge {
  int u = 0;
  int v = 0;
  int cls = 1;
  bool operator==(const ChainEdge&) const = default;
};

struct Chain {
  std::vector<ChainVertex> vertices;
  std::vector<ChainEdge> edges;
  std::string provenance;  // "solver", "extracted-from-simulation", or empty

  Segment segment(std::size_t e) const {
    return {vertices[edges[e].u].pos, vertices[edges[e].v].pos};
  }
  std::vector<Segment> segments() const;
  std::vector<int> degrees() const;
  bool empty() const { return edges.empty(); }
};

// Boundary defects: points on the domain boundary with the class of the
// boundary datum around each of them.
struct BoundaryChargeSpec {
  std::vector<Vec3> points;
  std::vector<int> classes;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Rejects coincident points, trivial classes and class ids outside the group.
void check_spec(const BoundaryChargeSpec& spec, const FiniteGroup& group);

// 1e-9 times the diameter of the chain vertices together with the spec points.
double geometric_tolerance(const Chain& chain, const BoundaryChargeSpec& spec);

enum class Violation {
  bad_endpoint,
  degenerate_edge,
  trivial_charge,
  unknown_class,
  segments_intersect,
  interior_endpoint,
  interior_flux,
  boundary_flux,
  boundary_vertex_off_spec,
  spec_point_unconnected,
};

std::string_view to_string(Violation v) noexcept;

struct ValidationIssue {
  Violation kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  // Set for nonabelian groups, where only a necessary flux condition is checked.
  bool necessary_only = false;

  bool valid() const { return issues.empty(); }
  bool has(Violation kind) const;
};

// Whether charges seen leaving a vertex can multiply to the target class.
// Exact for abelian groups; for nonabelian groups this is the necessary
// condition that some ordered product of representatives lies in the target.
bool flux_reaches(const FiniteGroup& group, std::span<const int> outgoing, int target, bool abelian);

// Checks the admissibility properties: positive edge lengths, pairwise
// disjoint open segments, no endpoints in the interior, nontrivial charges,
// and flux balance (trivial at interior vertices, the declared class at
// boundary points).
ValidationReport validate_chain(const Chain& chain, const BoundaryChargeSpec& spec,
                                const FiniteGroup& group, bool abelian);

struct EdgeMass {
  int edge = 0;
  double weight = 0.0;
  double length = 0.0;
  double contribution = 0.0;
};

struct MassReport {
  double total_mass = 0.0;
  std::vector<EdgeMass> per_edge;
};

// Sum over edges of E^sg_2(class) * length. `table` must be tabulated at p = 2.
MassReport chain_mass(const Chain& chain, const EnergyTable& table);

struct VertexResidual {
  int vertex = 0;
  double residual = 0.0;
};

struct BalanceReport {
  std::vector<VertexResidual> residuals;  // interior vertices only
  double max_residual = 0.0;
};

// Norm of sum_i w_i v_i at each interior vertex, with v_i the unit direction
// of incident edge i leaving the vertex and w_i its E^sg_2 weight.
BalanceReport balance_residuals(const Chain& chain, const EnergyTable& table);

struct HullReport {
  bool inside = true;
  double max_violation = 0.0;
  int hull_dimension = 0;
  bool degenerate = false;  // spec points are collinear or coplanar
};

// tol < 0 selects the geometric tolerance of the chain and spec.
HullReport convex_hull_containment(const Chain& chain, const BoundaryChargeSpec& spec,
                                   double tol = -1.0);

// Chain JSON: {"vertices":[{"x","y","z","kind"}], "edges":[{"u","v","class"}]}.
std::string chain_to_json(const Chain& chain, int indent = 2);
Chain chain_from_json(const std::string& text);
Chain read_chain_file(const std::string& path);

// Spec CSV: one `x,y,z,class_id` row per point; blank lines, '#' comments and
// a non-numeric header row are skipped.
BoundaryChargeSpec read_spec_csv(std::istream& in);
BoundaryChargeSpec read_spec_csv_file(const std::string& path);
void write_spec_csv(std::ostream& out, const BoundaryChargeSpec& spec);

}  // namespace hplateau
