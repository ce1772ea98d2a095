#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "hplateau/chains.hpp"
#include "hplateau/errors.hpp"
#include "hplateau/rng.hpp"

using namespace hplateau;
using std::numbers::pi;

namespace {

const FiniteGroup& z2() {
  static const FiniteGroup g = rp2_group();
  return g;
}

const EnergyTable& table2() {
  static const EnergyTable t = class_energy_table(z2(), rp2_lengths(z2()), 2.0);
  return t;
}

Chain segment_chain(const Vec3& a, const Vec3& b) {
  Chain c;
  c.vertices = {{a, VertexKind::boundary}, {b, VertexKind::boundary}};
  c.edges = {{0, 1, 1}};
  return c;
}

// Star with a single interior vertex at `center` joined to every point.
Chain star(const Vec3& center, const std::vector<Vec3>& pts, const std::vector<int>& classes) {
  Chain c;
  for (const auto& p : pts) c.vertices.push_back({p, VertexKind::boundary});
  c.vertices.push_back({center, VertexKind::interior});
  const int s = static_cast<int>(pts.size());
  for (int i = 0; i < s; ++i) c.edges.push_back({i, s, classes[i]});
  return c;
}

}  // namespace

TEST(ValidateChain, TwoPointConnectionIsValid) {
  const Vec3 a(0, 0, -1), b(0, 0, 1);
  const BoundaryChargeSpec spec{{a, b}, {1, 1}};
  const ValidationReport r = validate_chain(segment_chain(a, b), spec, z2(), true);
  EXPECT_TRUE(r.valid());
  EXPECT_FALSE(r.necessary_only);
}

TEST(ValidateChain, TripleJunctionForbiddenForTwoElementGroup) {
  std::vector<Vec3> pts{{1, 0, 0}, {-0.5, std::sqrt(3.0) / 2, 0}, {-0.5, -std::sqrt(3.0) / 2, 0}};
  const BoundaryChargeSpec spec{pts, {1, 1, 1}};
  const ValidationReport r = validate_chain(star(Vec3::Zero(), pts, {1, 1, 1}), spec, z2(), true);
  EXPECT_FALSE(r.valid());
  EXPECT_TRUE(r.has(Violation::interior_flux));
}

TEST(ValidateChain, KleinFourDegreeFourJunctionBalances) {
  const FiniteGroup v4 = FiniteGroup::direct_product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2));
  std::vector<Vec3> pts{{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  const int a = v4.class_of(1), b = v4.class_of(2);
  const BoundaryChargeSpec spec{pts, {a, a, b, b}};
  EXPECT_TRUE(validate_chain(star(Vec3::Zero(), pts, {a, a, b, b}), spec, v4, true).valid());
  const int ab = v4.class_of(3);
  const BoundaryChargeSpec spec3{{pts[0], pts[1], pts[2]}, {a, b, ab}};
  EXPECT_TRUE(validate_chain(star(Vec3::Zero(), {pts[0], pts[1], pts[2]}, {a, b, ab}), spec3, v4, true).valid());
  const BoundaryChargeSpec bad{pts, {a, a, b, ab}};
  EXPECT_TRUE(validate_chain(star(Vec3::Zero(), pts, {a, a, b, ab}), bad, v4, true).has(Violation::interior_flux));
}

TEST(ValidateChain, NonabelianFluxIsNecessaryOnly) {
  const FiniteGroup s3 = FiniteGroup::symmetric3();
  std::vector<Vec3> pts{{1, 0, 0}, {-0.5, std::sqrt(3.0) / 2, 0}, {-0.5, -std::sqrt(3.0) / 2, 0}};
  int transp = -1;
  for (int c = 1; c < s3.class_count(); ++c)
    if (s3.class_members(c).size() == 3) transp = c;
  const int rot = transp == 1 ? 2 : 1;
  // transposition * transposition can be a rotation: three-way junction t, t, r is feasible.
  const BoundaryChargeSpec spec{pts, {transp, transp, rot}};
  const ValidationReport r = validate_chain(star(Vec3::Zero(), pts, {transp, transp, rot}), spec, s3, false);
  EXPECT_TRUE(r.necessary_only);
  EXPECT_TRUE(r.valid());
  const BoundaryChargeSpec spec2{pts, {transp, rot, rot}};
  EXPECT_TRUE(validate_chain(star(Vec3::Zero(), pts, {transp, rot, rot}), spec2, s3, false)
                  .has(Violation::interior_flux));
}

TEST(ValidateChain, ReportsStructuralViolations) {
  const Vec3 a(0, 0, -1), b(0, 0, 1);
  const BoundaryChargeSpec spec{{a, b}, {1, 1}};
  Chain c = segment_chain(a, b);
  c.edges[0].cls = 0;
  EXPECT_TRUE(validate_chain(c, spec, z2(), true).has(Violation::trivial_charge));
  c.edges[0].cls = 5;
  EXPECT_TRUE(validate_chain(c, spec, z2(), true).has(Violation::unknown_class));
  c.edges[0] = {0, 0, 1};
  EXPECT_TRUE(validate_chain(c, spec, z2(), true).has(Violation::bad_endpoint));
  Chain twin = segment_chain(a, b);
  twin.vertices.push_back({a, VertexKind::interior});
  twin.edges.push_back({0, 2, 1});
  EXPECT_TRUE(validate_chain(twin, spec, z2(), true).has(Violation::degenerate_edge));
  c.edges[0] = {0, 4, 1};
  EXPECT_TRUE(validate_chain(c, spec, z2(), true).has(Violation::bad_endpoint));

  // Dangling interior endpoint.
  Chain d = segment_chain(a, b);
  d.vertices.push_back({Vec3(0.5, 0, 0), VertexKind::interior});
  d.vertices.push_back({Vec3(0.5, 0, 0.5), VertexKind::interior});
  d.edges.push_back({2, 3, 1});
  EXPECT_TRUE(validate_chain(d, spec, z2(), true).has(Violation::interior_endpoint));

  // Crossing segments.
  const Vec3 e(-1, 0, 0), f(1, 0, 0);
  const BoundaryChargeSpec spec4{{a, b, e, f}, {1, 1, 1, 1}};
  Chain x;
  x.vertices = {{a, VertexKind::boundary}, {b, VertexKind::boundary}, {e, VertexKind::boundary}, {f, VertexKind::boundary}};
  x.edges = {{0, 1, 1}, {2, 3, 1}};
  EXPECT_TRUE(validate_chain(x, spec4, z2(), true).has(Violation::segments_intersect));

  // Boundary vertex that is not a spec point, and an unconnected spec point.
  Chain y = segment_chain(a, Vec3(0, 1, 0));
  const ValidationReport ry = validate_chain(y, spec, z2(), true);
  EXPECT_TRUE(ry.has(Violation::boundary_vertex_off_spec));
  EXPECT_TRUE(ry.has(Violation::spec_point_unconnected));
}

TEST(ValidateChain, BoundaryFluxMismatch) {
  const FiniteGroup z3 = FiniteGroup::cyclic(3);
  const Vec3 a(0, 0, -1), b(0, 0, 1);
  // Edge a -> b with class 1 is seen as class 2 at b.
  const BoundaryChargeSpec good{{a, b}, {1, 2}};
  const BoundaryChargeSpec bad{{a, b}, {1, 1}};
  EXPECT_TRUE(validate_chain(segment_chain(a, b), good, z3, true).valid());
  EXPECT_TRUE(validate_chain(segment_chain(a, b), bad, z3, true).has(Violation::boundary_flux));
}

TEST(ChainMass, Examples) {
  const Vec3 a(0, 0, -1), b(0, 0, 1);
  EXPECT_NEAR(chain_mass(segment_chain(a, b), table2()).total_mass, pi, 1e-12);
  EXPECT_EQ(chain_mass(Chain{}, table2()).total_mass, 0.0);
  Chain two;
  two.vertices = {{Vec3(0, 0, 0), VertexKind::boundary}, {Vec3(1, 0, 0), VertexKind::boundary},
                  {Vec3(0, 1, 0), VertexKind::boundary}, {Vec3(1, 1, 0), VertexKind::boundary}};
  two.edges = {{0, 1, 1}, {2, 3, 1}};
  const MassReport m = chain_mass(two, table2());
  EXPECT_NEAR(m.total_mass, pi, 1e-12);
  ASSERT_EQ(m.per_edge.size(), 2u);
  double sum = 0.0;
  for (const auto& e : m.per_edge) {
    EXPECT_NEAR(e.contribution, e.weight * e.length, 1e-15);
    sum += e.contribution;
  }
  EXPECT_DOUBLE_EQ(sum, m.total_mass);
  Chain bad = segment_chain(a, b);
  bad.edges[0].cls = 3;
  EXPECT_THROW(chain_mass(bad, table2()), Error);
}

TEST(ChainMass, SubdivisionAndDilation) {
  CounterRng rng(1, "mass");
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 a(rng.normal(), rng.normal(), rng.normal());
    const Vec3 b(rng.normal(), rng.normal(), rng.normal());
    const Chain c = segment_chain(a, b);
    const double t = rng.uniform(0.1, 0.9);
    Chain sub;
    sub.vertices = {{a, VertexKind::boundary}, {b, VertexKind::boundary}, {a + t * (b - a), VertexKind::interior}};
    sub.edges = {{0, 2, 1}, {2, 1, 1}};
    const double m = chain_mass(c, table2()).total_mass;
    EXPECT_NEAR(chain_mass(sub, table2()).total_mass, m, 1e-12 * m);
    const double s = rng.uniform(0.2, 5.0);
    Chain dil = c;
    for (auto& v : dil.vertices) v.pos *= s;
    EXPECT_NEAR(chain_mass(dil, table2()).total_mass, s * m, 1e-12 * s * m);
  }
}

TEST(BalanceResiduals, StraightAndBentDegreeTwo) {
  Chain c;
  c.vertices = {{Vec3(-1, 0, 0), VertexKind::boundary}, {Vec3(1, 0, 0), VertexKind::boundary},
                {Vec3(0.3, 0, 0), VertexKind::interior}};
  c.edges = {{0, 2, 1}, {2, 1, 1}};
  EXPECT_NEAR(balance_residuals(c, table2()).max_residual, 0.0, 1e-15);
  c.vertices[1].pos = Vec3(0.3, 1, 0);
  EXPECT_NEAR(balance_residuals(c, table2()).max_residual, pi / 2 * std::sqrt(2.0), 1e-12);
}

TEST(BalanceResiduals, FermatPointOfEquilateralTriangle) {
  const FiniteGroup z3 = FiniteGroup::cyclic(3);
  const EnergyTable t = class_energy_table(z3, LengthSpectrum::create(z3, {0.0, 2.0, 2.0}), 2.0);
  std::vector<Vec3> pts{{1, 0, 0}, {-0.5, std::sqrt(3.0) / 2, 0}, {-0.5, -std::sqrt(3.0) / 2, 0}};
  const Chain s = star(Vec3::Zero(), pts, {1, 1, 1});
  EXPECT_LE(balance_residuals(s, t).max_residual, 1e-9);
}

TEST(BalanceResiduals, RotationInvariant) {
  const FiniteGroup z3 = FiniteGroup::cyclic(3);
  const EnergyTable t = class_energy_table(z3, LengthSpectrum::create(z3, {0.0, 2.0, 2.0}), 2.0);
  CounterRng rng(2, "rot");
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 3; ++i) pts.emplace_back(rng.normal(), rng.normal(), rng.normal());
    const Vec3 c(rng.normal() * 0.1, rng.normal() * 0.1, rng.normal() * 0.1);
    const Chain s = star(c, pts, {1, 1, 1});
    const Eigen::Matrix3d R =
        Eigen::AngleAxisd(rng.uniform(0, 2 * pi), Vec3(rng.normal(), rng.normal(), rng.normal()).normalized())
            .toRotationMatrix();
    Chain r = s;
    for (auto& v : r.vertices) v.pos = R * v.pos;
    EXPECT_NEAR(balance_residuals(s, t).max_residual, balance_residuals(r, t).max_residual, 1e-12);
  }
}

TEST(ConvexHull, Examples) {
  const Vec3 a(0, 0, -1), b(0, 0, 1);
  const BoundaryChargeSpec spec{{a, b}, {1, 1}};
  const HullReport h = convex_hull_containment(segment_chain(a, b), spec);
  EXPECT_TRUE(h.inside);
  EXPECT_TRUE(h.degenerate);
  EXPECT_EQ(h.hull_dimension, 1);

  const std::vector<Vec3> sq{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const BoundaryChargeSpec spec4{sq, {1, 1, 1, 1}};
  Chain c;
  for (const auto& p : sq) c.vertices.push_back({p, VertexKind::boundary});
  c.vertices.push_back({Vec3(0.5, 0.5, 0), VertexKind::interior});
  c.edges = {{0, 4, 1}, {1, 4, 1}, {2, 4, 1}, {3, 4, 1}};
  const HullReport in = convex_hull_containment(c, spec4);
  EXPECT_TRUE(in.inside);
  EXPECT_EQ(in.hull_dimension, 2);

  c.vertices[4].pos = Vec3(1.1, 0.5, 0);
  const HullReport out = convex_hull_containment(c, spec4);
  EXPECT_FALSE(out.inside);
  EXPECT_NEAR(out.max_violation, 0.1, 1e-12);
}

TEST(ChainIo, JsonRoundTrip) {
  Chain c;
  c.vertices = {{Vec3(0.1, -0.2, 0.3), VertexKind::boundary}, {Vec3(1.0 / 3.0, 2, 3), VertexKind::interior}};
  c.edges = {{0, 1, 1}};
  c.provenance = "solver";
  const Chain back = chain_from_json(chain_to_json(c));
  ASSERT_EQ(back.vertices.size(), 2u);
  EXPECT_EQ(back.vertices[1].pos, c.vertices[1].pos);
  EXPECT_EQ(back.vertices[1].kind, VertexKind::interior);
  EXPECT_EQ(back.edges[0].cls, 1);
  EXPECT_EQ(back.provenance, "solver");
  EXPECT_THROW(chain_from_json("{\"vertices\": 3}"), Error);
}

TEST(ChainIo, SpecCsv) {
  std::istringstream in("x,y,z,class\n# comment\n0,0,1,1\n\n0,0,-1,1\n");
  const BoundaryChargeSpec s = read_spec_csv(in);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.points[1], Vec3(0, 0, -1));
  std::ostringstream out;
  write_spec_csv(out, s);
  std::istringstream again(out.str());
  EXPECT_EQ(read_spec_csv(again).points, s.points);
  std::istringstream bad("0,0,1\n");
  EXPECT_THROW(read_spec_csv(bad), Error);
}

TEST(CheckSpec, RejectsDegenerateInput) {
  EXPECT_THROW(check_spec({{Vec3(0, 0, 1), Vec3(0, 0, 1)}, {1, 1}}, z2()), Error);
  EXPECT_THROW(check_spec({{Vec3(0, 0, 1), Vec3(0, 0, -1)}, {1, 0}}, z2()), Error);
  EXPECT_THROW(check_spec({{Vec3(0, 0, 1), Vec3(0, 0, -1)}, {1, 2}}, z2()), Error);
  EXPECT_NO_THROW(check_spec({{Vec3(0, 0, 1), Vec3(0, 0, -1)}, {1, 1}}, z2()));
}
