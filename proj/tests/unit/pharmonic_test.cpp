#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include <gtest/gtest.h>

#include "hplateau/boundary_data.hpp"
#include "hplateau/errors.hpp"
#include "hplateau/pharmonic.hpp"
#include "hplateau/rng.hpp"

using namespace hplateau;
using std::numbers::pi;

namespace {

Ambient phase(double theta) {
  Ambient v(2);
  v << std::cos(theta), std::sin(theta);
  return v;
}

GridMap filled(const Domain& d, int n, int nu, const Datum& datum) {
  GridMap g = GridMap::create(d, n, nu);
  g.fill(datum);
  return g;
}

// Discrete energy of the linear phase cos/sin(k x1) on a cube: every active
// cell has |D_h u| = 2 sin(k h / 2) / h exactly.
double discrete_phase_energy(const GridMap& g, double k, double p) {
  const double s = 2.0 * std::sin(0.5 * k * g.h()) / g.h();
  return g.domain().volume() * std::pow(s, p) / p;
}

Ambient random_rp2(CounterRng& rng) {
  return Rp2Target::from_director(Vec3(rng.normal(), rng.normal(), rng.normal()));
}

}  // namespace

TEST(Rp2TargetTest, ProjectionAndTangents) {
  const Rp2Target t;
  CounterRng rng(1, "rp2");
  for (int trial = 0; trial < 50; ++trial) {
    const Ambient y = random_rp2(rng);
    EXPECT_NEAR((t.project(y) - y).norm(), 0.0, 1e-14);
    Ambient v(5);
    for (int i = 0; i < 5; ++i) v[i] = rng.normal();
    const Ambient x = y + 0.3 * t.reach() * v.normalized();
    const Ambient px = t.project(x);
    EXPECT_NEAR((t.project(px) - px).norm(), 0.0, 1e-13);
    EXPECT_NEAR((x - px).norm(), t.distance(x.data()), 1e-12);
    // The nearest point is not beaten by nearby manifold points.
    for (int k = 0; k < 5; ++k) {
      const Ambient q = t.project(Ambient(px + 0.05 * t.tangent_project(px, Ambient::Random(5))));
      EXPECT_GE((x - q).norm(), (x - px).norm() - 1e-12);
    }
    const Ambient pv = t.tangent_project(y, v);
    EXPECT_NEAR((t.tangent_project(y, pv) - pv).norm(), 0.0, 1e-13);
    Ambient w(5);
    for (int i = 0; i < 5; ++i) w[i] = rng.normal();
    EXPECT_NEAR((t.tangent_project(y, Ambient(2.0 * v - 3.0 * w)) - (2.0 * pv - 3.0 * t.tangent_project(y, w))).norm(),
                0.0, 1e-13);
    EXPECT_NEAR(pv.dot(v - pv), 0.0, 1e-12);
  }
}

TEST(Rp2TargetTest, EmbeddingAndGeodesicLength) {
  const Vec3 n = Vec3(1, 2, 3).normalized();
  const Eigen::Matrix3d m = Rp2Target::to_matrix(Rp2Target::from_director(n).data());
  EXPECT_NEAR((m - (n * n.transpose() - Eigen::Matrix3d::Identity() / 3.0)).norm(), 0.0, 1e-14);
  // Closed geodesic n(t) = (cos t/2, sin t/2, 0), t in [0, 2 pi], sampled finely.
  double len = 0.0;
  const int m_steps = 20000;
  for (int s = 0; s < m_steps; ++s) {
    const double t0 = 2 * pi * s / m_steps, t1 = 2 * pi * (s + 1) / m_steps;
    len += (Rp2Target::from_director(Vec3(std::cos(t0 / 2), std::sin(t0 / 2), 0)) -
            Rp2Target::from_director(Vec3(std::cos(t1 / 2), std::sin(t1 / 2), 0)))
               .norm();
  }
  EXPECT_NEAR(len, std::sqrt(2.0) * pi, 1e-6);
  EXPECT_NEAR(len, rp2_lengths(rp2_group())[1], 1e-6);
}

TEST(Rp2TargetTest, LoopClass) {
  const Rp2Target t;
  std::vector<Ambient> trivial, half, full;
  for (int s = 0; s < 64; ++s) {
    const double a = 2 * pi * s / 64;
    trivial.push_back(Rp2Target::from_director(Vec3(1, 0.2 * std::cos(a), 0.2 * std::sin(a))));
    half.push_back(Rp2Target::from_director(Vec3(std::cos(a / 2), std::sin(a / 2), 0)));
    full.push_back(Rp2Target::from_director(Vec3(std::cos(a), std::sin(a), 0)));
  }
  EXPECT_EQ(t.loop_class(trivial), 0);
  EXPECT_EQ(t.loop_class(half), 1);
  EXPECT_EQ(t.loop_class(full), 0);
  std::vector<Ambient> coarse{half[0], half[21], half[42]};
  EXPECT_THROW(t.loop_class(coarse), Error);
}

TEST(CircleTargetTest, WindingAndProjection) {
  const CircleTarget t;
  std::vector<Ambient> w2;
  for (int s = 0; s < 50; ++s) w2.push_back(phase(-4 * pi * s / 50));
  EXPECT_EQ(t.loop_class(w2), -2);
  Ambient x(2);
  x << 3.0, 4.0;
  EXPECT_NEAR((t.project(x) - phase(std::atan2(4.0, 3.0))).norm(), 0.0, 1e-15);
  EXPECT_NEAR(t.distance(x.data()), 4.0, 1e-15);
  EXPECT_THROW(make_target("torus"), Error);
}

TEST(GridTest, LayoutAndMasks) {
  const GridMap g = GridMap::create(Domain::ball(Vec3::Zero(), 1.0), 16, 5);
  EXPECT_NEAR(g.h(), 2.0 / 13.0, 1e-15);
  EXPECT_GT(g.count(NodeKind::inside), 0u);
  EXPECT_GT(g.count(NodeKind::boundary), 0u);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (g.kind(i) != NodeKind::boundary) continue;
    EXPECT_FALSE(g.domain().contains(g.position(i)));
    EXPECT_LE(std::abs(g.domain().boundary_distance(g.position(i))), 2.0 * g.h());
  }
  EXPECT_THROW(GridMap::create(Domain::ball(Vec3::Zero(), 1.0), 7, 5), Error);
  const GridMap c = GridMap::create(Domain::cube(Vec3::Zero(), 0.5), 12, 2);
  std::size_t active = 0;
  for (std::size_t i = 0; i < c.node_count(); ++i) active += c.cell_active(i);
  // Active cells tile the cube exactly.
  EXPECT_NEAR(active * std::pow(c.h(), 3), 1.0, 1e-12);
}

TEST(PEnergy, ConstantMapIsZero) {
  const GridMap g = filled(Domain::ball(Vec3::Zero(), 1.0), 12, 5,
                           [](const Vec3&) { return Rp2Target::from_director(Vec3::UnitZ()); });
  EXPECT_EQ(p_energy(g, Rp2Target(), 1.5), 0.0);
  const EnergyMeasure m = energy_measure(g, 1.5);
  for (double d : m.density) EXPECT_EQ(d, 0.0);
}

TEST(PEnergy, LinearPhaseOnUnitCube) {
  const double k = 2.0;
  const Domain cube = Domain::cube(Vec3::Zero(), 0.5);
  auto datum = [k](const Vec3& x) { return phase(k * x.x()); };
  double err_prev = 0.0;
  for (int n : {13, 23}) {
    const GridMap g = filled(cube, n, 2, datum);
    const double e2 = p_energy(g, CircleTarget(), 2.0);
    const double e1 = p_energy(g, CircleTarget(), 1.0);
    EXPECT_NEAR(e2, discrete_phase_energy(g, k, 2.0), 1e-12);
    EXPECT_NEAR(e1, discrete_phase_energy(g, k, 1.0), 1e-12);
    const double err = std::abs(e2 / (k * k / 2.0) - 1.0);
    EXPECT_LE(err, k * k * g.h() * g.h() / 12.0 * 1.01);
    EXPECT_LE(std::abs(e1 / k - 1.0), k * k * g.h() * g.h() / 24.0 * 1.01);
    if (err_prev > 0.0) EXPECT_NEAR(err_prev / err, 4.0, 0.3);
    err_prev = err;
  }
}

TEST(PEnergy, OffManifoldValuesRejected) {
  GridMap g = filled(Domain::cube(Vec3::Zero(), 0.5), 10, 2, [](const Vec3&) { return phase(0.3); });
  g.value(g.index(4, 4, 4))[0] *= 1.1;
  try {
    p_energy(g, CircleTarget(), 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::off_manifold_value);
  }
}

TEST(EnergyMeasureTest, LinearPhaseTotalAndAdditivity) {
  const GridMap g = filled(Domain::cube(Vec3::Zero(), 0.5), 23, 2, [](const Vec3& x) { return phase(pi * x.x()); });
  const EnergyMeasure m = energy_measure(g, 1.5);
  EXPECT_NEAR(m.total, 0.5 * std::pow(pi, 1.5) / 1.5, 0.5 * std::pow(pi, 1.5) / 1.5 * 0.01);
  EXPECT_NEAR(m.total, 0.5 * p_energy(g, CircleTarget(), 1.5), 1e-12);
  double lower = 0.0, upper = 0.0;
  for (std::size_t c = 0; c < m.density.size(); ++c) {
    EXPECT_GE(m.density[c], 0.0);
    (m.centers[c].z() < 0.0 ? lower : upper) += m.density[c];
  }
  EXPECT_NEAR(lower + upper, m.total, 1e-12);
}

TEST(Gradient, MatchesFiniteDifferences) {
  CounterRng rng(5, "fd");
  const Rp2Target rp2;
  const CircleTarget circle;
  for (double p : {1.3, 1.7, 2.0}) {
    for (int which = 0; which < 2; ++which) {
      const TargetManifold& t = which == 0 ? static_cast<const TargetManifold&>(rp2) : circle;
      const int nu = t.ambient_dim();
      GridMap u = GridMap::create(Domain::ball(Vec3::Zero(), 1.0), 10, nu);
      u.fill([&](const Vec3& x) {
        if (nu == 2) return phase(1.3 * x.x() + 0.7 * x.y() * x.z() + 0.4 * x.z());
        return Rp2Target::from_director(Vec3(1.0 + 0.5 * x.x(), std::sin(x.y() + x.z()), 0.3 + x.x() * x.z()));
      });
      for (std::size_t i = 0; i < u.node_count(); ++i) {
        if (u.kind(i) == NodeKind::outside) continue;
        Ambient v(nu);
        for (int a = 0; a < nu; ++a) v[a] = 0.2 * rng.normal();
        t.project(Ambient(u.value_vector(i) + v).data(), u.value(i));
      }
      std::vector<double> grad;
      p_energy_gradient(u, p, grad);
      int checked = 0;
      for (std::size_t i = 0; i < u.node_count() && checked < 40; i += 7) {
        if (u.kind(i) != NodeKind::inside) continue;
        const Ambient x0 = u.value_vector(i);
        Ambient dir(nu);
        for (int a = 0; a < nu; ++a) dir[a] = rng.normal();
        dir = t.tangent_project(x0, dir).normalized();
        const Ambient g = t.tangent_project(x0, Eigen::Map<const Ambient>(grad.data() + i * nu, nu));
        const double analytic = g.dot(dir);
        const double step = 1e-6;
        auto energy_at = [&](double s) {
          t.project(Ambient(x0 + s * dir).data(), u.value(i));
          return p_energy_unchecked(u, p);
        };
        const double fd = (energy_at(step) - energy_at(-step)) / (2 * step);
        Eigen::Map<Ambient>(u.value(i), nu) = x0;
        EXPECT_NEAR(analytic, fd, 1e-6 * std::max(1.0, std::abs(fd))) << t.name() << " p=" << p;
        ++checked;
      }
      EXPECT_GE(checked, 10);
    }
  }
}

TEST(Stress, CellwiseIdentities) {
  CounterRng rng(8, "stress");
  GridMap u = GridMap::create(Domain::ball(Vec3::Zero(), 1.0), 10, 5);
  for (std::size_t i = 0; i < u.node_count(); ++i) {
    const Ambient v = random_rp2(rng);
    std::copy(v.data(), v.data() + 5, u.value(i));
  }
  GridMap line = GridMap::create(Domain::cube(Vec3::Zero(), 0.5), 10, 2);
  line.fill([](const Vec3& x) { return phase(2.0 * x.x()); });
  for (double p : {1.2, 1.5, 1.9, 2.0}) {
    for (const auto& s : stress_field(u, p)) {
      const double a = std::pow(s.grad_norm, p);
      const Eigen::MatrixXd du = cell_gradient(u, s.cell);
      EXPECT_NEAR((s.T - s.T.transpose()).norm(), 0.0, 1e-12 * a);
      EXPECT_NEAR(s.T.trace(), (3.0 - p) / p * a, 1e-12 * a);
      const Eigen::Matrix3d G = du.transpose() * du;
      const double frob2 = 3 * a * a / (p * p) - 2 * a * a / p + std::pow(s.grad_norm, 2 * p - 4) * G.squaredNorm();
      EXPECT_NEAR(s.T.squaredNorm(), frob2, 1e-10 * a * a);
      EXPECT_LE(s.T.norm(), std::sqrt(3 - 2 * p + p * p) * a / p * (1 + 1e-12));
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(s.T);
      EXPECT_LE(es.eigenvalues().maxCoeff(), a / p * (1 + 1e-12));
    }
    // Rank-one gradients: the closed-form Frobenius norm.
    int rank_one = 0;
    for (const auto& s : stress_field(line, p)) {
      if (s.rank != 1) continue;
      ++rank_one;
      const double a = std::pow(s.grad_norm, p);
      EXPECT_NEAR(s.T.norm(), std::sqrt(3 - 2 * p + p * p) * a / p, 1e-12 * a);
    }
    EXPECT_GT(rank_one, 100);
  }
}

TEST(Minimize, ConstantBoundaryGivesConstantMap) {
  GridMap g = GridMap::create(Domain::ball(Vec3::Zero(), 1.0), 12, 5);
  g.fill([](const Vec3&) { return Rp2Target::from_director(Vec3(1, 1, 0)); });
  const MinimizeResult r = minimize(g, Rp2Target(), 1.7);
  EXPECT_LE(r.energy, 1e-20);
  EXPECT_TRUE(r.converged);
}

TEST(Minimize, EnergyDecreasesAndBoundaryStaysFixed) {
  const BoundaryField f = rp2_pair_datum(Vec3(0, 0, -1), Vec3(0, 0, 1), Domain::ball(Vec3::Zero(), 1.0), 14);
  MinimizeOptions opts;
  opts.record_history = true;
  const Rp2Target t;
  const MinimizeResult r = minimize(f.grid, t, 1.8, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.grad_norm, opts.tol * r.grad_norm0);
  for (std::size_t k = 1; k < r.energy_history.size(); ++k)
    EXPECT_LE(r.energy_history[k], r.energy_history[k - 1] * (1 + 1e-13));
  for (std::size_t i = 0; i < f.grid.node_count(); ++i)
    if (f.grid.kind(i) == NodeKind::boundary)
      for (int a = 0; a < 5; ++a) ASSERT_EQ(r.u.value(i)[a], f.grid.value(i)[a]);
  EXPECT_NO_THROW(check_on_manifold(r.u, t, 1e-12));
}

TEST(Minimize, RestartsAreSeeded) {
  const BoundaryField f = rp2_pair_datum(Vec3(0, 0, -1), Vec3(0, 0, 1), Domain::ball(Vec3::Zero(), 1.0), 12);
  MinimizeOptions opts;
  opts.restarts = 2;
  opts.seed = 42;
  const MinimizeResult a = minimize(f.grid, Rp2Target(), 1.8, opts);
  const MinimizeResult b = minimize(f.grid, Rp2Target(), 1.8, opts);
  EXPECT_EQ(a.u.values(), b.u.values());
  opts.restarts = 0;
  const MinimizeResult c = minimize(f.grid, Rp2Target(), 1.8, opts);
  EXPECT_LE(a.energy, c.energy * (1 + 1e-9));
}

TEST(Minimize, CircleHarmonicMapOnCube) {
  const Domain cube = Domain::cube(Vec3::Zero(), 0.5);
  GridMap g = GridMap::create(cube, 35, 2);
  g.fill([](const Vec3& x) { return phase(pi * x.x()); });
  // Scramble the interior so the solver has work to do.
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (g.kind(i) == NodeKind::inside) {
      const Vec3 x = g.position(i);
      const Ambient v = phase(pi * x.x() + 0.5 * std::sin(3 * x.y()) * std::cos(2 * x.z()));
      std::copy(v.data(), v.data() + 2, g.value(i));
    }
  MinimizeOptions opts;
  opts.harmonic_init = false;
  const MinimizeResult r = minimize(g, CircleTarget(), 2.0, opts);
  EXPECT_NEAR(r.energy, pi * pi / 2.0, 0.02 * pi * pi / 2.0);
}

TEST(Divergence, ConstantMapIsExact) {
  GridMap g = GridMap::create(Domain::cube(Vec3::Zero(), 0.5), 12, 2);
  g.fill([](const Vec3&) { return phase(0.4); });
  EXPECT_EQ(stress_divergence_residual(g, 1.6).max_residual, 0.0);
}

TEST(Divergence, FirstOrderDecayOnHarmonicPhase) {
  auto datum = [](const Vec3& x) { return phase(0.8 * (x.x() * x.x() - x.y() * x.y())); };
  const Domain cube = Domain::cube(Vec3::Zero(), 0.5);
  GridMap coarse = GridMap::create(cube, 19, 2);
  coarse.fill(datum);
  GridMap fine = GridMap::create(cube, 35, 2);
  fine.fill(datum);
  const double rc = stress_divergence_residual(coarse, 2.0, 0.1).max_residual;
  const double rf = stress_divergence_residual(fine, 2.0, 0.1).max_residual;
  EXPECT_GT(rc, 0.0);
  EXPECT_GE(rc / rf, 1.6);
  EXPECT_LE(rc / rf, 2.6);
  // Negative control: a random field has an O(1) residual.
  CounterRng rng(3, "noise");
  GridMap noise = GridMap::create(cube, 19, 2);
  for (std::size_t i = 0; i < noise.node_count(); ++i) {
    const Ambient v = phase(rng.uniform(0, 2 * pi));
    std::copy(v.data(), v.data() + 2, noise.value(i));
  }
  EXPECT_GT(stress_divergence_residual(noise, 2.0, 0.1).max_residual, 100.0 * rc);
}

TEST(Monotonicity, ConstantAndHomogeneousFields) {
  const Domain ball = Domain::ball(Vec3::Zero(), 1.0);
  const std::vector<double> radii{0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  GridMap c = GridMap::create(ball, 14, 5);
  c.fill([](const Vec3&) { return Rp2Target::from_director(Vec3::UnitX()); });
  for (double v : monotonicity_profile(c, 1.5, Vec3::Zero(), radii)) EXPECT_EQ(v, 0.0);

  // n = x / |x| is 0-homogeneous, so r^(p-3) E(B_r) is constant.
  GridMap hedgehog = GridMap::create(ball, 44, 5);
  hedgehog.fill([](const Vec3& x) {
    return Rp2Target::from_director(x.norm() > 0 ? Vec3(x) : Vec3::UnitZ());
  });
  const double p = 1.5;
  const auto prof = monotonicity_profile(hedgehog, p, Vec3::Zero(), radii);
  // Continuum value: |D(n n^T)|^2 = 4 / r^2, so E(B_r) = 4 pi 2^p r^(3-p) / ((3-p) p).
  const double exact = 4 * pi * std::pow(2.0, p) / ((3 - p) * p);
  for (double v : prof) EXPECT_NEAR(v / exact, 1.0, 2.0 * hedgehog.h() / radii.front());
  try {
    monotonicity_profile(hedgehog, p, Vec3(0.5, 0, 0), radii);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ball_outside_domain);
  }
}

TEST(EtaMapTest, Limits) {
  const Domain ball = Domain::ball(Vec3::Zero(), 1.0);
  GridMap c = GridMap::create(ball, 14, 5);
  c.fill([](const Vec3&) { return Rp2Target::from_director(Vec3::UnitX()); });
  const EtaMap m = eta_regularity_map(c, 1.8, 0.2, 3 * c.h());
  EXPECT_EQ(m.suspect_count, 0);
  GridMap s = GridMap::create(ball, 14, 5);
  s.fill([](const Vec3& x) { return Rp2Target::from_director(Vec3(std::cos(2 * x.x()), std::sin(2 * x.x()), 0.1)); });
  const EtaMap all = eta_regularity_map(s, 1.8, 1e-12, 3 * s.h());
  EXPECT_EQ(all.regular_count, 0);
  EXPECT_GT(all.suspect_count, 0);
  EXPECT_THROW(eta_regularity_map(s, 2.0, 0.2, 3 * s.h()), Error);
}

TEST(Extraction, ZeroMeasureGivesNothing) {
  GridMap g = GridMap::create(Domain::ball(Vec3::Zero(), 1.0), 14, 5);
  g.fill([](const Vec3&) { return Rp2Target::from_director(Vec3::UnitX()); });
  const Extraction ex = extract_singular_set(energy_measure(g, 1.8), g);
  EXPECT_TRUE(ex.no_concentration);
  EXPECT_TRUE(ex.chain.empty());
}

TEST(Extraction, SyntheticTubeIsRecovered) {
  GridMap g = GridMap::create(Domain::ball(Vec3::Zero(), 1.0), 24, 5);
  g.fill([](const Vec3&) { return Rp2Target::from_director(Vec3::UnitX()); });
  EnergyMeasure m = energy_measure(g, 1.8);
  const Segment seg{Vec3(-0.6, -0.3, -0.5), Vec3(0.5, 0.4, 0.6)};
  const double tube = 1.5 * g.h();
  double inside = 0;
  for (std::size_t c = 0; c < m.density.size(); ++c)
    if (m.active[c] && point_segment_distance(m.centers[c], seg.a, seg.b) <= tube) inside += 1;
  for (std::size_t c = 0; c < m.density.size(); ++c)
    if (m.active[c] && point_segment_distance(m.centers[c], seg.a, seg.b) <= tube)
      m.density[c] = pi / 2 * seg.length() / inside;
  m.total = pi / 2 * seg.length();
  const Extraction ex = extract_singular_set(m, g);
  ASSERT_EQ(ex.chain.edges.size(), 1u);
  const std::vector<Segment> want{seg};
  // Ends blur by the averaging radius.
  EXPECT_LE(hausdorff_distance(ex.chain.segments(), want, 0.1 * g.h()), ExtractOptions{}.ball_cells * g.h());

  const EnergyTable table = class_energy_table(rp2_group(), rp2_lengths(rp2_group()), 2.0);
  const DensityEstimate d = segment_density(m, seg, table, tube);
  EXPECT_NEAR(d.theta, pi / 2, 1e-12);
  EXPECT_EQ(d.nearest_class, 1);
  EXPECT_NEAR(d.relative_gap, 0.0, 1e-12);

  EnergyMeasure zero = energy_measure(g, 1.8);
  const DensityEstimate z = segment_density(zero, seg, table, tube);
  EXPECT_EQ(z.theta, 0.0);
  EXPECT_EQ(z.nearest_class, -1);
}

TEST(Extraction, LatticeRotationEquivariance) {
  const Domain ball = Domain::ball(Vec3::Zero(), 1.0);
  auto extract = [&](const Vec3& a, const Vec3& b) {
    const BoundaryField f = rp2_pair_datum(a, b, ball, 16);
    const MinimizeResult r = minimize(f.grid, Rp2Target(), 1.8);
    return extract_singular_set(energy_measure(r.u, 1.8), r.u);
  };
  const Extraction ez = extract(Vec3(0, 0, -1), Vec3(0, 0, 1));
  const Extraction ex = extract(Vec3(-1, 0, 0), Vec3(1, 0, 0));
  ASSERT_EQ(ez.chain.edges.size(), 1u);
  ASSERT_EQ(ex.chain.edges.size(), 1u);
  // The lattice rotation (x, y, z) -> (z, y, -x) maps the z-axis datum to the x-axis one.
  std::vector<Segment> rotated;
  for (const auto& s : ez.chain.segments())
    rotated.push_back({Vec3(s.a.z(), s.a.y(), -s.a.x()), Vec3(s.b.z(), s.b.y(), -s.b.x())});
  const double h = 2.0 / 13.0;
  // Forward differences are not rotation invariant, so only up to a cell.
  EXPECT_LE(hausdorff_distance(rotated, ex.chain.segments(), 0.1 * h), h);
}

TEST(DetectCharge, LoopsAroundLineFields) {
  const Domain ball = Domain::ball(Vec3::Zero(), 1.0);
  GridMap line = GridMap::create(ball, 24, 5);
  line.fill([](const Vec3& x) {
    const double phi = std::atan2(x.y(), x.x());
    return Rp2Target::from_director(Vec3(std::cos(phi / 2), std::sin(phi / 2), 0));
  });
  const Rp2Target t;
  const Segment axis{Vec3(0, 0, -0.5), Vec3(0, 0, 0.5)};
  EXPECT_EQ(detect_charge(line, t, axis, 0.5), 1);
  const Segment off{Vec3(0.5, 0, -0.1), Vec3(0.5, 0, 0.1)};
  EXPECT_EQ(detect_charge(line, t, off, 0.2), 0);

  const BoundaryField f = rp2_pair_datum(Vec3(0, 0, -1), Vec3(0, 0, 1), ball, 16);
  const MinimizeResult r = minimize(f.grid, t, 1.8);
  EXPECT_EQ(detect_charge(r.u, t, axis, 0.5), 1);
}

TEST(FieldIo, RoundTrip) {
  const Domain ball = Domain::ball(Vec3::Zero(), 1.0);
  GridMap g = GridMap::create(ball, 10, 5);
  CounterRng rng(2, "io");
  for (double& v : g.values()) v = rng.normal();
  const auto path = std::filesystem::temp_directory_path() / "hplateau_field_roundtrip.bin";
  write_field(path.string(), g);
  const GridMap back = read_field(path.string(), ball);
  EXPECT_EQ(back.values(), g.values());
  EXPECT_THROW(read_field(path.string(), Domain::ball(Vec3::Zero(), 2.0)), Error);
  std::filesystem::remove(path);

  std::ostringstream csv;
  g.fill([](const Vec3&) { return Rp2Target::from_director(Vec3::UnitX()); });
  write_measure_csv(csv, g, energy_measure(g, 1.5));
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, 14), "i,j,k,density\n");
  EXPECT_GT(std::count(text.begin(), text.end(), '\n'), 100);
}

TEST(CounterRngTest, PureFunctionOfSeedStreamCounter) {
  CounterRng a(9, "alpha"), b(9, "alpha"), c(9, "beta");
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(CounterRng(9, "alpha").at(3), c.at(3));
  EXPECT_EQ(CounterRng(9, "alpha").at(5), a.at(5));
  double mean = 0;
  CounterRng u(1, "u");
  for (int i = 0; i < 10000; ++i) mean += u.uniform();
  EXPECT_NEAR(mean / 10000, 0.5, 0.02);
}
