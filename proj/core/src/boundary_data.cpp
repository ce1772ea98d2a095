#include "hplateau/boundary_data.hpp"

#include <cmath>
#include <numbers>

#include "hplateau/errors.hpp"
#include "hplateau/pharmonic.hpp"

namespace hplateau {

namespace {

BoundaryField make_field(std::string name, const Domain& domain, int n, int nu, Datum datum,
                         BoundaryChargeSpec spec) {
  BoundaryField g{std::move(name), GridMap::create(domain, n, nu), std::move(spec), std::move(datum)};
  g.grid.fill(g.datum);
  return g;
}

void require_on_boundary(const Domain& domain, const Vec3& x) {
  if (std::abs(domain.boundary_distance(x)) > 1e-9 * domain.radius)
    throw Error(Errc::points_not_on_boundary, "point is not on the domain boundary");
}

std::vector<Vec3> fibonacci_sphere(int count) {
  std::vector<Vec3> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

}  // namespace

BoundaryField rp2_pair_datum(const Vec3& a, const Vec3& b, const Domain& domain, int n) {
  if (domain.kind != Domain::Kind::ball) throw Error(Errc::invalid_argument, "pair datum needs a ball domain");
  require_on_boundary(domain, a);
  require_on_boundary(domain, b);
  if ((a - b).norm() <= 1e-9 * domain.radius) throw Error(Errc::degenerate_spec, "defects coincide");
  const Vec3 axis = (b - a).normalized();
  const Vec3 mid = 0.5 * (a + b);
  const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (helper - helper.dot(axis) * axis).normalized();
  const Vec3 e2 = axis.cross(e1);
  Datum datum = [=](const Vec3& x) {
    const Vec3 d = x - mid;
    const double phi = std::atan2(d.dot(e2), d.dot(e1));
    return Rp2Target::from_director(std::cos(0.5 * phi) * e1 + std::sin(0.5 * phi) * e2);
  };
  return make_field("rp2-pair", domain, n, 5, datum, {{a, b}, {1, 1}});
}

Ambient four_point_value(const Vec3& x) {
  const double den = std::hypot(x.x(), x.z()) * std::hypot(x.y(), x.z());
  double theta = 0.0;
  if (den > 0.0) theta = std::atan2(x.z() / den, x.x() * x.y() / den);
  return Rp2Target::from_director(Vec3(0.0, std::cos(0.5 * theta), std::sin(0.5 * theta)));
}

BoundaryField four_point_datum(const Domain& domain, int n) {
  if (domain.kind != Domain::Kind::ball) throw Error(Errc::invalid_argument, "four-point datum needs a ball domain");
  const Vec3 c = domain.center;
  const double r = domain.radius;
  Datum datum = [=](const Vec3& x) {
    const Vec3 d = x - c;
    return four_point_value(d.norm() > 0.0 ? Vec3(d.normalized()) : Vec3::UnitZ());
  };
  BoundaryChargeSpec spec{{c + r * Vec3::UnitX(), c - r * Vec3::UnitX(), c + r * Vec3::UnitY(),
                           c - r * Vec3::UnitY()},
                          {1, 1, 1, 1}};
  return make_field("rp2-four-point", domain, n, 5, datum, spec);
}

BoundaryField rp2_smooth_datum(const Domain& domain, int n, double k) {
  Datum datum = [k](const Vec3& x) {
    return Rp2Target::from_director(Vec3(std::cos(k * x.x()), std::sin(k * x.x()), 0.0));
  };
  return make_field("rp2-smooth", domain, n, 5, datum, {});
}

BoundaryField rp2_constant_datum(const Domain& domain, int n, const Vec3& director) {
  const Ambient v = Rp2Target::from_director(director);
  return make_field("rp2-constant", domain, n, 5, [v](const Vec3&) { return v; }, {});
}

BoundaryField circle_phase_datum(const Domain& domain, int n, double k) {
  Datum datum = [k](const Vec3& x) {
    Ambient v(2);
    v << std::cos(k * x.x()), std::sin(k * x.x());
    return v;
  };
  return make_field("circle-phase", domain, n, 2, datum, {});
}

int boundary_loop_class(const BoundaryField& g, const TargetManifold& target, const Vec3& center,
                        double angular_radius, int samples) {
  const Domain& dom = g.grid.domain();
  if (dom.kind != Domain::Kind::ball) throw Error(Errc::invalid_argument, "boundary loops need a ball domain");
  const Vec3 n = (center - dom.center).normalized();
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (helper - helper.dot(n) * n).normalized();
  const Vec3 e2 = n.cross(e1);
  std::vector<Ambient> loop;
  for (int s = 0; s < samples; ++s) {
    const double phi = 2.0 * std::numbers::pi * s / samples;
    const Vec3 dir = std::cos(angular_radius) * n +
                     std::sin(angular_radius) * (std::cos(phi) * e1 + std::sin(phi) * e2);
    loop.push_back(g.datum(dom.center + dom.radius * dir));
  }
  return target.loop_class(loop);
}

int boundary_circle_class(const BoundaryField& g, const TargetManifold& target, const Vec3& normal,
                          double offset, int samples) {
  const Domain& dom = g.grid.domain();
  if (dom.kind != Domain::Kind::ball) throw Error(Errc::invalid_argument, "boundary loops need a ball domain");
  if (std::abs(offset) >= dom.radius) throw Error(Errc::invalid_argument, "plane misses the sphere");
  const Vec3 n = normal.normalized();
  return boundary_loop_class(g, target, dom.center + dom.radius * n, std::acos(offset / dom.radius), samples);
}

std::vector<int> verify_declared_charges(const BoundaryField& g, const TargetManifold& target,
                                         double angular_radius) {
  std::vector<int> bad;
  for (std::size_t i = 0; i < g.spec.size(); ++i)
    if (boundary_loop_class(g, target, g.spec.points[i], angular_radius) != g.spec.classes[i])
      bad.push_back(static_cast<int>(i));
  return bad;
}

TraceSamples trace_samples(const GridMap& grid) {
  const Domain& dom = grid.domain();
  TraceSamples t;
  t.floor = 0.5 * grid.h();
  if (dom.kind == Domain::Kind::ball) {
    const int count = static_cast<int>(grid.count(NodeKind::boundary));
    for (const auto& p : fibonacci_sphere(count)) t.points.push_back(dom.center + dom.radius * p);
    t.weights.assign(t.points.size(), 4.0 * std::numbers::pi * dom.radius * dom.radius / count);
    return t;
  }
  const int m = static_cast<int>(std::lround(2.0 * dom.radius / grid.h()));
  const double h = 2.0 * dom.radius / m;
  for (int axis = 0; axis < 3; ++axis)
    for (int side = -1; side <= 1; side += 2)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          Vec3 x;
          x[axis] = side * dom.radius;
          x[(axis + 1) % 3] = -dom.radius + (i + 0.5) * h;
          x[(axis + 2) % 3] = -dom.radius + (j + 0.5) * h;
          t.points.push_back(dom.center + x);
          t.weights.push_back(h * h);
        }
  return t;
}

double fractional_seminorm(const std::vector<Ambient>& values, const TraceSamples& samples, double s,
                           double p) {
  if (!(s > 0.0 && s < 1.0) || !(p >= 1.0)) throw Error(Errc::invalid_argument, "need 0 < s < 1 and p >= 1");
  const std::size_t n = samples.points.size();
  const double expo = 2.0 + s * p;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double diff = (values[i] - values[j]).norm();
      if (diff == 0.0) continue;
      const double dist = std::max((samples.points[i] - samples.points[j]).norm(), samples.floor);
      row += samples.weights[j] * std::pow(diff, p) / std::pow(dist, expo);
    }
    total += samples.weights[i] * row;
  }
  return total;
}

double fractional_seminorm(const BoundaryField& g, double s, double p) {
  const TraceSamples samples = trace_samples(g.grid);
  std::vector<Ambient> values;
  values.reserve(samples.points.size());
  for (const auto& x : samples.points) values.push_back(g.datum(x));
  return fractional_seminorm(values, samples, s, p);
}

EnergyBound energy_bound_ratio(const BoundaryField& g, const GridMap& u, const TargetManifold& target,
                               double p) {
  EnergyBound b;
  b.rescaled_energy = (2.0 - p) * p_energy(u, target, p);
  b.seminorm_sq = fractional_seminorm(g, 0.5, 2.0);
  if (b.seminorm_sq == 0.0) {
    if (b.rescaled_energy > 1e-12)
      throw Error(Errc::seminorm_zero, "constant boundary datum but nonzero energy " +
                                           std::to_string(b.rescaled_energy));
    b.zero_over_zero = true;
    return b;
  }
  b.ratio = b.rescaled_energy / b.seminorm_sq;
  return b;
}

}  // namespace hplateau
