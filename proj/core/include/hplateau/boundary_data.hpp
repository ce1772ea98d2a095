#pragma once

// Boundary data with declared defects, their fractional seminorms and the
// global energy bound diagnostic.

#include <functional>
#include <string>
#include <vector>

#include "hplateau/chains.hpp"
#include "hplateau/grid.hpp"
#include "hplateau/manifold.hpp"

namespace hplateau {

using Datum = std::function<Ambient(const Vec3&)>;

struct BoundaryField {
  std::string name;
  GridMap grid;             // boundary nodes carry the trace, other nodes the datum as a start
  BoundaryChargeSpec spec;  // declared defects
  Datum datum;              // trace, evaluated on the boundary surface
};

// Half-angle director around the chord through a and b: with phi the azimuth
// about that chord, n = cos(phi/2) e1 + sin(phi/2) e2. Defects at a and b.
BoundaryField rp2_pair_datum(const Vec3& a, const Vec3& b, const Domain& domain, int n);

// g_hat(x) = (x1 x2, x3) / (|(x1, x3)| |(x2, x3)|) on the unit sphere followed
// by tau(theta) = line through (0, cos(theta/2), sin(theta/2)). Defects at
// (+-1, 0, 0) and (0, +-1, 0).
BoundaryField four_point_datum(const Domain& domain, int n);
Ambient four_point_value(const Vec3& x_on_unit_sphere);

// n = (cos(k x1), sin(k x1), 0): smooth, no defects.
BoundaryField rp2_smooth_datum(const Domain& domain, int n, double k = 0.25);
BoundaryField rp2_constant_datum(const Domain& domain, int n, const Vec3& director = Vec3::UnitZ());
// Circle target: u = (cos(k x1), sin(k x1)).
BoundaryField circle_phase_datum(const Domain& domain, int n, double k);

// Class of the trace along a small circle on the boundary sphere around a
// boundary point (angular radius in radians, ball domains only).
int boundary_loop_class(const BoundaryField& g, const TargetManifold& target, const Vec3& center,
                        double angular_radius, int samples = 256);

// Class of the trace along the boundary circle cut by the plane through the
// domain center with the given normal, shifted by `offset` along it.
int boundary_circle_class(const BoundaryField& g, const TargetManifold& target, const Vec3& normal,
                          double offset, int samples = 512);

// Declared defects whose boundary loop does not return the declared class.
std::vector<int> verify_declared_charges(const BoundaryField& g, const TargetManifold& target,
                                         double angular_radius = 0.2);

struct TraceSamples {
  std::vector<Vec3> points;
  std::vector<double> weights;  // surface area per sample
  double floor = 0.0;           // pair distance floor
};

// Fibonacci points on a sphere (one per boundary node of the grid) or face
// cell centers on a cube, with equal area weights.
TraceSamples trace_samples(const GridMap& grid);

// Sum over sample pairs i != j of w_i w_j |g_i - g_j|^p / max(|x_i - x_j|, h/2)^(2 + s p).
double fractional_seminorm(const BoundaryField& g, double s = 0.5, double p = 2.0);
double fractional_seminorm(const std::vector<Ambient>& values, const TraceSamples& samples, double s,
                           double p);

struct EnergyBound {
  double ratio = 0.0;
  double rescaled_energy = 0.0;  // (2 - p) E_p(u)
  double seminorm_sq = 0.0;
  bool zero_over_zero = false;
};

// (2 - p) E_p(u) / |g|^2 in W^{1/2,2}.
EnergyBound energy_bound_ratio(const BoundaryField& g, const GridMap& u, const TargetManifold& target,
                               double p);

}  // namespace hplateau
