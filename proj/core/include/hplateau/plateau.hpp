#pragma once

// Homotopical Plateau problem: among admissible chains ending on the boundary
// defects, find one of least mass.

#include <span>
#include <string>
#include <vector>

#include "hplateau/chains.hpp"
#include "hplateau/group_algebra.hpp"

namespace hplateau {

// Abstract network. Vertices [0, boundary_count) are the spec points in spec
// order, followed by steiner_count interior (Steiner) vertices.
struct Topology {
  int boundary_count = 0;
  int steiner_count = 0;
  std::vector<ChainEdge> edges;

  int vertex_count() const { return boundary_count + steiner_count; }
  bool operator==(const Topology&) const = default;
};

struct PositionOptions {
  double balance_tol = 1e-10;     // absolute, on |sum w_i v_i| at each movable vertex
  double move_rel_tol = 1e-14;    // relative to the boundary diameter
  double merge_rel_tol = 1e-9;    // contraction radius, relative to the boundary diameter
  double damping = 1.0;           // step toward the Weiszfeld point, in (0, 1]
  long max_iterations = 200000;   // Gauss-Seidel sweeps
  bool record_history = false;
};

struct PositionResult {
  Chain chain;
  double mass = 0.0;
  long iterations = 0;
  bool converged = false;
  bool no_interior = false;   // nothing to move; chain returned as given
  int merges = 0;             // edges contracted because an endpoint pair collapsed
  double balance_max = 0.0;
  std::vector<double> mass_history;
};

// Moves the interior vertices of a fixed topology to a stationary point of
// the mass, sweeping a damped Weiszfeld update over the vertices. A vertex
// whose optimal position is one of its neighbours is contracted into it.
PositionResult optimize_positions(const Topology& topology, std::span<const Vec3> boundary,
                                  const EnergyTable& table, const PositionOptions& opts = {},
                                  std::span<const Vec3> initial_steiner = {});

Chain topology_chain(const Topology& topology, std::span<const Vec3> boundary,
                     std::span<const Vec3> steiner);

inline constexpr int kMaxSteiner = 3;
inline constexpr int kMaxSpecPoints = 10;

// All flux-feasible topologies with at most max_steiner interior vertices,
// one per isomorphism class with boundary labels fixed. Each spec point has
// exactly one incident edge and each interior vertex has degree at least 3.
std::vector<Topology> enumerate_topologies(const BoundaryChargeSpec& spec, const FiniteGroup& group,
                                           int max_steiner);

struct SolveOptions {
  int max_steiner = 1;
  int max_pairs = 10;                 // exact matching cap (2n points)
  double tie_rel_tol = 1e-9;
  int max_runner_ups = 5;
  bool require_noncrossing = false;
  PositionOptions positions;
};

struct RankedChain {
  Chain chain;
  double mass = 0.0;
};

struct SolveReport {
  Chain best;
  double mass = 0.0;
  std::vector<RankedChain> runner_ups;  // next best, not tied with the optimum
  std::vector<Chain> ties;              // every co-optimal chain, best included
  double balance_max = 0.0;
  long iterations = 0;
  bool intersecting_optimum = false;    // every optimum has crossing segments
  int topologies_total = 0;
  int topologies_pruned = 0;
};

// Minimal connection of an even set of points for pi_1 = Z/2Z: the perfect
// matching by segments of least total length, times `weight`.
SolveReport minimal_connection_matching(std::span<const Vec3> points, double weight, int cls = 1,
                                        const SolveOptions& opts = {});

SolveReport solve_plateau(const BoundaryChargeSpec& spec, const FiniteGroup& group,
                          const LengthSpectrum& lengths, const SolveOptions& opts = {});

// True if two edges of the chain that do not share a vertex touch.
bool has_crossing(const Chain& chain);

}  // namespace hplateau
