#pragma once

// Discrete p-energy of manifold-valued grid maps, its projected-gradient
// minimization, and diagnostics of the rescaled energy measure.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hplateau/chains.hpp"
#include "hplateau/grid.hpp"
#include "hplateau/manifold.hpp"

namespace hplateau {

// |D_h u|^2 of the cell with base node `base`, from forward differences.
double cell_gradient_sq(const GridMap& u, std::size_t base);
// Columns are the forward difference quotients along x1, x2, x3.
Eigen::MatrixXd cell_gradient(const GridMap& u, std::size_t base);

// Throws OffManifoldValue if a domain node is farther than tol from the target.
void check_on_manifold(const GridMap& u, const TargetManifold& target, double tol = 1e-9);

// Sum over active cells of h^3 |D_h u|^p / p.
double p_energy(const GridMap& u, const TargetManifold& target, double p);
double p_energy_unchecked(const GridMap& u, double p);

inline constexpr double kGradientEps = 1e-8;

// Ambient gradient of the energy with respect to every node value, using the
// weight (|D_h u|^2 + eps^2)^((p-2)/2) per cell. Returns the unregularized energy.
double p_energy_gradient(const GridMap& u, double p, std::vector<double>& grad,
                         double eps = kGradientEps);

struct MinimizeOptions {
  double tol = 1e-6;             // on the projected gradient norm, relative to the initial one
  long max_iterations = 20000;
  double armijo = 1e-4;
  double min_step = 1e-14;       // halving floor for the line search
  double tube_fraction = 0.5;    // largest per-node step as a fraction of the reach
  bool harmonic_init = true;
  int restarts = 0;              // extra runs from perturbed starts
  std::uint64_t seed = 0;
  double restart_noise = 0.05;
  int stall_window = 200;        // stop when the energy stops decreasing
  double stall_rel = 1e-13;
  bool record_history = false;
};

struct MinimizeResult {
  GridMap u;
  double energy = 0.0;
  double initial_energy = 0.0;
  double grad_norm = 0.0;
  double grad_norm0 = 0.0;
  long iterations = 0;
  bool converged = false;
  bool max_iterations_hit = false;
  bool stalled = false;
  std::vector<double> energy_history;
};

// Componentwise discrete harmonic extension of the boundary values into the
// inside nodes, followed by projection onto the target.
void harmonic_extension(GridMap& u, const TargetManifold& target);

// Jacobi-preconditioned nonlinear conjugate gradients on the product of
// tangent spaces with projection as retraction and Armijo backtracking.
// Boundary nodes are never modified.
MinimizeResult minimize(const GridMap& initial, const TargetManifold& target, double p,
                        const MinimizeOptions& opts = {});

struct EnergyMeasure {
  double p = 2.0;
  double h = 0.0;
  std::vector<double> density;     // per cell (base node index), zero on inactive cells
  std::vector<std::uint8_t> active;
  std::vector<Vec3> centers;       // cell centers
  double total = 0.0;
};

// Cell densities (2 - p) |D_h u|^p / p * h^3.
EnergyMeasure energy_measure(const GridMap& u, double p);

struct StressCell {
  std::size_t cell = 0;
  double grad_norm = 0.0;  // |D_h u|
  int rank = 0;            // numerical rank of D_h u
  Eigen::Matrix3d T = Eigen::Matrix3d::Zero();
};

// T = (|Du|^p / p) Id - |Du|^(p-2) Du^T Du on every active cell with Du != 0.
StressCell stress_tensor(const GridMap& u, std::size_t base, double p);
std::vector<StressCell> stress_field(const GridMap& u, double p);

struct DivergenceReport {
  double max_residual = 0.0;
  std::vector<double> per_node;  // zero on untested nodes
  int tested_nodes = 0;
};

// Tests the stress against nodal hat fields xi = e_a delta_x at inside nodes
// whose surrounding cells are all active: |sum_cells T : D_h xi| h^3 / h^3.
// Nodes farther than `margin` from the boundary only.
DivergenceReport stress_divergence_residual(const GridMap& u, double p, double margin = 0.0);

// r^(p-3) times the energy of the cells whose centers lie in B_r(x0).
std::vector<double> monotonicity_profile(const GridMap& u, double p, const Vec3& x0,
                                         std::span<const double> radii);

struct EtaMap {
  std::vector<std::uint8_t> suspect;  // per node; domain nodes only
  int suspect_count = 0;
  int regular_count = 0;
};

// A node is regular when the energy in B_r around it is at most
// eta r^(3-p) / (2-p).
EtaMap eta_regularity_map(const GridMap& u, double p, double eta, double r);
// Suspect nodes at least `collar` inside the domain.
int interior_suspect_count(const GridMap& u, const EtaMap& map, double collar);

struct ExtractOptions {
  double threshold = 0.1;        // on mu(B_rho) / (2 rho), energy per unit length
  double ball_cells = 2.0;       // rho in units of h
  int min_cluster_cells = 4;
  double split_rms_cells = 0.6;  // split a cluster whose fit RMS exceeds this times h
  int max_depth = 4;
  double snap_cells = 3.0;       // endpoints this close to the boundary move onto it
  double merge_cells = 2.0;      // endpoints this close to each other are merged
};

struct Extraction {
  Chain chain;
  std::vector<double> fit_rms;   // per edge
  std::vector<int> cluster_cells;
  bool no_concentration = true;
};

Extraction extract_singular_set(const EnergyMeasure& m, const GridMap& grid,
                                const ExtractOptions& opts = {});

// Class of u along a circle of the given radius around the segment midpoint,
// in the plane normal to the segment.
int detect_charge(const GridMap& u, const TargetManifold& target, const Segment& segment,
                  double radius, int samples = 0);

struct DensityEstimate {
  double theta = 0.0;      // tube mass per unit length
  double tube_mass = 0.0;
  int nearest_class = -1;  // -1 when theta is zero
  double nearest_value = 0.0;
  double relative_gap = 0.0;
};

// Mass of the cells within tube_radius of the segment divided by its length,
// matched to the closest nonzero entry of the table.
DensityEstimate segment_density(const EnergyMeasure& m, const Segment& segment,
                                const EnergyTable& table, double tube_radius);

// Field dump: text header `nu n1 n2 n3 h` and newline, then node vectors as
// little-endian doubles in row-major node order.
void write_field(const std::string& path, const GridMap& u);
GridMap read_field(const std::string& path, const Domain& domain);
// `i,j,k,density` rows for the active cells.
void write_measure_csv(std::ostream& out, const GridMap& grid, const EnergyMeasure& m);

}  // namespace hplateau
