#pragma once

// Subcommand implementations. Each returns a process exit code and writes
// its artifacts atomically into the output directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "hplateau/boundary_data.hpp"
#include "hplateau/errors.hpp"
#include "hplateau/pharmonic.hpp"
#include "hplateau/plateau.hpp"

namespace plateau_cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitInternal = 2;

int exit_code_for(hplateau::Errc code);

struct RunOptions {
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::filesystem::path chain;  // validate only
};

int run_solve(const Config& cfg, const RunOptions& opts);
int run_simulate(const Config& cfg, const RunOptions& opts);
int run_sweep(const Config& cfg, const RunOptions& opts);
int run_compare(const Config& cfg, const RunOptions& opts);
int run_validate(const Config& cfg, const RunOptions& opts);

// Write to a temporary sibling, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct SweepRecord {
  double p = 0.0;
  double energy = 0.0;
  double rescaled_energy = 0.0;
  long iterations = 0;
  bool converged = false;
  double grad_norm_rel = 0.0;
  int extracted_edges = 0;
  double density = 0.0;  // along the first extracted or declared segment
};

struct Extrapolation {
  double intercept = 0.0;  // value at p = 2
  double slope = 0.0;      // per unit of (2 - p)
};

// Least squares line through (2 - p, rescaled energy); needs at least 3 records.
Extrapolation extrapolate_to_p2(const std::vector<SweepRecord>& records);

struct PlotData {
  std::vector<SweepRecord> sweep;
  std::vector<std::pair<double, double>> monotonicity;  // (r, r^(p-3) E(B_r))
  std::vector<std::pair<double, double>> density;       // (arclength, linear density)
};

// mass_vs_2mp.csv, monotonicity.csv and density_along_segment.csv. Throws
// IoError when there are no sweep records.
void emit_plot_data(const PlotData& data, const std::filesystem::path& dir);

std::string sweep_record_json(const SweepRecord& r);

hplateau::FiniteGroup load_group(const Config& cfg);
hplateau::LengthSpectrum load_lengths(const Config& cfg, const hplateau::FiniteGroup& group);
hplateau::BoundaryField load_datum(const Config& cfg);
std::unique_ptr<hplateau::TargetManifold> load_target(const Config& cfg);
hplateau::MinimizeOptions load_minimize_options(const Config& cfg, const RunOptions& opts);

// Linear density of the measure along a segment, in `bins` bins.
std::vector<std::pair<double, double>> density_along(const hplateau::EnergyMeasure& m,
                                                     const hplateau::Segment& s, double tube, int bins);

}  // namespace plateau_cli
