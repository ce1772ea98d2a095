#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "logging.hpp"

namespace plateau_cli {

using namespace hplateau;
using ojson = nlohmann::ordered_json;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::infeasible_class:
    case Errc::unknown_class:
    case Errc::odd_point_count:
    case Errc::cap_exceeded:
    case Errc::degenerate_spec:
    case Errc::points_not_on_boundary:
    case Errc::ball_outside_domain:
    case Errc::config_error:
    case Errc::parse_error:
    case Errc::io_error:
    case Errc::not_associative:
    case Errc::no_identity:
    case Errc::no_inverse:
    case Errc::out_of_range:
    case Errc::invalid_spectrum:
    case Errc::invalid_argument:
      return kExitInfeasible;
    default:
      return kExitInternal;
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(Errc::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io_error, "cannot rename " + tmp.string() + ": " + ec.message());
}

namespace {

ojson chain_json(const Chain& c) { return ojson::parse(chain_to_json(c, -1)); }

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void check_p(const std::string& key, double p) {
  if (!(p > 1.0 && p < 2.0)) throw Error(Errc::config_error, key + ": p must lie in (1, 2)");
}

struct RunOutcome {
  SweepRecord record;
  MinimizeResult result;
  EnergyMeasure measure;
};

RunOutcome simulate_once(const BoundaryField& field, const TargetManifold& target, double p,
                         const MinimizeOptions& mopts, const ExtractOptions& eopts, double tube) {
  RunOutcome out;
  out.result = minimize(field.grid, target, p, mopts);
  out.measure = energy_measure(out.result.u, p);
  auto& r = out.record;
  r.p = p;
  r.energy = out.result.energy;
  r.rescaled_energy = out.measure.total;
  r.iterations = out.result.iterations;
  r.converged = out.result.converged;
  r.grad_norm_rel = out.result.grad_norm0 > 0.0 ? out.result.grad_norm / out.result.grad_norm0 : 0.0;
  const Extraction ex = extract_singular_set(out.measure, out.result.u, eopts);
  r.extracted_edges = static_cast<int>(ex.chain.edges.size());
  std::optional<Segment> seg;
  if (!ex.chain.edges.empty()) {
    seg = ex.chain.segment(0);
  } else if (field.spec.size() == 2) {
    seg = Segment{field.spec.points[0], field.spec.points[1]};
  }
  if (seg) {
    const EnergyTable table = class_energy_table(rp2_group(), rp2_lengths(rp2_group()), 2.0);
    r.density = segment_density(out.measure, *seg, table, tube).theta;
  }
  log(LogLevel::info, "p = " + fmt(p) + ": energy " + fmt(r.energy) + " after " +
                          std::to_string(r.iterations) + " iterations");
  return out;
}

std::vector<RunOutcome> sweep_runs(const BoundaryField& field, const TargetManifold& target,
                                   const std::vector<double>& ps, const MinimizeOptions& mopts,
                                   const ExtractOptions& eopts, double tube, int threads) {
  std::vector<RunOutcome> outs(ps.size());
  std::vector<std::exception_ptr> errors(ps.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(ps.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < ps.size(); i += workers) {
        try {
          outs[i] = simulate_once(field, target, ps[i], mopts, eopts, tube);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return outs;
}

ExtractOptions load_extract_options(const Config& cfg) {
  ExtractOptions e;
  e.threshold = cfg.real("simulate.threshold", e.threshold);
  e.ball_cells = cfg.real("simulate.ball_cells", e.ball_cells);
  e.min_cluster_cells = static_cast<int>(cfg.integer("simulate.min_cluster_cells", e.min_cluster_cells));
  return e;
}

std::vector<double> monotonicity_radii(const GridMap& u, const Vec3& x0) {
  const double rmax = 0.9 * u.domain().boundary_distance(x0);
  const double rmin = 3.0 * u.h();
  std::vector<double> radii;
  if (rmax <= rmin) return radii;
  for (int k = 0; k < 8; ++k) radii.push_back(rmin + (rmax - rmin) * k / 7.0);
  return radii;
}

std::string csv_pairs(const std::string& header, const std::vector<std::pair<double, double>>& rows) {
  std::ostringstream s;
  s << header << '\n' << std::setprecision(17);
  for (const auto& [a, b] : rows) s << a << ',' << b << '\n';
  return s.str();
}

}  // namespace

FiniteGroup load_group(const Config& cfg) {
  const std::string builtin = cfg.str("group.builtin", cfg.has("group.table") ? "" : "rp2");
  if (builtin == "rp2") return rp2_group();
  if (builtin == "s3") return FiniteGroup::symmetric3();
  if (builtin.rfind("z", 0) == 0 && builtin.size() > 1) {
    try {
      return FiniteGroup::cyclic(std::stoi(builtin.substr(1)));
    } catch (const std::logic_error&) {
      throw Error(Errc::config_error, "group.builtin: unknown group '" + builtin + "'");
    }
  }
  if (!builtin.empty()) throw Error(Errc::config_error, "group.builtin: unknown group '" + builtin + "'");
  return read_group_table_file(cfg.existing_path("group.table").string());
}

LengthSpectrum load_lengths(const Config& cfg, const FiniteGroup& group) {
  if (cfg.has("group.lengths")) return read_length_spectrum_file(cfg.existing_path("group.lengths").string(), group);
  if (cfg.str("group.builtin", "rp2") == "rp2" && group.order() == 2) return rp2_lengths(group);
  throw Error(Errc::config_error, "group.lengths: missing");
}

std::unique_ptr<TargetManifold> load_target(const Config& cfg) {
  const std::string kind = cfg.str("datum.kind", "pair");
  return make_target(cfg.str("target.name", kind == "circle_phase" ? "circle" : "rp2"));
}

BoundaryField load_datum(const Config& cfg) {
  const std::string dkind = cfg.str("domain.kind", "ball");
  const Vec3 center = cfg.vec3("domain.center", Vec3::Zero());
  const double radius = cfg.real("domain.radius", 1.0);
  if (!(radius > 0.0)) throw Error(Errc::config_error, "domain.radius: must be positive");
  Domain domain;
  if (dkind == "ball") {
    domain = Domain::ball(center, radius);
  } else if (dkind == "cube") {
    domain = Domain::cube(center, radius);
  } else {
    throw Error(Errc::config_error, "domain.kind: expected ball or cube");
  }
  const long n = cfg.integer("grid.n", 24);
  if (n < 8) throw Error(Errc::config_error, "grid.n: at least 8 nodes per axis");
  const int ni = static_cast<int>(n);
  const std::string kind = cfg.str("datum.kind", "pair");
  if (kind == "pair")
    return rp2_pair_datum(cfg.vec3("datum.a", center - radius * Vec3::UnitZ()),
                          cfg.vec3("datum.b", center + radius * Vec3::UnitZ()), domain, ni);
  if (kind == "four_point") return four_point_datum(domain, ni);
  if (kind == "smooth") return rp2_smooth_datum(domain, ni, cfg.real("datum.k", 0.25));
  if (kind == "constant") return rp2_constant_datum(domain, ni, cfg.vec3("datum.director", Vec3::UnitZ()));
  if (kind == "circle_phase") return circle_phase_datum(domain, ni, cfg.real("datum.k", 1.0));
  throw Error(Errc::config_error, "datum.kind: unknown datum '" + kind + "'");
}

MinimizeOptions load_minimize_options(const Config& cfg, const RunOptions& opts) {
  MinimizeOptions m;
  m.tol = cfg.real("simulate.tol", m.tol);
  m.max_iterations = cfg.integer("simulate.max_iter", m.max_iterations);
  m.restarts = static_cast<int>(cfg.integer("simulate.restarts", 0));
  m.restart_noise = cfg.real("simulate.restart_noise", m.restart_noise);
  m.seed = opts.seed ? *opts.seed : static_cast<std::uint64_t>(cfg.integer("run.seed", 0));
  if (m.max_iterations < 1) throw Error(Errc::config_error, "simulate.max_iter: must be positive");
  return m;
}

Extrapolation extrapolate_to_p2(const std::vector<SweepRecord>& records) {
  if (records.size() < 3) throw Error(Errc::invalid_argument, "extrapolation needs at least 3 p values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(records.size());
  for (const auto& r : records) {
    const double x = 2.0 - r.p;
    sx += x;
    sy += r.rescaled_energy;
    sxx += x * x;
    sxy += x * r.rescaled_energy;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw Error(Errc::invalid_argument, "extrapolation needs distinct p values");
  Extrapolation e;
  e.slope = (n * sxy - sx * sy) / den;
  e.intercept = (sy - e.slope * sx) / n;
  return e;
}

std::vector<std::pair<double, double>> density_along(const EnergyMeasure& m, const Segment& s, double tube,
                                                     int bins) {
  const double len = s.length();
  std::vector<double> mass(bins, 0.0);
  const Vec3 dir = s.direction();
  for (std::size_t c = 0; c < m.density.size(); ++c) {
    if (!m.active[c] || m.density[c] == 0.0) continue;
    const Vec3 x = m.centers[c];
    if (point_segment_distance(x, s.a, s.b) > tube) continue;
    const double t = std::clamp((x - s.a).dot(dir), 0.0, len);
    mass[std::min(bins - 1, static_cast<int>(t / len * bins))] += m.density[c];
  }
  std::vector<std::pair<double, double>> out;
  for (int b = 0; b < bins; ++b) out.emplace_back((b + 0.5) * len / bins, mass[b] / (len / bins));
  return out;
}

std::string sweep_record_json(const SweepRecord& r) {
  ojson j;
  j["p"] = r.p;
  j["energy"] = r.energy;
  j["rescaled_energy"] = r.rescaled_energy;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["grad_norm_rel"] = r.grad_norm_rel;
  j["extracted_edges"] = r.extracted_edges;
  j["density"] = r.density;
  return j.dump();
}

void emit_plot_data(const PlotData& data, const std::filesystem::path& dir) {
  if (data.sweep.empty()) throw Error(Errc::io_error, "no sweep records to plot");
  std::vector<std::pair<double, double>> mass;
  for (const auto& r : data.sweep) mass.emplace_back(2.0 - r.p, r.rescaled_energy);
  write_atomic(dir / "mass_vs_2mp.csv", csv_pairs("two_minus_p,rescaled_energy", mass));
  write_atomic(dir / "monotonicity.csv", csv_pairs("r,scaled_energy", data.monotonicity));
  write_atomic(dir / "density_along_segment.csv", csv_pairs("arclength,linear_density", data.density));
}

int run_solve(const Config& cfg, const RunOptions& opts) {
  const FiniteGroup group = load_group(cfg);
  const LengthSpectrum lengths = load_lengths(cfg, group);
  const BoundaryChargeSpec spec = read_spec_csv_file(cfg.existing_path("spec.file").string());
  SolveOptions so;
  so.max_steiner = static_cast<int>(cfg.integer("solver.max_steiner", so.max_steiner));
  so.tie_rel_tol = cfg.real("solver.tie_rel_tol", so.tie_rel_tol);
  so.max_runner_ups = static_cast<int>(cfg.integer("solver.max_runner_ups", so.max_runner_ups));
  so.require_noncrossing = cfg.flag("solver.require_noncrossing", false);
  const SolveReport rep = solve_plateau(spec, group, lengths, so);

  ojson j;
  j["mass"] = rep.mass;
  j["best"] = chain_json(rep.best);
  j["balance_max"] = rep.balance_max;
  j["iterations"] = rep.iterations;
  j["intersecting_optimum"] = rep.intersecting_optimum;
  j["topologies_total"] = rep.topologies_total;
  j["topologies_pruned"] = rep.topologies_pruned;
  j["ties"] = ojson::array();
  for (const auto& t : rep.ties) j["ties"].push_back(chain_json(t));
  j["runner_ups"] = ojson::array();
  for (const auto& r : rep.runner_ups) j["runner_ups"].push_back({{"mass", r.mass}, {"chain", chain_json(r.chain)}});
  write_atomic(opts.out / "solve_report.json", j.dump(2) + "\n");
  log(LogLevel::info, "mass " + fmt(rep.mass));
  return kExitOk;
}

int run_simulate(const Config& cfg, const RunOptions& opts) {
  const BoundaryField field = load_datum(cfg);
  const auto target = load_target(cfg);
  const double p = cfg.real("simulate.p", 1.8);
  check_p("simulate.p", p);
  const MinimizeOptions mopts = load_minimize_options(cfg, opts);
  const ExtractOptions eopts = load_extract_options(cfg);
  const double h = field.grid.h();
  const double tube = cfg.real("simulate.tube_cells", 3.0) * h;

  RunOutcome run = simulate_once(field, *target, p, mopts, eopts, tube);
  const GridMap& u = run.result.u;
  write_field((opts.out / "field.bin.tmp").string(), u);
  std::filesystem::rename(opts.out / "field.bin.tmp", opts.out / "field.bin");
  std::ostringstream csv;
  write_measure_csv(csv, u, run.measure);
  write_atomic(opts.out / "measure.csv", csv.str());

  ojson j;
  j["datum"] = field.name;
  j["p"] = p;
  j["h"] = h;
  j["energy"] = run.result.energy;
  j["rescaled_energy"] = run.measure.total;
  j["iterations"] = run.result.iterations;
  j["converged"] = run.result.converged;
  j["stalled"] = run.result.stalled;
  j["max_iterations_hit"] = run.result.max_iterations_hit;
  j["grad_norm_rel"] = run.record.grad_norm_rel;
  j["stress_divergence_max"] = stress_divergence_residual(u, p, 3.0 * h).max_residual;

  const Vec3 x0 = cfg.vec3("simulate.x0", u.domain().center);
  const auto radii = monotonicity_radii(u, x0);
  ojson mono;
  mono["center"] = {x0.x(), x0.y(), x0.z()};
  mono["radii"] = radii;
  if (!radii.empty()) {
    const auto prof = monotonicity_profile(u, p, x0, radii);
    mono["values"] = prof;
    double worst = 0.0;
    for (std::size_t k = 1; k < prof.size(); ++k) worst = std::max(worst, prof[k - 1] - prof[k]);
    mono["max_decrease"] = worst;
  }
  j["monotonicity"] = mono;

  const double eta = cfg.real("simulate.eta", 0.2);
  const double eta_r = cfg.real("simulate.eta_radius_cells", 3.0) * h;
  const EtaMap em = eta_regularity_map(u, p, eta, eta_r);
  j["eta_map"] = {{"eta", eta},
                  {"radius", eta_r},
                  {"suspect", em.suspect_count},
                  {"regular", em.regular_count},
                  {"interior_suspect", interior_suspect_count(u, em, eta_r)}};

  const Extraction ex = extract_singular_set(run.measure, u, eopts);
  j["extraction"] = {{"no_concentration", ex.no_concentration}, {"chain", chain_json(ex.chain)}, {"fit_rms", ex.fit_rms}};
  const EnergyBound eb = energy_bound_ratio(field, u, *target, p);
  j["energy_bound"] = {{"ratio", eb.ratio},
                       {"rescaled_energy", eb.rescaled_energy},
                       {"seminorm_sq", eb.seminorm_sq},
                       {"zero_over_zero", eb.zero_over_zero}};
  if (!field.spec.empty() && u.domain().kind == Domain::Kind::ball)
    j["declared_charge_mismatch"] = verify_declared_charges(field, *target);
  write_atomic(opts.out / "diagnostics.json", j.dump(2) + "\n");
  return kExitOk;
}

int run_sweep(const Config& cfg, const RunOptions& opts) {
  const BoundaryField field = load_datum(cfg);
  const auto target = load_target(cfg);
  const auto ps = cfg.reals("simulate.p_list");
  for (double p : ps) check_p("simulate.p_list", p);
  const MinimizeOptions mopts = load_minimize_options(cfg, opts);
  const double tube = cfg.real("simulate.tube_cells", 3.0) * field.grid.h();
  const auto outs = sweep_runs(field, *target, ps, mopts, load_extract_options(cfg), tube, opts.threads);
  std::string jsonl;
  for (const auto& o : outs) jsonl += sweep_record_json(o.record) + "\n";
  write_atomic(opts.out / "sweep.jsonl", jsonl);
  return kExitOk;
}

int run_compare(const Config& cfg, const RunOptions& opts) {
  const BoundaryField field = load_datum(cfg);
  if (field.spec.empty()) throw Error(Errc::config_error, "datum.kind: compare needs a datum with declared defects");
  const auto target = load_target(cfg);
  const FiniteGroup group = rp2_group();
  const LengthSpectrum lengths = rp2_lengths(group);
  const EnergyTable table = class_energy_table(group, lengths, 2.0);
  const auto ps = cfg.reals("simulate.p_list");
  if (ps.size() < 3) throw Error(Errc::config_error, "simulate.p_list: compare needs at least 3 values");
  for (double p : ps) check_p("simulate.p_list", p);
  const double h = field.grid.h();
  const double tube = cfg.real("simulate.tube_cells", 3.0) * h;

  SolveOptions so;
  so.max_steiner = static_cast<int>(cfg.integer("solver.max_steiner", so.max_steiner));
  const SolveReport solved = solve_plateau(field.spec, group, lengths, so);
  const ExtractOptions eopts = load_extract_options(cfg);
  const auto outs = sweep_runs(field, *target, ps, load_minimize_options(cfg, opts), eopts, tube, opts.threads);

  // The run closest to p = 2 supplies the extracted set.
  std::size_t last = 0;
  for (std::size_t i = 1; i < ps.size(); ++i)
    if (ps[i] > ps[last]) last = i;
  const RunOutcome& top = outs[last];
  const Extraction ex = extract_singular_set(top.measure, top.result.u, eopts);

  std::vector<SweepRecord> records;
  for (const auto& o : outs) records.push_back(o.record);
  const Extrapolation fit = extrapolate_to_p2(records);

  ojson j;
  j["solver"] = {{"mass", solved.mass}, {"chain", chain_json(solved.best)}};
  double tube_mass = 0.0;
  ojson dens = ojson::array();
  for (std::size_t e = 0; e < ex.chain.edges.size(); ++e) {
    const DensityEstimate d = segment_density(top.measure, ex.chain.segment(e), table, tube);
    tube_mass += d.tube_mass;
    dens.push_back({{"edge", e},
                    {"theta", d.theta},
                    {"nearest_class", d.nearest_class},
                    {"nearest_value", d.nearest_value},
                    {"relative_gap", d.relative_gap},
                    {"fit_rms", ex.fit_rms[e]}});
  }
  j["extracted"] = {{"p", ps[last]}, {"chain", chain_json(ex.chain)}, {"tube_mass", tube_mass}};
  const auto sa = solved.best.segments();
  const auto sb = ex.chain.segments();
  if (!sa.empty() && !sb.empty()) {
    j["hausdorff"] = hausdorff_distance(sa, sb, 0.25 * h);
  } else {
    j["hausdorff"] = nullptr;
  }
  j["h"] = h;
  j["densities"] = dens;
  ojson sweep = ojson::array();
  for (const auto& r : records) sweep.push_back(ojson::parse(sweep_record_json(r)));
  j["sweep"] = sweep;
  j["extrapolation"] = {{"intercept", fit.intercept}, {"slope", fit.slope}, {"predicted_mass", solved.mass}};
  write_atomic(opts.out / "compare_report.json", j.dump(2) + "\n");

  PlotData plot;
  plot.sweep = records;
  const Vec3 x0 = top.result.u.domain().center;
  const auto radii = monotonicity_radii(top.result.u, x0);
  if (!radii.empty()) {
    const auto prof = monotonicity_profile(top.result.u, ps[last], x0, radii);
    for (std::size_t k = 0; k < radii.size(); ++k) plot.monotonicity.emplace_back(radii[k], prof[k]);
  }
  const Segment seg = !sb.empty() ? sb.front() : sa.front();
  plot.density = density_along(top.measure, seg, tube, 20);
  emit_plot_data(plot, opts.out);
  return kExitOk;
}

int run_validate(const Config& cfg, const RunOptions& opts) {
  const FiniteGroup group = load_group(cfg);
  const BoundaryChargeSpec spec = read_spec_csv_file(cfg.existing_path("spec.file").string());
  const std::filesystem::path chain_path = !opts.chain.empty() ? opts.chain : cfg.existing_path("validate.chain");
  const Chain chain = read_chain_file(chain_path.string());
  const ValidationReport rep = validate_chain(chain, spec, group, group.is_abelian());
  ojson j;
  j["valid"] = rep.valid();
  j["necessary_only"] = rep.necessary_only;
  j["issues"] = ojson::array();
  for (const auto& i : rep.issues) j["issues"].push_back({{"kind", std::string(to_string(i.kind))}, {"detail", i.detail}});
  if (!spec.empty()) {
    const HullReport hull = convex_hull_containment(chain, spec);
    j["hull"] = {{"inside", hull.inside}, {"max_violation", hull.max_violation}, {"dimension", hull.hull_dimension}};
  }
  write_atomic(opts.out / "validation.json", j.dump(2) + "\n");
  return rep.valid() ? kExitOk : kExitInfeasible;
}

}  // namespace plateau_cli
