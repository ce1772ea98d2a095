#include <algorithm>
#include <cmath>
#include <numeric>

#include "hplateau/errors.hpp"
#include "hplateau/pharmonic.hpp"
#include "hplateau/rng.hpp"

namespace hplateau {

namespace {

// Cached cell list and free nodes of one grid.
struct Problem {
  const GridMap* grid;
  double p;
  std::vector<std::size_t> cells;
  std::vector<std::size_t> free_nodes;
  std::array<std::size_t, 3> stride{};
  int nu;
  double h;

  Problem(const GridMap& g, double p_) : grid(&g), p(p_), nu(g.nu()), h(g.h()) {
    for (std::size_t c = 0; c < g.node_count(); ++c)
      if (g.cell_active(c)) cells.push_back(c);
    for (std::size_t n = 0; n < g.node_count(); ++n)
      if (g.kind(n) == NodeKind::inside) free_nodes.push_back(n);
    for (int d = 0; d < 3; ++d) stride[d] = g.stride(d);
  }

  double cell_sq(const std::vector<double>& v, std::size_t c) const {
    const double* u0 = v.data() + c * nu;
    double s = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double* ud = v.data() + (c + stride[d]) * nu;
      for (int k = 0; k < nu; ++k) s += (ud[k] - u0[k]) * (ud[k] - u0[k]);
    }
    return s / (h * h);
  }

  double energy(const std::vector<double>& v) const {
    double e = 0.0;
    for (std::size_t c : cells) {
      const double s = cell_sq(v, c);
      if (s > 0.0) e += std::pow(s, 0.5 * p);
    }
    return e * h * h * h / p;
  }

  // Energy, ambient gradient and Jacobi diagonal.
  double energy_gradient(const std::vector<double>& v, std::vector<double>& g,
                         std::vector<double>& diag) const {
    g.assign(v.size(), 0.0);
    diag.assign(v.size() / nu, 0.0);
    double e = 0.0;
    for (std::size_t c : cells) {
      const double s = cell_sq(v, c);
      if (s > 0.0) e += std::pow(s, 0.5 * p);
      const double w = h * std::pow(s + kGradientEps * kGradientEps, 0.5 * (p - 2.0));
      const double* u0 = v.data() + c * nu;
      double* g0 = g.data() + c * nu;
      diag[c] += 3.0 * w;
      for (int d = 0; d < 3; ++d) {
        const std::size_t n = c + stride[d];
        diag[n] += w;
        const double* ud = v.data() + n * nu;
        double* gd = g.data() + n * nu;
        for (int k = 0; k < nu; ++k) {
          const double diff = w * (ud[k] - u0[k]);
          gd[k] += diff;
          g0[k] -= diff;
        }
      }
    }
    return e * h * h * h / p;
  }
};

double dot_free(const Problem& pb, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t n : pb.free_nodes)
    for (int k = 0; k < pb.nu; ++k) s += a[n * pb.nu + k] * b[n * pb.nu + k];
  return s;
}

void tangent_field(const Problem& pb, const TargetManifold& target, const std::vector<double>& at,
                   std::vector<double>& v) {
  std::vector<double> tmp(pb.nu);
  for (std::size_t n : pb.free_nodes) {
    target.tangent_project(at.data() + n * pb.nu, v.data() + n * pb.nu, tmp.data());
    std::copy(tmp.begin(), tmp.end(), v.begin() + static_cast<std::ptrdiff_t>(n * pb.nu));
  }
}

MinimizeResult run_once(const GridMap& start, const TargetManifold& target, double p,
                        const MinimizeOptions& opts) {
  const Problem pb(start, p);
  const int nu = pb.nu;
  MinimizeResult res;
  res.u = start;
  std::vector<double>& u = res.u.values();

  std::vector<double> g, diag, r(u.size()), z(u.size(), 0.0), d(u.size(), 0.0);
  std::vector<double> trial(u.size());
  std::vector<double> tmp(nu);

  double e = pb.energy_gradient(u, g, diag);
  res.initial_energy = e;
  if (opts.record_history) res.energy_history.push_back(e);

  auto riemannian = [&]() {
    r = g;
    tangent_field(pb, target, u, r);
    double mean = 0.0;
    for (std::size_t n : pb.free_nodes) mean += diag[n];
    mean = pb.free_nodes.empty() ? 1.0 : mean / static_cast<double>(pb.free_nodes.size());
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t n : pb.free_nodes) {
      const double dn = std::max(diag[n], 1e-12 * mean);
      for (int k = 0; k < nu; ++k) z[n * nu + k] = r[n * nu + k] / dn;
    }
  };

  riemannian();
  res.grad_norm0 = std::sqrt(dot_free(pb, r, r));
  res.grad_norm = res.grad_norm0;
  if (pb.free_nodes.empty() || res.grad_norm0 == 0.0) {
    res.energy = e;
    res.converged = true;
    return res;
  }
  for (std::size_t n : pb.free_nodes)
    for (int k = 0; k < nu; ++k) d[n * nu + k] = -z[n * nu + k];
  double rz = dot_free(pb, r, z);
  double t_prev = 0.5;
  std::vector<double> window;

  for (long it = 0; it < opts.max_iterations; ++it) {
    double slope = dot_free(pb, r, d);
    if (!(slope < 0.0)) {
      for (std::size_t n : pb.free_nodes)
        for (int k = 0; k < nu; ++k) d[n * nu + k] = -z[n * nu + k];
      slope = -rz;
    }
    double dmax = 0.0;
    for (std::size_t n : pb.free_nodes) {
      double s = 0.0;
      for (int k = 0; k < nu; ++k) s += d[n * nu + k] * d[n * nu + k];
      dmax = std::max(dmax, std::sqrt(s));
    }
    double t = std::min(1.0, 2.0 * t_prev);
    const double t_tube = opts.tube_fraction * target.reach() / std::max(dmax, 1e-300);
    if (t_tube < opts.min_step)
      throw Error(Errc::projection_out_of_reach, "search direction leaves the tube at every step size");
    t = std::min(t, t_tube);

    bool accepted = false;
    double e_new = e;
    while (t >= opts.min_step) {
      trial = u;
      for (std::size_t n : pb.free_nodes) {
        double* x = trial.data() + n * nu;
        for (int k = 0; k < nu; ++k) x[k] += t * d[n * nu + k];
        target.project(x, tmp.data());
        std::copy(tmp.begin(), tmp.end(), x);
      }
      e_new = pb.energy(trial);
      if (e_new <= e + opts.armijo * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    res.iterations = it + 1;
    if (!accepted) {
      // No descent along d at the floor step: try steepest descent once more.
      if (std::abs(slope + rz) > 1e-15 * std::abs(rz)) {
        for (std::size_t n : pb.free_nodes)
          for (int k = 0; k < nu; ++k) d[n * nu + k] = -z[n * nu + k];
        continue;
      }
      res.stalled = true;
      break;
    }
    t_prev = t;
    u.swap(trial);
    e = pb.energy_gradient(u, g, diag);
    if (opts.record_history) res.energy_history.push_back(e);

    const std::vector<double> z_old = z;
    riemannian();
    res.grad_norm = std::sqrt(dot_free(pb, r, r));
    if (res.grad_norm <= opts.tol * res.grad_norm0) {
      res.converged = true;
      break;
    }
    // Polak-Ribiere+ with the old direction carried to the new tangent spaces.
    const double rz_new = dot_free(pb, r, z);
    double cross = 0.0;
    for (std::size_t n : pb.free_nodes)
      for (int k = 0; k < nu; ++k) cross += r[n * nu + k] * z_old[n * nu + k];
    const double beta = std::max(0.0, (rz_new - cross) / rz);
    rz = rz_new;
    tangent_field(pb, target, u, d);
    for (std::size_t n : pb.free_nodes)
      for (int k = 0; k < nu; ++k) d[n * nu + k] = -z[n * nu + k] + beta * d[n * nu + k];

    window.push_back(e);
    if (static_cast<int>(window.size()) > opts.stall_window) {
      const double old = window[window.size() - 1 - opts.stall_window];
      if (old - e <= opts.stall_rel * std::max(std::abs(e), 1e-300)) {
        res.stalled = true;
        break;
      }
    }
  }
  res.energy = e;
  res.max_iterations_hit = !res.converged && !res.stalled && res.iterations >= opts.max_iterations;
  return res;
}

}  // namespace

void harmonic_extension(GridMap& u, const TargetManifold& target) {
  const int nu = u.nu();
  std::vector<std::size_t> free;
  std::vector<long> slot(u.node_count(), -1);
  for (std::size_t n = 0; n < u.node_count(); ++n)
    if (u.kind(n) == NodeKind::inside) {
      slot[n] = static_cast<long>(free.size());
      free.push_back(n);
    }
  const std::size_t m = free.size();
  if (m == 0) return;
  std::vector<std::array<long, 6>> nbr(m);
  for (std::size_t i = 0; i < m; ++i) {
    int q = 0;
    for (int d = 0; d < 3; ++d) {
      nbr[i][q++] = static_cast<long>(free[i] + u.stride(d));
      nbr[i][q++] = static_cast<long>(free[i] - u.stride(d));
    }
  }
  // Matrix-free conjugate gradients on the graph Laplacian, one component at a time.
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = 6.0 * x[i];
      for (long nb : nbr[i])
        if (slot[nb] >= 0) s -= x[slot[nb]];
      y[i] = s;
    }
  };
  std::vector<double> x(m), b(m), r(m), pdir(m), ap(m);
  for (int k = 0; k < nu; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (long nb : nbr[i])
        if (slot[nb] < 0) s += u.value(nb)[k];
      b[i] = s;
      x[i] = u.value(free[i])[k];
    }
    apply(x, ap);
    for (std::size_t i = 0; i < m; ++i) r[i] = b[i] - ap[i];
    pdir = r;
    double rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    const double bb = std::max(std::inner_product(b.begin(), b.end(), b.begin(), 0.0), 1e-300);
    for (int it = 0; it < 10000 && rr > 1e-24 * bb; ++it) {
      apply(pdir, ap);
      const double alpha = rr / std::inner_product(pdir.begin(), pdir.end(), ap.begin(), 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        x[i] += alpha * pdir[i];
        r[i] -= alpha * ap[i];
      }
      const double rr_new = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
      for (std::size_t i = 0; i < m; ++i) pdir[i] = r[i] + (rr_new / rr) * pdir[i];
      rr = rr_new;
    }
    for (std::size_t i = 0; i < m; ++i) u.value(free[i])[k] = x[i];
  }
  std::vector<double> tmp(nu);
  for (std::size_t n : free) {
    target.project(u.value(n), tmp.data());
    std::copy(tmp.begin(), tmp.end(), u.value(n));
  }
}

MinimizeResult minimize(const GridMap& initial, const TargetManifold& target, double p,
                        const MinimizeOptions& opts) {
  if (!(p > 1.0 && p <= 2.0)) throw Error(Errc::invalid_argument, "p must lie in (1, 2]");
  GridMap start = initial;
  if (opts.harmonic_init) harmonic_extension(start, target);
  check_on_manifold(start, target);

  MinimizeResult best = run_once(start, target, p, opts);
  const int nu = start.nu();
  for (int r = 0; r < opts.restarts; ++r) {
    CounterRng rng(opts.seed, "restart-" + std::to_string(r));
    GridMap perturbed = start;
    std::vector<double> tmp(nu);
    for (std::size_t n = 0; n < perturbed.node_count(); ++n) {
      if (perturbed.kind(n) != NodeKind::inside) continue;
      double* x = perturbed.value(n);
      for (int k = 0; k < nu; ++k) x[k] += opts.restart_noise * rng.normal();
      target.project(x, tmp.data());
      std::copy(tmp.begin(), tmp.end(), x);
    }
    MinimizeResult alt = run_once(perturbed, target, p, opts);
    if (alt.energy < best.energy) best = std::move(alt);
  }
  return best;
}

}  // namespace hplateau
