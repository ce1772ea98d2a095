#include "hplateau/pharmonic.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "hplateau/errors.hpp"

namespace hplateau {

double cell_gradient_sq(const GridMap& u, std::size_t base) {
  const int nu = u.nu();
  const double* u0 = u.value(base);
  double s = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double* ud = u.value(base + u.stride(d));
    for (int k = 0; k < nu; ++k) s += (ud[k] - u0[k]) * (ud[k] - u0[k]);
  }
  return s / (u.h() * u.h());
}

Eigen::MatrixXd cell_gradient(const GridMap& u, std::size_t base) {
  const int nu = u.nu();
  Eigen::MatrixXd du(nu, 3);
  const double* u0 = u.value(base);
  for (int d = 0; d < 3; ++d) {
    const double* ud = u.value(base + u.stride(d));
    for (int k = 0; k < nu; ++k) du(k, d) = (ud[k] - u0[k]) / u.h();
  }
  return du;
}

void check_on_manifold(const GridMap& u, const TargetManifold& target, double tol) {
  if (u.nu() != target.ambient_dim())
    throw Error(Errc::invalid_argument, "grid and target ambient dimensions differ");
  for (std::size_t n = 0; n < u.node_count(); ++n) {
    if (u.kind(n) == NodeKind::outside) continue;
    const double d = target.distance(u.value(n));
    if (!(d <= tol))
      throw Error(Errc::off_manifold_value,
                  "node " + std::to_string(n) + " is " + std::to_string(d) + " from the target");
  }
}

double p_energy_unchecked(const GridMap& u, double p) {
  const double h3 = u.h() * u.h() * u.h();
  double e = 0.0;
  for (std::size_t c = 0; c < u.node_count(); ++c) {
    if (!u.cell_active(c)) continue;
    const double s = cell_gradient_sq(u, c);
    if (s > 0.0) e += std::pow(s, 0.5 * p);
  }
  return e * h3 / p;
}

double p_energy(const GridMap& u, const TargetManifold& target, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw Error(Errc::invalid_argument, "p must lie in [1, 2]");
  check_on_manifold(u, target);
  return p_energy_unchecked(u, p);
}

double p_energy_gradient(const GridMap& u, double p, std::vector<double>& grad, double eps) {
  const int nu = u.nu();
  const double h = u.h();
  const double h3 = h * h * h;
  grad.assign(u.values().size(), 0.0);
  double e = 0.0;
  for (std::size_t c = 0; c < u.node_count(); ++c) {
    if (!u.cell_active(c)) continue;
    const double s = cell_gradient_sq(u, c);
    if (s > 0.0) e += std::pow(s, 0.5 * p);
    const double w = h * std::pow(s + eps * eps, 0.5 * (p - 2.0));
    const double* u0 = u.value(c);
    double* g0 = grad.data() + c * nu;
    for (int d = 0; d < 3; ++d) {
      const std::size_t n = c + u.stride(d);
      const double* ud = u.value(n);
      double* gd = grad.data() + n * nu;
      for (int k = 0; k < nu; ++k) {
        const double diff = w * (ud[k] - u0[k]);
        gd[k] += diff;
        g0[k] -= diff;
      }
    }
  }
  return e * h3 / p;
}

EnergyMeasure energy_measure(const GridMap& u, double p) {
  EnergyMeasure m;
  m.p = p;
  m.h = u.h();
  const double h3 = u.h() * u.h() * u.h();
  m.density.assign(u.node_count(), 0.0);
  m.active.assign(u.node_count(), 0);
  m.centers.resize(u.node_count());
  for (std::size_t c = 0; c < u.node_count(); ++c) {
    m.centers[c] = u.cell_center(c);
    if (!u.cell_active(c)) continue;
    m.active[c] = 1;
    const double s = cell_gradient_sq(u, c);
    const double d = s > 0.0 ? (2.0 - p) * std::pow(s, 0.5 * p) / p * h3 : 0.0;
    m.density[c] = d;
    m.total += d;
  }
  return m;
}

StressCell stress_tensor(const GridMap& u, std::size_t base, double p) {
  StressCell cell;
  cell.cell = base;
  const Eigen::MatrixXd du = cell_gradient(u, base);
  const Eigen::Matrix3d g = du.transpose() * du;
  const double s = g.trace();
  cell.grad_norm = std::sqrt(s);
  if (s == 0.0) return cell;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues()(2);
  for (int i = 0; i < 3; ++i)
    if (es.eigenvalues()(i) > 1e-12 * top) ++cell.rank;
  const double a = std::pow(s, 0.5 * p) / p;
  cell.T = a * Eigen::Matrix3d::Identity() - std::pow(s, 0.5 * (p - 2.0)) * g;
  return cell;
}

std::vector<StressCell> stress_field(const GridMap& u, double p) {
  std::vector<StressCell> out;
  for (std::size_t c = 0; c < u.node_count(); ++c)
    if (u.cell_active(c)) out.push_back(stress_tensor(u, c, p));
  return out;
}

}  // namespace hplateau
