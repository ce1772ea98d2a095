#include "hplateau/manifold.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "hplateau/errors.hpp"

namespace hplateau {

Ambient TargetManifold::project(const Ambient& x) const {
  Ambient out(ambient_dim());
  project(x.data(), out.data());
  return out;
}

Ambient TargetManifold::tangent_project(const Ambient& x, const Ambient& v) const {
  Ambient out(ambient_dim());
  tangent_project(x.data(), v.data(), out.data());
  return out;
}

namespace {

const double kS2 = std::sqrt(2.0);
const double kS6 = std::sqrt(6.0);

struct Leading {
  Eigen::Vector3d n;
  double gap;  // top eigenvalue minus the second one
};

Leading leading_eigenvector(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(m);
  return {es.eigenvectors().col(2), es.eigenvalues()(2) - es.eigenvalues()(1)};
}

}  // namespace

Eigen::Matrix3d Rp2Target::to_matrix(const double* x) {
  Eigen::Matrix3d m;
  const double d1 = x[0] / kS2;
  const double d2 = x[1] / kS6;
  m(0, 0) = d1 - d2;
  m(1, 1) = -d1 - d2;
  m(2, 2) = 2.0 * d2;
  m(0, 1) = m(1, 0) = x[2] / kS2;
  m(0, 2) = m(2, 0) = x[3] / kS2;
  m(1, 2) = m(2, 1) = x[4] / kS2;
  return m;
}

void Rp2Target::from_matrix(const Eigen::Matrix3d& m, double* out) {
  out[0] = (m(0, 0) - m(1, 1)) / kS2;
  out[1] = (2.0 * m(2, 2) - m(0, 0) - m(1, 1)) / kS6;
  out[2] = kS2 * 0.5 * (m(0, 1) + m(1, 0));
  out[3] = kS2 * 0.5 * (m(0, 2) + m(2, 0));
  out[4] = kS2 * 0.5 * (m(1, 2) + m(2, 1));
}

Ambient Rp2Target::from_director(const Eigen::Vector3d& n) {
  const Eigen::Vector3d u = n.normalized();
  Ambient out(5);
  from_matrix(u * u.transpose() - Eigen::Matrix3d::Identity() / 3.0, out.data());
  return out;
}

Eigen::Vector3d Rp2Target::director(const double* x) { return leading_eigenvector(to_matrix(x)).n; }

double Rp2Target::reach() const { return 1.0 / kS2; }

void Rp2Target::project(const double* x, double* out) const {
  const Eigen::Vector3d n = leading_eigenvector(to_matrix(x)).n;
  from_matrix(n * n.transpose() - Eigen::Matrix3d::Identity() / 3.0, out);
}

double Rp2Target::distance(const double* x) const {
  double y[5];
  project(x, y);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

void Rp2Target::tangent_project(const double* x, const double* v, double* out) const {
  const Eigen::Vector3d n = leading_eigenvector(to_matrix(x)).n;
  const Eigen::Matrix3d a = to_matrix(v);
  const Eigen::Vector3d an = a * n;
  const Eigen::Vector3d w = an - n * n.dot(an);
  from_matrix(n * w.transpose() + w * n.transpose(), out);
}

int Rp2Target::loop_class(std::span<const Ambient> loop) const {
  if (loop.size() < 3) throw Error(Errc::invalid_argument, "loop needs at least 3 samples");
  // On the target the eigen gap is 1; half of it marks the edge of the tube.
  constexpr double kMinGap = 0.5;
  constexpr double kMinAlign = 0.5;
  std::vector<Eigen::Vector3d> dirs;
  dirs.reserve(loop.size());
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const auto lead = leading_eigenvector(to_matrix(loop[k].data()));
    if (lead.gap < kMinGap)
      throw Error(Errc::loop_hits_singular_set,
                  "eigen gap " + std::to_string(lead.gap) + " at sample " + std::to_string(k));
    dirs.push_back(lead.n);
  }
  Eigen::Vector3d cur = dirs[0];
  for (std::size_t k = 1; k <= dirs.size(); ++k) {
    const Eigen::Vector3d& next = dirs[k % dirs.size()];
    const double c = cur.dot(next);
    if (std::abs(c) < kMinAlign)
      throw Error(Errc::loop_hits_singular_set, "director turns too fast at sample " + std::to_string(k));
    if (k == dirs.size()) return c < 0.0 ? 1 : 0;
    cur = c < 0.0 ? Eigen::Vector3d(-next) : next;
  }
  return 0;
}

void CircleTarget::project(const double* x, double* out) const {
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0) {
    out[0] = 1.0;
    out[1] = 0.0;
    return;
  }
  out[0] = x[0] / r;
  out[1] = x[1] / r;
}

double CircleTarget::distance(const double* x) const { return std::abs(std::hypot(x[0], x[1]) - 1.0); }

void CircleTarget::tangent_project(const double* x, const double* v, double* out) const {
  const double t0 = -x[1];
  const double t1 = x[0];
  const double s = t0 * v[0] + t1 * v[1];
  out[0] = s * t0;
  out[1] = s * t1;
}

int CircleTarget::loop_class(std::span<const Ambient> loop) const {
  if (loop.size() < 3) throw Error(Errc::invalid_argument, "loop needs at least 3 samples");
  double total = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Ambient& a = loop[k];
    const Ambient& b = loop[(k + 1) % loop.size()];
    if (std::hypot(a[0], a[1]) < 0.5)
      throw Error(Errc::loop_hits_singular_set, "sample " + std::to_string(k) + " near the origin");
    double d = std::atan2(b[1], b[0]) - std::atan2(a[1], a[0]);
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
    if (std::abs(d) > std::numbers::pi / 2)
      throw Error(Errc::loop_hits_singular_set, "phase jumps at sample " + std::to_string(k));
    total += d;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

std::unique_ptr<TargetManifold> make_target(const std::string& name) {
  if (name == "rp2") return std::make_unique<Rp2Target>();
  if (name == "circle") return std::make_unique<CircleTarget>();
  throw Error(Errc::invalid_argument, "unknown target '" + name + "'");
}

}  // namespace hplateau
