#pragma once

// Targets embedded in a Euclidean ambient space, with the nearest point
// retraction and tangent projections used by the projected-gradient solver.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hplateau/group_algebra.hpp"

namespace hplateau {

using Ambient = Eigen::VectorXd;

class TargetManifold {
 public:
  virtual ~TargetManifold() = default;

  virtual int ambient_dim() const = 0;
  // Radius of the tube on which the nearest point retraction is smooth.
  virtual double reach() const = 0;
  // Nearest manifold point. Defined everywhere; unique only inside the tube.
  virtual void project(const double* x, double* out) const = 0;
  virtual double distance(const double* x) const = 0;
  // Orthogonal projection of v onto the tangent space at the manifold point x.
  virtual void tangent_project(const double* x, const double* v, double* out) const = 0;
  // Class of a closed loop of samples (not repeating the first sample).
  // Throws LoopHitsSingularSet when the loop passes too close to the
  // singular set of the retraction or is too coarsely sampled to follow.
  virtual int loop_class(std::span<const Ambient> loop) const = 0;
  virtual const char* name() const = 0;

  Ambient project(const Ambient& x) const;
  Ambient tangent_project(const Ambient& x, const Ambient& v) const;
};

// RP^2 as {n n^T - Id/3} inside the 5-dimensional space of traceless
// symmetric matrices, written in an orthonormal (Frobenius) basis.
class Rp2Target final : public TargetManifold {
 public:
  int ambient_dim() const override { return 5; }
  double reach() const override;
  void project(const double* x, double* out) const override;
  double distance(const double* x) const override;
  void tangent_project(const double* x, const double* v, double* out) const override;
  // 0 for contractible loops, 1 when the director flips sign around the loop.
  int loop_class(std::span<const Ambient> loop) const override;
  const char* name() const override { return "rp2"; }

  using TargetManifold::project;
  using TargetManifold::tangent_project;

  static Eigen::Matrix3d to_matrix(const double* x);
  static void from_matrix(const Eigen::Matrix3d& m, double* out);
  // Point of the target represented by the director n (any nonzero length).
  static Ambient from_director(const Eigen::Vector3d& n);
  static Eigen::Vector3d director(const double* x);
};

// The unit circle in R^2. loop_class returns the winding number.
class CircleTarget final : public TargetManifold {
 public:
  int ambient_dim() const override { return 2; }
  double reach() const override { return 1.0; }
  void project(const double* x, double* out) const override;
  double distance(const double* x) const override;
  void tangent_project(const double* x, const double* v, double* out) const override;
  int loop_class(std::span<const Ambient> loop) const override;
  const char* name() const override { return "circle"; }

  using TargetManifold::project;
  using TargetManifold::tangent_project;
};

std::unique_ptr<TargetManifold> make_target(const std::string& name);

}  // namespace hplateau
