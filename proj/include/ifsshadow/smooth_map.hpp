#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "ifsshadow/space.hpp"

namespace ifsshadow {

/// Where a map is well defined. Torus maps descend to T^d. Unit-cube maps
/// (affine contractions) are formulas on the fundamental domain [0,1)^d;
/// noise models keep their pseudo-orbits inside the cube.
enum class Domain { kTorus, kUnitCube };

/// An evaluable self-map of T^d with optional closed-form inverse and
/// Jacobian (derivative of the lift). Immutable and cheap to copy; the
/// callables are shared.
///
/// Labels are canonical descriptions of the map (parameters included) and
/// are what IFS equality compares.
class SmoothMap {
 public:
  using PointFn = std::function<SpacePoint(const SpacePoint&)>;
  using JacobianFn = std::function<Matrix(const SpacePoint&)>;

  SmoothMap(std::string label, int dim, PointFn forward, PointFn inverse = {},
            JacobianFn jacobian = {}, Domain domain = Domain::kTorus);

  const std::string& label() const { return impl_->label; }
  int dim() const { return impl_->dim; }
  Domain domain() const { return impl_->domain; }

  bool has_inverse() const { return static_cast<bool>(impl_->inverse); }
  bool has_jacobian() const { return static_cast<bool>(impl_->jacobian); }
  /// Closed-form inverse or a Jacobian for Newton inversion.
  bool invertible() const { return has_inverse() || has_jacobian(); }

  /// Integer matrix of a linear toral automorphism, when the map is one.
  const std::optional<Matrix>& linear_part() const { return impl_->linear_part; }
  SmoothMap with_linear_part(Matrix a) const;

  SpacePoint operator()(const SpacePoint& p) const;
  Matrix jacobian(const SpacePoint& p) const;

 private:
  friend SpacePoint invert_map(const SmoothMap& m, const SpacePoint& p);

  struct Impl {
    std::string label;
    int dim;
    PointFn forward;
    PointFn inverse;
    JacobianFn jacobian;
    Domain domain;
    std::optional<Matrix> linear_part;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Image point, checked for dimension and reduced into [0,1)^d.
SpacePoint eval_map(const SmoothMap& m, const SpacePoint& p);

/// Preimage q with dist(m(q), p) <= 1e-10. Uses the closed-form inverse when
/// present, otherwise Newton's method on the lifted residual starting at p
/// (at most 50 iterations, stops when the step norm drops below 1e-12).
/// Throws NotInvertible or ConvergenceError.
SpacePoint invert_map(const SmoothMap& m, const SpacePoint& p);

/// Newton inversion regardless of any closed-form inverse.
SpacePoint newton_invert(const SmoothMap& m, const SpacePoint& p,
                         const SpacePoint& initial_guess);

/// outer after inner.
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

SmoothMap identity_map(int dim);

/// Central-difference Jacobian of the lift with step h.
Matrix finite_difference_jacobian(const SmoothMap& m, const SpacePoint& p, double h = 1e-6);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// Formats a double with round-trip precision; used for canonical labels.
std::string format_number(double x);

}  // namespace ifsshadow
