#pragma once

// Flat-torus geometry on T^d = R^d / Z^d.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

namespace ifsshadow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point of T^d. Coordinates are reduced into [0, 1) on construction and
/// never leave that range.
class SpacePoint {
 public:
  SpacePoint() = default;
  explicit SpacePoint(Vector coords);
  SpacePoint(std::initializer_list<double> coords);

  static SpacePoint zero(int dim);

  int dim() const { return static_cast<int>(coords_.size()); }
  const Vector& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }

  /// Point reached by moving along the displacement v (then reduced mod 1).
  SpacePoint shifted(const Vector& v) const;

  friend bool operator==(const SpacePoint& a, const SpacePoint& b) {
    return a.coords_ == b.coords_;
  }

 private:
  Vector coords_;
};

/// Reduces a real number into [0, 1).
double wrap_unit(double x);

/// Flat torus metric: sqrt(sum_i min(|d_i|, 1 - |d_i|)^2).
double dist(const SpacePoint& p, const SpacePoint& q);

/// Displacement v with components in (-0.5, 0.5] and p + v = q (mod 1).
/// Throws AntipodalAmbiguity when some component difference is exactly 1/2.
Vector geodesic_displacement(const SpacePoint& p, const SpacePoint& q);

/// Nearest-representative displacement from p to q; ties resolve to +1/2.
/// Used for chain residuals where a tie has measure zero.
Vector lift_displacement(const SpacePoint& p, const SpacePoint& q);

/// Componentwise nearest representative of a raw difference.
Vector lift_difference(const Vector& raw);

/// Upper bound of dist on T^d.
double torus_diameter(int dim);

/// The regular lattice {i / resolution}^d on T^d. Doubling the resolution
/// yields a superset, so grid suprema are nondecreasing under refinement.
class MetricGrid {
 public:
  MetricGrid(int dim, int resolution);

  /// Per-axis resolution used when a caller does not pick one:
  /// 4096 (d=1), 256 (d=2), 64 (d=3), 24 (d=4), 8 otherwise.
  static int default_resolution(int dim);
  static MetricGrid with_default_resolution(int dim) {
    return MetricGrid(dim, default_resolution(dim));
  }

  int dim() const { return dim_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return size_; }
  SpacePoint point(std::size_t index) const;

  /// Every point of T^d lies within this distance of some grid point.
  double covering_radius() const;

 private:
  int dim_;
  int resolution_;
  std::size_t size_;
};

}  // namespace ifsshadow
