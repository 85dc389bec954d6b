#include "ifsshadow/space.hpp"

#include <cmath>
#include <sstream>

#include "ifsshadow/errors.hpp"

namespace ifsshadow {

DimensionMismatch::DimensionMismatch(int expected, int got)
    : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
            std::to_string(got)) {}

NotContracting::NotContracting(const std::string& label, double lipschitz)
    : Error([&] {
        std::ostringstream os;
        os << "map '" << label << "' is not a contraction on the sampled grid (Lipschitz estimate "
           << lipschitz << ")";
        return os.str();
      }()),
      lipschitz_(lipschitz) {}

double wrap_unit(double x) {
  double r = x - std::floor(x);
  // x slightly below an integer can round up to exactly 1.0.
  if (r >= 1.0) r = 0.0;
  return r + 0.0;  // folds -0.0 into +0.0
}

SpacePoint::SpacePoint(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() == 0) throw Error("SpacePoint needs at least one coordinate");
  for (Eigen::Index i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) throw Error("SpacePoint coordinate is not finite");
    coords_[i] = wrap_unit(coords_[i]);
  }
}

SpacePoint::SpacePoint(std::initializer_list<double> coords)
    : SpacePoint(Vector(Eigen::Map<const Vector>(coords.begin(), coords.size()))) {}

SpacePoint SpacePoint::zero(int dim) { return SpacePoint(Vector::Zero(dim)); }

SpacePoint SpacePoint::shifted(const Vector& v) const {
  if (v.size() != coords_.size()) throw DimensionMismatch(dim(), static_cast<int>(v.size()));
  return SpacePoint(Vector(coords_ + v));
}

double dist(const SpacePoint& p, const SpacePoint& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch(p.dim(), q.dim());
  double sum = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    const double a = std::abs(p[i] - q[i]);
    const double m = std::min(a, 1.0 - a);
    sum += m * m;
  }
  return std::sqrt(sum);
}

Vector lift_difference(const Vector& raw) {
  Vector v(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    // Result lies in (-0.5, 0.5].
    v[i] = raw[i] - std::ceil(raw[i] - 0.5);
  }
  return v;
}

Vector lift_displacement(const SpacePoint& p, const SpacePoint& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch(p.dim(), q.dim());
  return lift_difference(q.coords() - p.coords());
}

Vector geodesic_displacement(const SpacePoint& p, const SpacePoint& q) {
  Vector v = lift_displacement(p, q);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) == 0.5) {
      throw AntipodalAmbiguity("shortest torus path is ambiguous on axis " + std::to_string(i) +
                               "; perturb the inputs");
    }
  }
  return v;
}

double torus_diameter(int dim) { return std::sqrt(static_cast<double>(dim)) / 2.0; }

MetricGrid::MetricGrid(int dim, int resolution) : dim_(dim), resolution_(resolution), size_(1) {
  if (dim < 1) throw Error("grid dimension must be positive");
  if (resolution < 1) throw Error("grid resolution must be positive");
  for (int i = 0; i < dim; ++i) size_ *= static_cast<std::size_t>(resolution);
}

int MetricGrid::default_resolution(int dim) {
  switch (dim) {
    case 1: return 4096;
    case 2: return 256;
    case 3: return 64;
    case 4: return 24;
    default: return 8;
  }
}

SpacePoint MetricGrid::point(std::size_t index) const {
  Vector c(dim_);
  const auto n = static_cast<std::size_t>(resolution_);
  for (int i = 0; i < dim_; ++i) {
    c[i] = static_cast<double>(index % n) / static_cast<double>(resolution_);
    index /= n;
  }
  return SpacePoint(std::move(c));
}

double MetricGrid::covering_radius() const {
  return std::sqrt(static_cast<double>(dim_)) / (2.0 * resolution_);
}

}  // namespace ifsshadow
