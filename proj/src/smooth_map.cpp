#include "ifsshadow/smooth_map.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>

#include "ifsshadow/errors.hpp"

namespace ifsshadow {

namespace {

constexpr int kNewtonMaxIterations = 50;
constexpr double kNewtonStepTolerance = 1e-12;
constexpr double kInverseResidualTolerance = 1e-10;

}  // namespace

SmoothMap::SmoothMap(std::string label, int dim, PointFn forward, PointFn inverse,
                     JacobianFn jacobian, Domain domain)
    : impl_(std::make_shared<const Impl>(Impl{std::move(label), dim, std::move(forward),
                                              std::move(inverse), std::move(jacobian), domain,
                                              std::nullopt})) {
  if (dim < 1) throw Error("map dimension must be positive");
  if (!impl_->forward) throw Error("map '" + impl_->label + "' has no forward evaluation");
}

SmoothMap SmoothMap::with_linear_part(Matrix a) const {
  if (a.rows() != dim() || a.cols() != dim()) throw DimensionMismatch(dim(), static_cast<int>(a.rows()));
  SmoothMap copy = *this;
  Impl impl = *impl_;
  impl.linear_part = std::move(a);
  copy.impl_ = std::make_shared<const Impl>(std::move(impl));
  return copy;
}

SpacePoint SmoothMap::operator()(const SpacePoint& p) const {
  if (p.dim() != dim()) throw DimensionMismatch(dim(), p.dim());
  return impl_->forward(p);
}

Matrix SmoothMap::jacobian(const SpacePoint& p) const {
  if (!impl_->jacobian) throw Error("map '" + label() + "' has no Jacobian");
  if (p.dim() != dim()) throw DimensionMismatch(dim(), p.dim());
  return impl_->jacobian(p);
}

SpacePoint eval_map(const SmoothMap& m, const SpacePoint& p) { return m(p); }

SpacePoint newton_invert(const SmoothMap& m, const SpacePoint& p, const SpacePoint& initial_guess) {
  if (!m.has_jacobian()) throw NotInvertible("map '" + m.label() + "' has neither inverse nor Jacobian");
  SpacePoint q = initial_guess;
  SpacePoint best = q;
  double best_residual = dist(m(q), p);
  int it = 0;
  for (; it < kNewtonMaxIterations; ++it) {
    const Vector r = lift_displacement(m(q), p);
    const Matrix j = m.jacobian(q);
    const Vector step = j.partialPivLu().solve(r);
    if (!step.allFinite()) break;
    q = q.shifted(step);
    const double res = dist(m(q), p);
    if (res < best_residual) {
      best_residual = res;
      best = q;
    }
    if (step.norm() <= kNewtonStepTolerance) break;
  }
  if (best_residual > kInverseResidualTolerance) {
    throw ConvergenceError("Newton inversion of '" + m.label() + "' did not converge", best_residual, it);
  }
  return best;
}

SpacePoint invert_map(const SmoothMap& m, const SpacePoint& p) {
  if (p.dim() != m.dim()) throw DimensionMismatch(m.dim(), p.dim());
  if (m.impl_->inverse) return m.impl_->inverse(p);
  return newton_invert(m, p, p);
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
  if (outer.dim() != inner.dim()) throw DimensionMismatch(outer.dim(), inner.dim());
  SmoothMap::PointFn forward = [outer, inner](const SpacePoint& p) { return outer(inner(p)); };
  SmoothMap::PointFn inverse;
  if (outer.invertible() && inner.invertible()) {
    inverse = [outer, inner](const SpacePoint& p) { return invert_map(inner, invert_map(outer, p)); };
  }
  SmoothMap::JacobianFn jacobian;
  if (outer.has_jacobian() && inner.has_jacobian()) {
    jacobian = [outer, inner](const SpacePoint& p) -> Matrix {
      return outer.jacobian(inner(p)) * inner.jacobian(p);
    };
  }
  const Domain domain = (outer.domain() == Domain::kUnitCube || inner.domain() == Domain::kUnitCube)
                            ? Domain::kUnitCube
                            : Domain::kTorus;
  return SmoothMap("compose(" + outer.label() + "," + inner.label() + ")", outer.dim(),
                   std::move(forward), std::move(inverse), std::move(jacobian), domain);
}

SmoothMap identity_map(int dim) {
  auto id = [](const SpacePoint& p) { return p; };
  SmoothMap m("identity(" + std::to_string(dim) + ")", dim, id, id,
              [dim](const SpacePoint&) -> Matrix { return Matrix::Identity(dim, dim); });
  return m.with_linear_part(Matrix::Identity(dim, dim));
}

Matrix finite_difference_jacobian(const SmoothMap& m, const SpacePoint& p, double h) {
  const int d = m.dim();
  Matrix j(d, d);
  for (int c = 0; c < d; ++c) {
    Vector e = Vector::Zero(d);
    e[c] = h;
    const SpacePoint plus = m(p.shifted(e));
    const SpacePoint minus = m(p.shifted(-e));
    j.col(c) = lift_displacement(minus, plus) / (2.0 * h);
  }
  return j;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  const Matrix gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace ifsshadow
