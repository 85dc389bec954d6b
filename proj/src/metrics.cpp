#include "ifsshadow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ifsshadow/errors.hpp"
#include "ifsshadow/parallel.hpp"

namespace ifsshadow {

namespace {

void require_invertible(const SmoothMap& m) {
  if (!m.invertible()) throw NotInvertible("rho0 needs an invertible map; '" + m.label() + "' is not");
}

void require_same_dim(const SmoothMap& f, const SmoothMap& g, const MetricGrid& grid) {
  if (f.dim() != g.dim()) throw DimensionMismatch(f.dim(), g.dim());
  if (f.dim() != grid.dim()) throw DimensionMismatch(f.dim(), grid.dim());
}

double pair_max(const IFS& f, const IFS& g, PairingMode mode,
                const std::function<double(const SmoothMap&, const SmoothMap&)>& metric) {
  if (f.dim() != g.dim()) throw DimensionMismatch(f.dim(), g.dim());
  if (same_family(f, g)) return 0.0;
  double best = 0.0;
  if (mode == PairingMode::kMatched) {
    if (f.size() != g.size()) {
      throw Error("matched pairing needs families of equal size (" + std::to_string(f.size()) + " vs " +
                  std::to_string(g.size()) + ")");
    }
    for (std::size_t i = 0; i < f.size(); ++i) best = std::max(best, metric(f[i], g[i]));
    return best;
  }
  for (const auto& a : f.maps()) {
    for (const auto& b : g.maps()) best = std::max(best, metric(a, b));
  }
  return best;
}

}  // namespace

double rho0(const SmoothMap& f, const SmoothMap& g, const MetricGrid& grid) {
  require_same_dim(f, g, grid);
  require_invertible(f);
  require_invertible(g);
  return parallel_max(grid.size(), [&](std::size_t i) {
    const SpacePoint x = grid.point(i);
    const double fwd = dist(f(x), g(x));
    const double inv = dist(invert_map(f, x), invert_map(g, x));
    return std::max(fwd, inv);
  });
}

double rho1(const SmoothMap& f, const SmoothMap& g, const MetricGrid& grid) {
  require_same_dim(f, g, grid);
  if (!f.has_jacobian()) throw Error("rho1 needs a Jacobian for '" + f.label() + "'");
  if (!g.has_jacobian()) throw Error("rho1 needs a Jacobian for '" + g.label() + "'");
  const double zero_order = rho0(f, g, grid);
  const double first_order = parallel_max(grid.size(), [&](std::size_t i) {
    const SpacePoint x = grid.point(i);
    return spectral_norm(f.jacobian(x) - g.jacobian(x));
  });
  return zero_order + first_order;
}

PairingMode parse_pairing_mode(const std::string& name) {
  if (name == "matched") return PairingMode::kMatched;
  if (name == "all-pairs" || name == "all_pairs") return PairingMode::kAllPairs;
  throw Error("unknown pairing mode '" + name + "'");
}

const char* to_string(PairingMode mode) {
  return mode == PairingMode::kMatched ? "matched" : "all-pairs";
}

double dist_D0(const IFS& f, const IFS& g, const MetricGrid& grid, PairingMode mode) {
  return pair_max(f, g, mode, [&](const SmoothMap& a, const SmoothMap& b) { return rho0(a, b, grid); });
}

double dist_D1(const IFS& f, const IFS& g, const MetricGrid& grid, PairingMode mode) {
  return pair_max(f, g, mode, [&](const SmoothMap& a, const SmoothMap& b) { return rho1(a, b, grid); });
}

double lipschitz_estimate(const SmoothMap& f, const MetricGrid& grid) {
  if (f.dim() != grid.dim()) throw DimensionMismatch(f.dim(), grid.dim());
  if (f.has_jacobian()) {
    return parallel_max(grid.size(), [&](std::size_t i) { return spectral_norm(f.jacobian(grid.point(i))); });
  }
  const double h = 1.0 / grid.resolution();
  return parallel_max(grid.size(), [&](std::size_t i) {
    const SpacePoint x = grid.point(i);
    const SpacePoint fx = f(x);
    double m = 0.0;
    for (int axis = 0; axis < f.dim(); ++axis) {
      Vector e = Vector::Zero(f.dim());
      e[axis] = h;
      m = std::max(m, dist(f(x.shifted(e)), fx) / h);
    }
    return m;
  });
}

double inverse_lipschitz_estimate(const SmoothMap& f, const MetricGrid& grid) {
  if (f.dim() != grid.dim()) throw DimensionMismatch(f.dim(), grid.dim());
  if (!f.has_jacobian()) throw Error("inverse Lipschitz estimate needs a Jacobian for '" + f.label() + "'");
  return parallel_max(grid.size(), [&](std::size_t i) {
    const Matrix j = f.jacobian(grid.point(i));
    Eigen::JacobiSVD<Matrix> svd(j);
    const double smin = svd.singularValues().minCoeff();
    return smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
  });
}

}  // namespace ifsshadow
