#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ifsshadow/ifs.hpp"
#include "ifsshadow/smooth_map.hpp"

namespace ifsshadow {

/// The toral automorphism (u, v) -> (2u + v, u + v).
SmoothMap cat_map();

/// Coupling coefficient of the skew-product torus example.
enum class TorusVariant { kF1, kF2 };
/// c(u, v) = cos^2(pi (u + v)) for F1, cos^2(pi (u - v)) for F2.
double torus_coupling(TorusVariant variant, double u, double v);

/// Skew product on T^4:
///   (x, y, u, v) -> (2x - c(u,v) f(x) + y, x - c(u,v) f(x) + y, 2u + v, u + v)
/// with f(x) = sin(2 pi x) / (2 pi). Closed-form inverse and analytic Jacobian.
SmoothMap torus_map(TorusVariant variant);

/// Affine map x -> M x + b. An integer M with det = +-1 gives a toral
/// automorphism (torus domain, linear part recorded); anything else is a
/// unit-cube formula with the formal inverse M^-1 (x - b).
SmoothMap affine_map(const Matrix& m, const Vector& b);

/// x -> x + angle on T^d.
SmoothMap rotation_map(const Vector& angle);

/// Coordinatewise polynomial x_i -> sum_j coeffs[i][j] x_i^j on the unit
/// cube; inverted by Newton's method.
SmoothMap polynomial_map(const std::vector<std::vector<double>>& coeffs);

/// {F1, F2} on T^4.
IFS build_torus_example();
IFS build_cat_ifs();
/// {x -> q x + b_i} on T^1, one map per offset. Requires q in (0, 1) and
/// 0 <= b_i <= 1 - q so every image stays inside [0, 1).
IFS build_contraction_ifs(double q, const std::vector<double>& offsets);
/// d-dimensional variant: {x -> q x + b_i} with vector offsets.
IFS build_contraction_ifs(double q, const std::vector<Vector>& offsets);
IFS build_rotation_ifs(const std::vector<double>& angles);
IFS build_rotation_ifs(const std::vector<Vector>& angles);
IFS build_identity_ifs(int dim);

/// Named systems understood by the CLI.
struct SystemCatalogEntry {
  std::string name;
  std::string usage;
  std::string doc;
};
const std::vector<SystemCatalogEntry>& system_catalog();

/// Builds a system from a catalog name such as "cat", "torus", "torus_F1",
/// "contraction:0.5", "contraction2d:0.5", "rotation:0.1,0.3", "identity:2".
/// Throws ConfigError for unknown names.
IFS system_from_name(const std::string& spec);

struct MapInvariantReport {
  double max_roundtrip = 0.0;   ///< max dist(f^-1(f(x)), x)
  double max_jacobian_error = 0.0;  ///< max entrywise |Df - central FD|
  bool ok = true;
};

/// Round-trip (<= 1e-10) and Jacobian-consistency (<= 1e-4, h = 1e-6)
/// checks on `samples` seeded random points. Unit-cube maps are sampled in
/// [0.01, 0.99]^d so finite differences do not straddle the seam.
MapInvariantReport verify_map_invariants(const SmoothMap& m, std::size_t samples, std::uint64_t seed);

/// Runs verify_map_invariants on every map; throws Error naming the first
/// failing map.
void require_map_invariants(const IFS& ifs, std::size_t samples = 200, std::uint64_t seed = 1);

}  // namespace ifsshadow
