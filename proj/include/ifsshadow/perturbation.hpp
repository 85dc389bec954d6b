#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ifsshadow/ifs.hpp"
#include "ifsshadow/smooth_map.hpp"

namespace ifsshadow {

/// Radial profile exp(1 - 1/(1 - t^2)) for |t| < 1, zero beyond.
double bump_profile(double t);
double bump_profile_slope(double t);
/// max_t |profile'(t)|.
double bump_profile_max_slope();

/// x -> x + sum_i profile(dist(x, p_i) / R) d_i with d_i the displacement
/// from p_i to q_i. The balls B(p_i, R) are pairwise disjoint, so on each
/// ball the map is x + profile(.) d_i and is invertible when
/// max|profile'| max|d_i| / R < 1.
class BumpDiffeo {
 public:
  /// R defaults to 0.4 min(pairwise distances among centers and among
  /// targets, 0.5). Throws Infeasible when the supports overlap or the
  /// invertibility margin fails.
  BumpDiffeo(int dim, std::vector<SpacePoint> centers, std::vector<SpacePoint> targets,
             std::optional<double> support_radius = {});

  int dim() const { return dim_; }
  const std::vector<SpacePoint>& centers() const { return centers_; }
  const std::vector<Vector>& displacements() const { return displacements_; }
  double support_radius() const { return radius_; }
  double max_displacement() const;

  SpacePoint operator()(const SpacePoint& x) const;
  Matrix jacobian(const SpacePoint& x) const;
  SmoothMap as_map() const;

 private:
  int dim_;
  std::vector<SpacePoint> centers_;
  std::vector<Vector> displacements_;
  double radius_ = 0.0;
};

/// Diffeomorphism moving every p_i to q_i with rho0(f, id) < 2 delta.
/// Requires dim >= 2, distinct p_i, distinct q_i and dist(p_i, q_i) < delta.
/// An empty list gives the identity.
SmoothMap move_points_diffeo(const std::vector<std::pair<SpacePoint, SpacePoint>>& pairs, double delta, int dim);

/// k seeded pairs (p_i, q_i): the p_i pairwise at least min_sep apart (drawn
/// by rejection), q_i = p_i moved by a uniform vector of length below
/// max_shift. Throws Infeasible when min_sep cannot be met in 10000 draws.
std::vector<std::pair<SpacePoint, SpacePoint>> random_point_pairs(std::size_t k, double min_sep, double max_shift,
                                                                  int dim, std::uint64_t seed);

struct AdjustedPointsCheck {
  double max_shift = 0.0;        ///< max_k dist(x_k, y_k)
  double max_residual = 0.0;     ///< max_k dist(y_{k+1}, f(y_k))
  double min_separation = 0.0;   ///< min_{i<j} dist(y_i, y_j)
  double delta = 0.0;            ///< link slack of the input chain
  bool ok = false;
};

/// y_0..y_m close to x_0..x_m with small links and pairwise distinct points.
/// y_k = x_k unless it falls within s of an earlier y; then it is moved by s
/// along the coordinate direction that best separates it, where
/// s = 0.5 min(eta, 2 delta / (1 + L)) and L is the largest grid Lipschitz
/// estimate of the maps. Throws Infeasible when distinctness cannot be
/// reached.
std::vector<SpacePoint> adjusted_points(const IFS& ifs, const ChainRecord& xi, std::size_t m, double eta,
                                        int lipschitz_resolution = 0);

/// Measures the three properties: dist(x_k, y_k) < eta, links < 3 delta
/// (<= 1e-12 when delta = 0), distinct points.
AdjustedPointsCheck check_adjusted_points(const IFS& ifs, const ChainRecord& xi, const std::vector<SpacePoint>& y,
                                          double eta);

struct PerturbedIfs {
  explicit PerturbedIfs(IFS family) : g(std::move(family)) {}

  /// Maps g_{a,b} = h_a o f_b at index a N + b.
  IFS g;
  /// Index into the original family that each map of g perturbs.
  std::vector<int> base_index;
  /// Exact chain of g through the adjusted points, same window as the input.
  ChainRecord y;
  std::vector<SpacePoint> adjusted;
  double d0 = 0.0;             ///< matched distance to the replicated family
  double delta_limit = 0.0;    ///< largest admissible link slack for Delta
  double eta = 0.0;
  std::vector<double> support_radii;
};

struct PerturbationOptions {
  int grid_resolution = 0;     ///< grid of the distance and Lipschitz checks
  int extend_back = 0;         ///< exact points added before the window
  double eta = 0.0;            ///< 0 picks half the continuity radius
};

/// Largest link slack for which perturbed_ifs guarantees D0 < Delta:
/// delta0 = min(Delta/2, Delta / Lip(f^-1)) and the limit is delta0 / 6.
double perturbation_delta_limit(const IFS& ifs, double big_delta, int grid_resolution = 0);

/// Perturbs every map by bumps so that the adjusted points y_0..y_m become an
/// exact chain: one bump h_a per symbol a moving f_a(y_k) to y_{k+1} for all
/// links with symbol a. Links use symbol a N + a of g. The chain continues
/// beyond y_m by iteration up to the last index of xi.
PerturbedIfs perturbed_ifs(const IFS& ifs, const ChainRecord& xi, const SymbolSequence& sigma, std::size_t m,
                           double big_delta, const PerturbationOptions& options = {});

/// sigma with every symbol s replaced by s N + s.
SymbolSequence diagonal_symbols(const SymbolSequence& sigma, int n_symbols);

/// ifs with its maps repeated to match base_index.
IFS replicate_family(const IFS& ifs, const std::vector<int>& base_index);

}  // namespace ifsshadow
