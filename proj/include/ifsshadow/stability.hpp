#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ifsshadow/ifs.hpp"
#include "ifsshadow/shadowing.hpp"

namespace ifsshadow {

struct SemiConjugacySample {
  SpacePoint x;
  SpacePoint hx;
  double shift = 0.0;          ///< dist(x, h(x))
  double max_residual = 0.0;   ///< max_k dist(G-orbit_k(x), F-orbit_k(h(x)))
  bool ok = false;             ///< solved, shift < eps and max_residual < eps
  std::string error;           ///< solver failure, if any
};

/// Sampled table of h. The first `primary` entries are the requested samples.
/// Under a single-symbol schedule the rest are points of their G-orbits
/// (|k| <= K), each with its own shadow, so h can be evaluated along those
/// orbits without interpolation error.
struct SemiConjugacy {
  std::vector<SemiConjugacySample> entries;
  std::size_t primary = 0;
  double epsilon = 0.0;
  int k_window = 0;
  bool two_sided = true;       ///< window [-K, K]; [0, K] for non-invertible or unit-cube maps
  std::string d0_mode = "matched";

  /// Image of the nearest stored point; throws if it is farther than epsilon.
  SpacePoint operator()(const SpacePoint& x) const;
  bool all_ok() const;
};

struct SemiConjOptions {
  ShadowOptions shadow;
  bool include_orbit_points = true;
};

/// h(x) = point at index 0 of the F-shadow of the G-orbit of x over the
/// window. Solver failures flag the sample. F and G are paired index by index.
SemiConjugacy build_semiconj(const IFS& f, const IFS& g, const SymbolSequence& sigma, double eps,
                             const std::vector<SpacePoint>& samples, int k_window,
                             const SemiConjOptions& options = {});

/// max over primary samples x and window indices k of
/// dist(F-orbit_k(h(x)), h(G-orbit_k(x))), with h evaluated at the nearest
/// stored point.
double semiconj_residual(const IFS& f, const IFS& g, const SymbolSequence& sigma, const SemiConjugacy& h,
                         int k_window);

/// Largest distance from a grid point to the nearest image h(x); h is
/// approximately onto when this is small.
double image_net_radius(const SemiConjugacy& h, const MetricGrid& grid);

struct CoverCounterexample {
  std::size_t center = 0;
  SpacePoint x;
  SpacePoint z;
  double preimage_dist = 0.0;
};

struct CoverReport {
  bool pass = true;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t probes_per_center = 0;
  std::vector<SpacePoint> centers;
  std::vector<bool> center_pass;
  std::vector<double> center_worst;      ///< largest preimage distance per center
  std::size_t violation_count = 0;
  std::vector<CoverCounterexample> counterexamples;  ///< first max_counterexamples, by center
};

/// Center i of a cover check, drawn from stream 2 i of the seed. Probes for
/// center i come from stream 2 i + 1.
SpacePoint cover_center(std::uint64_t seed, std::size_t index, int dim);

/// For each center X, probes Z uniform in B(Fi(X), eps + delta) and checks
/// dist(Fi^-1(Z), X) < eps.
CoverReport check_ball_cover(const SmoothMap& fi, double eps, double delta, std::size_t n_centers,
                             std::size_t n_probes, std::uint64_t seed, std::size_t max_counterexamples = 1000);

}  // namespace ifsshadow
