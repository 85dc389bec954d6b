#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ifsshadow/ifs.hpp"

namespace ifsshadow {

/// Smallest |n| <= n_cap with dist(O(n)x, O(n)y) > eta, searching
/// n = 0, +1, -1, +2, -2, ...; empty when the orbits never separate (saturated).
std::optional<int> separation_time(const IFS& ifs, const SymbolSequence& sigma, const SpacePoint& x,
                                   const SpacePoint& y, double eta, int n_cap);

/// max_{|n| <= n_cap} dist(O(n)x, O(n)y). The search stops early once the
/// distance exceeds stop_above, returning that distance.
double max_separation(const IFS& ifs, const SymbolSequence& sigma, const SpacePoint& x, const SpacePoint& y,
                      int n_cap, double stop_above);

/// Displacement directions used to pair grid points: the coordinate axes and
/// (e_i +- e_j)/sqrt(2).
std::vector<Vector> pair_directions(int dim);

/// Doubling ladder start, 2 start, 4 start, ... up to 1/2.
std::vector<double> pair_scales(double start);

struct PointPair {
  SpacePoint x;
  SpacePoint y;
};

/// Pairs (x, x + s u) for every grid point x, direction u and scale s.
std::vector<PointPair> sample_pairs(const MetricGrid& grid, const std::vector<double>& scales);

enum class ExpansiveVerdict { kExpansiveAtDelta, kViolated, kInconclusive };
const char* to_string(ExpansiveVerdict verdict);

struct ViolatingPair {
  SpacePoint x;
  SpacePoint y;
  double max_sep = 0.0;
};

struct DeltaVerdict {
  double delta = 0.0;
  ExpansiveVerdict verdict = ExpansiveVerdict::kInconclusive;
  std::size_t violation_count = 0;
  std::vector<ViolatingPair> violations;  ///< first few, in sampling order
};

struct ExpansivenessReport {
  std::string sigma_id;
  /// Largest tested Delta without a sampled violation (an estimate, not a
  /// proof). When every Delta is violated this is the smallest Delta tested.
  std::optional<double> candidate_delta;
  int n_cap = 0;
  double pair_tolerance = 0.0;
  std::size_t pairs_sampled = 0;
  std::vector<ViolatingPair> violating_pairs;  ///< violations at candidate_delta
  ExpansiveVerdict verdict = ExpansiveVerdict::kInconclusive;
  std::vector<DeltaVerdict> per_delta;  ///< in the order of delta_grid
};

/// Samples pairs at distances above pair_tolerance and records, for every
/// Delta in delta_grid, the pairs whose orbits stay within Delta for all
/// |n| <= n_cap. The verdict is expansive-at-Delta when some Delta has no
/// sampled violation, violated when all do, inconclusive when nothing was
/// sampled.
ExpansivenessReport estimate_expansive_const(const IFS& ifs, const SymbolSequence& sigma, const MetricGrid& grid,
                                             double pair_tolerance, int n_cap, const std::vector<double>& delta_grid,
                                             std::size_t max_reported = 16);

/// Smallest N <= n_cap such that every sampled pair with dist >= mu has some
/// |n| < N with orbit distance > eta; empty when saturated. Pairs come from
/// the doubling ladder starting at mu.
std::optional<int> estimate_N_of_mu(const IFS& ifs, const SymbolSequence& sigma, double eta, double mu,
                                    const MetricGrid& grid, int n_cap);

/// Same with an explicit scale ladder (pairs closer than mu are skipped).
std::optional<int> estimate_N_of_mu(const IFS& ifs, const SymbolSequence& sigma, double eta, double mu,
                                    const MetricGrid& grid, int n_cap, const std::vector<double>& scales);

}  // namespace ifsshadow
