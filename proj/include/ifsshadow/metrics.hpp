#pragma once

#include <string>

#include "ifsshadow/ifs.hpp"
#include "ifsshadow/smooth_map.hpp"
#include "ifsshadow/space.hpp"

namespace ifsshadow {

/// Grid supremum of max(dist(f(x), g(x)), dist(f^-1(x), g^-1(x))).
/// Throws NotInvertible if either map cannot be inverted.
double rho0(const SmoothMap& f, const SmoothMap& g, const MetricGrid& grid);

/// rho0 plus the grid supremum of the spectral norm of Df(x) - Dg(x).
double rho1(const SmoothMap& f, const SmoothMap& g, const MetricGrid& grid);

enum class PairingMode { kMatched, kAllPairs };
PairingMode parse_pairing_mode(const std::string& name);
const char* to_string(PairingMode mode);

/// 0 when the families coincide; otherwise the max of rho0 over all pairs
/// (kAllPairs) or over equal indices (kMatched, which requires equal sizes).
double dist_D0(const IFS& f, const IFS& g, const MetricGrid& grid,
               PairingMode mode = PairingMode::kMatched);
double dist_D1(const IFS& f, const IFS& g, const MetricGrid& grid,
               PairingMode mode = PairingMode::kMatched);

/// Grid supremum of ||Df(x)||; finite differences between neighbouring grid
/// points stand in when the map has no Jacobian.
double lipschitz_estimate(const SmoothMap& f, const MetricGrid& grid);

/// Grid supremum of ||Df(x)^-1||, a Lipschitz bound for f^-1.
double inverse_lipschitz_estimate(const SmoothMap& f, const MetricGrid& grid);

}  // namespace ifsshadow
