#pragma once
// Values measured with this implementation and frozen to catch regressions.
// None of them has an analytic reference.

namespace baseline {

// rho1(F1, F2) on the 32^4 lattice.
inline constexpr double kRho1F1F2Grid32 = 1.6392926414123716;
// Newton sup_dist for the torus example, alternating schedule, delta 1e-4,
// 200 points, start (0.1, 0.2, 0.3, 0.4), seed 1.
inline constexpr double kTorusNewtonSupDist = 0.00012013751478019001;
// Expansiveness candidate of the cat map on the 32^2 lattice, pair
// tolerance 1e-2, N_cap 30.
inline constexpr double kCatExpansiveCandidate = 0.5;

}  // namespace baseline
