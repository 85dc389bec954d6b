#pragma once

#include <cstdint>
#include <random>

#include "ifsshadow/space.hpp"

namespace ifsshadow {

/// Seeded generator used for every random draw in the library.
///
/// Engine is std::mt19937_64, whose output sequence is fixed by the standard.
/// The standard distributions are implementation-defined, so conversions to
/// doubles and normals are done here to keep results identical across
/// toolchains. Bump kGeneratorName if any conversion changes.
class Rng {
 public:
  static constexpr const char* kGeneratorName = "mt19937_64/splitmix-streams/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, stream), for parallel deterministic tasks.
  static Rng stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., n-1}.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

  /// Uniform point of T^d.
  SpacePoint torus_point(int dim);
  /// Uniform direction on the unit sphere of R^d.
  Vector unit_vector(int dim);
  /// Uniform point of the closed Euclidean ball of the given radius.
  Vector in_ball(int dim, double radius);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ifsshadow
