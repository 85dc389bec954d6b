#include "ifsshadow/rng.hpp"

#include <cmath>
#include <numbers>

namespace ifsshadow {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = engine_();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = engine_();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

SpacePoint Rng::torus_point(int dim) {
  Vector c(dim);
  for (int i = 0; i < dim; ++i) c[i] = uniform();
  return SpacePoint(std::move(c));
}

Vector Rng::unit_vector(int dim) {
  Vector v(dim);
  double n = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = normal();
    n = v.norm();
  } while (n == 0.0);
  return v / n;
}

Vector Rng::in_ball(int dim, double radius) {
  const Vector dir = unit_vector(dim);
  const double r = radius * std::pow(uniform(), 1.0 / dim);
  return dir * r;
}

}  // namespace ifsshadow
