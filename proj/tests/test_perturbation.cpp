#include <doctest.h>

#include <cmath>

#include "ifsshadow/catalog.hpp"
#include "ifsshadow/errors.hpp"
#include "ifsshadow/metrics.hpp"
#include "ifsshadow/perturbation.hpp"
#include "ifsshadow/rng.hpp"
#include "oracles.hpp"

using namespace ifsshadow;

TEST_CASE("bump profile") {
  CHECK(bump_profile(0.0) == 1.0);
  CHECK(bump_profile(1.0) == 0.0);
  CHECK(bump_profile(-1.0) == 0.0);
  CHECK(bump_profile(1.5) == 0.0);
  CHECK(bump_profile(0.5) == doctest::Approx(std::exp(1.0 - 1.0 / 0.75)));
  for (double t : {-0.9, -0.4, 0.1, 0.5, 0.8}) {
    const double h = 1e-6;
    CHECK(bump_profile_slope(t) == doctest::Approx((bump_profile(t + h) - bump_profile(t - h)) / (2 * h)).epsilon(1e-6));
  }
  double brute = 0.0;
  for (int i = 0; i < 1000000; ++i) brute = std::max(brute, std::fabs(bump_profile_slope(i * 1e-6)));
  CHECK(bump_profile_max_slope() == doctest::Approx(brute).epsilon(1e-9));
}

TEST_CASE("bump diffeomorphism") {
  const BumpDiffeo b(2, {SpacePoint{0.3, 0.3}}, {SpacePoint{0.31, 0.3}});
  CHECK(b.support_radius() == doctest::Approx(0.2));
  CHECK(dist(b(SpacePoint{0.3, 0.3}), SpacePoint{0.31, 0.3}) <= 1e-12);
  CHECK(b(SpacePoint{0.8, 0.8}) == SpacePoint{0.8, 0.8});
  const SmoothMap f = b.as_map();
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const SpacePoint x = rng.torus_point(2);
    const Eigen::MatrixXd fd = oracle::central_difference(
        [&](const std::vector<double>& p) { return oracle::coords(f(SpacePoint(Eigen::Map<const Vector>(p.data(), 2)))); },
        oracle::coords(x));
    CHECK((f.jacobian(x) - fd).cwiseAbs().maxCoeff() < 1e-6);
  }
  CHECK_THROWS_AS(BumpDiffeo(2, {SpacePoint{0.3, 0.3}}, {SpacePoint{0.5, 0.3}}), Infeasible);
  CHECK_THROWS_AS(BumpDiffeo(2, {SpacePoint{0.3, 0.3}, SpacePoint{0.3, 0.3}},
                             {SpacePoint{0.31, 0.3}, SpacePoint{0.32, 0.3}}),
                  Infeasible);
}

TEST_CASE("moving points") {
  const SmoothMap id = move_points_diffeo({}, 0.01, 2);
  CHECK(rho0(id, identity_map(2), MetricGrid(2, 16)) == 0.0);

  const SpacePoint p{0.3, 0.3};
  const SpacePoint q{0.31, 0.3};
  const SmoothMap f = move_points_diffeo({{p, q}}, 0.02, 2);
  CHECK(dist(f(p), q) <= 1e-12);
  CHECK(rho0(f, identity_map(2), MetricGrid(2, 256)) < 0.04);

  const auto pairs = random_point_pairs(5, 0.2, 0.01, 2, 17);
  REQUIRE(pairs.size() == 5);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(dist(pairs[i].first, pairs[i].second) < 0.01);
    for (std::size_t j = 0; j < i; ++j) CHECK(dist(pairs[i].first, pairs[j].first) >= 0.2);
  }
  const SmoothMap g = move_points_diffeo(pairs, 0.01, 2);
  Rng rng(3);
  for (const auto& [a, b] : pairs) {
    CHECK(dist(g(a), b) <= 1e-12);
    CHECK(dist(invert_map(g, b), a) <= 1e-10);
  }
  for (int i = 0; i < 200; ++i) {
    const SpacePoint x = rng.torus_point(2);
    CHECK(dist(invert_map(g, g(x)), x) <= 1e-10);
  }

  CHECK_THROWS(move_points_diffeo({{SpacePoint{0.1}, SpacePoint{0.105}}}, 0.01, 1));
  CHECK_THROWS(move_points_diffeo({{p, SpacePoint{0.35, 0.3}}}, 0.02, 2));
  CHECK_THROWS_AS(random_point_pairs(50, 0.4, 0.01, 2, 1), Infeasible);
}

TEST_CASE("adjusted points") {
  const IFS g = build_cat_ifs();
  const auto xi = gen_pseudo_orbit(g, SymbolSequence::constant(0), SpacePoint{0.2, 0.6}, 0.01, 30, 5);

  const auto y0 = adjusted_points(g, xi, 0, 0.005);
  REQUIRE(y0.size() == 1);
  CHECK(y0[0] == xi.points[0]);

  const auto exact = orbit_chain(g, SymbolSequence::constant(0), SpacePoint{0.2, 0.6}, 12);
  const auto ye = adjusted_points(g, exact, 11, 0.005);
  for (std::size_t k = 0; k < ye.size(); ++k) CHECK(ye[k] == exact.points[k]);
  CHECK(check_adjusted_points(g, exact, ye, 0.005).ok);

  const auto y = adjusted_points(g, xi, 20, 0.005);
  const auto c = check_adjusted_points(g, xi, y, 0.005);
  CHECK(c.ok);
  CHECK(c.max_shift < 0.005);
  CHECK(c.max_residual < 0.03);
  CHECK(c.min_separation > 0.0);
  // Independent recheck of the three conditions.
  for (std::size_t k = 0; k < y.size(); ++k) {
    CHECK(oracle::torus_dist(y[k], xi.points[k]) < 0.005);
    if (k + 1 < y.size()) {
      const auto img = oracle::cat_step({y[k][0], y[k][1]});
      CHECK(oracle::torus_dist({img[0], img[1]}, oracle::coords(y[k + 1])) < 0.03);
    }
    for (std::size_t j = 0; j < k; ++j) CHECK(oracle::torus_dist(y[k], y[j]) > 0.0);
  }
}

TEST_CASE("perturbed family through an exact chain") {
  const IFS g = build_cat_ifs();
  PerturbationOptions po;
  po.grid_resolution = 128;

  const auto exact = orbit_chain(g, SymbolSequence::constant(0), SpacePoint{0.2, 0.6}, 11);
  const auto pe = perturbed_ifs(g, exact, exact.sigma, 10, 0.05, po);
  CHECK(pe.d0 <= 1e-15);

  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto xi = gen_pseudo_orbit(g, SymbolSequence::constant(0), Rng(s + 100).torus_point(2), 1e-3, 11, s);
    const auto p = perturbed_ifs(g, xi, xi.sigma, 10, 0.05, po);
    CHECK(validate_chain(p.g, p.y).is_exact_chain);
    CHECK(p.d0 < 0.05);
    CHECK(dist_D0(replicate_family(g, p.base_index), p.g, MetricGrid(2, 128)) == doctest::Approx(p.d0));
    for (int k = 0; k <= 10; ++k) CHECK(oracle::torus_dist(xi.points[k], p.y.points[k]) < 0.05);
    CHECK(p.g.size() == 1);
  }

  const auto big = gen_pseudo_orbit(g, SymbolSequence::constant(0), SpacePoint{0.4, 0.1}, 0.01, 11, 1);
  CHECK_THROWS_AS(perturbed_ifs(g, big, big.sigma, 10, 0.05, po), Infeasible);
}

TEST_CASE("perturbed two-map contraction") {
  const IFS c = system_from_name("contraction2d:0.5");
  REQUIRE(c.size() >= 2);
  PerturbationOptions po;
  po.grid_resolution = 64;
  const auto sigma = SymbolSequence::random(static_cast<int>(c.size()), 5, 2);
  const double limit = perturbation_delta_limit(c, 0.02, 64);
  const auto xi = gen_pseudo_orbit(c, sigma, SpacePoint{0.3, 0.6}, 0.5 * limit, 6, 2);
  const auto p = perturbed_ifs(c, xi, sigma, 5, 0.02, po);
  CHECK(validate_chain(p.g, p.y).is_exact_chain);
  CHECK(p.d0 < 0.02);
  for (int k = 0; k <= 5; ++k) CHECK(dist(xi.points[k], p.y.points[k]) < 0.02);
  CHECK(p.g.size() == c.size() * c.size());
}

TEST_CASE("symbol bookkeeping") {
  const auto d = diagonal_symbols(SymbolSequence::periodic({0, 1, 1}), 2);
  CHECK(d(0) == 0);
  CHECK(d(1) == 3);
  CHECK(d(2) == 3);
  const IFS r = build_rotation_ifs(std::vector<double>{0.1, 0.2});
  const IFS rr = replicate_family(r, {0, 1, 0, 1});
  CHECK(rr.size() == 4);
  CHECK(rr[2].label() == r[0].label());
}
