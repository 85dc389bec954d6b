#include <doctest.h>

#include <cmath>

#include "ifsshadow/catalog.hpp"
#include "ifsshadow/errors.hpp"
#include "ifsshadow/rng.hpp"
#include "ifsshadow/smooth_map.hpp"
#include "ifsshadow/space.hpp"
#include "oracles.hpp"

using namespace ifsshadow;

TEST_CASE("points wrap into the unit cube") {
  const SpacePoint p{1.25, -0.25, 3.0};
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[1] == doctest::Approx(0.75));
  CHECK(p[2] == 0.0);
  CHECK(wrap_unit(-1e-18) < 1.0);
  CHECK(wrap_unit(-1e-18) >= 0.0);
}

TEST_CASE("flat torus distance") {
  CHECK(dist(SpacePoint{0.1}, SpacePoint{0.9}) == doctest::Approx(0.2).epsilon(1e-14));
  const SpacePoint p{0.37, 0.81};
  CHECK(dist(p, p) == 0.0);
  CHECK(dist(SpacePoint{0.0, 0.0}, SpacePoint{0.5, 0.5}) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(dist(SpacePoint{0.1}, SpacePoint{0.1, 0.2}), DimensionMismatch);

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto a = rng.torus_point(3);
    const auto b = rng.torus_point(3);
    CHECK(dist(a, b) == doctest::Approx(oracle::torus_dist(a, b)).epsilon(1e-14));
    CHECK(dist(a, b) <= torus_diameter(3) + 1e-15);
  }
}

TEST_CASE("geodesic displacement") {
  const Vector a = geodesic_displacement(SpacePoint{0.9}, SpacePoint{0.1});
  CHECK(a[0] == doctest::Approx(0.2));
  CHECK(geodesic_displacement(SpacePoint{0.3}, SpacePoint{0.3})[0] == 0.0);
  const Vector b = geodesic_displacement(SpacePoint{0.25, 0.75}, SpacePoint{0.30, 0.70});
  CHECK(b[0] == doctest::Approx(0.05));
  CHECK(b[1] == doctest::Approx(-0.05));
  CHECK_THROWS_AS(geodesic_displacement(SpacePoint{0.0}, SpacePoint{0.5}), AntipodalAmbiguity);
  CHECK(lift_displacement(SpacePoint{0.0}, SpacePoint{0.5})[0] == doctest::Approx(0.5));
}

TEST_CASE("metric grid") {
  CHECK(MetricGrid::default_resolution(1) == 4096);
  CHECK(MetricGrid::default_resolution(2) == 256);
  CHECK(MetricGrid::default_resolution(3) == 64);
  CHECK(MetricGrid::default_resolution(4) == 24);
  CHECK(MetricGrid::default_resolution(6) == 8);
  const MetricGrid g(2, 4);
  CHECK(g.size() == 16);
  CHECK(g.point(5)[0] + g.point(5)[1] == doctest::Approx(0.5));
  CHECK(g.covering_radius() == doctest::Approx(std::sqrt(2.0) / 8.0));
}

TEST_CASE("cat map evaluation and inverse") {
  const SmoothMap g = cat_map();
  const SpacePoint img = g(SpacePoint{0.25, 0.5});
  CHECK(img[0] == doctest::Approx(0.0));
  CHECK(img[1] == doctest::Approx(0.75));
  const SpacePoint pre = invert_map(g, SpacePoint{0.0, 0.75});
  CHECK(pre[0] == doctest::Approx(0.25));
  CHECK(pre[1] == doctest::Approx(0.5));
  REQUIRE(g.linear_part());
  CHECK((*g.linear_part())(0, 0) == 2.0);
}

TEST_CASE("identity map") {
  const SmoothMap id = identity_map(3);
  const SpacePoint p{0.1, 0.2, 0.3};
  CHECK(id(p) == p);
  CHECK(invert_map(id, p) == p);
}

TEST_CASE("torus example maps") {
  const IFS f = build_torus_example();
  REQUIRE(f.size() == 2);
  CHECK(f.dim() == 4);
  const SpacePoint zero = SpacePoint::zero(4);
  CHECK(dist(f[0](zero), zero) == 0.0);
  CHECK(torus_coupling(TorusVariant::kF1, 0.25, 0.25) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(torus_coupling(TorusVariant::kF1, 0.0, 0.0) == doctest::Approx(1.0));

  // Where the coupling vanishes the map is linear in (x, y).
  const SpacePoint p{0.3, 0.4, 0.25, 0.25};
  const SpacePoint q = f[0](p);
  CHECK(q[0] == doctest::Approx(oracle::wrap(2 * 0.3 + 0.4)));
  CHECK(q[1] == doctest::Approx(oracle::wrap(0.3 + 0.4)));

  Rng rng(11);
  double worst = 0.0, worst_oracle = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const SpacePoint x = rng.torus_point(4);
    for (int v = 0; v < 2; ++v) {
      worst = std::max(worst, dist(invert_map(f[static_cast<std::size_t>(v)], f[static_cast<std::size_t>(v)](x)), x));
      worst_oracle = std::max(worst_oracle, oracle::torus_dist(oracle::coords(f[static_cast<std::size_t>(v)](x)),
                                                               oracle::torus_forward(v == 0, oracle::coords(x))));
    }
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_oracle <= 1e-12);
}

TEST_CASE("torus example Jacobians agree with finite differences") {
  const IFS f = build_torus_example();
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const SpacePoint x = rng.torus_point(4);
    for (int v = 0; v < 2; ++v) {
      const Matrix j = f[static_cast<std::size_t>(v)].jacobian(x);
      const Eigen::MatrixXd fd = oracle::central_difference(
          [v](const std::vector<double>& p) { return oracle::torus_forward(v == 0, p); }, oracle::coords(x));
      CHECK((j - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("catalog systems pass the map invariants") {
  for (const auto& name : {"cat", "torus", "contraction:0.5", "contraction2d:0.4", "rotation:0.1,0.3", "identity:2"}) {
    CAPTURE(name);
    const IFS ifs = system_from_name(name);
    CHECK_NOTHROW(require_map_invariants(ifs));
  }
  CHECK_THROWS_AS(system_from_name("nope"), ConfigError);
  CHECK_THROWS(build_contraction_ifs(1.5, std::vector<double>{0.0}));
  CHECK_THROWS(build_contraction_ifs(0.0, std::vector<double>{0.0}));
}

TEST_CASE("cat eigenvalues") {
  const SmoothMap g = cat_map();
  Eigen::EigenSolver<Matrix> es(*g.linear_part());
  std::vector<double> v{es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
  std::sort(v.begin(), v.end());
  CHECK(std::fabs(v[0] - oracle::cat_stable()) < 1e-12);
  CHECK(std::fabs(v[1] - oracle::cat_unstable()) < 1e-12);
}

TEST_CASE("rotations are isometries") {
  const IFS r = build_rotation_ifs(std::vector<double>{0.1});
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const SpacePoint a = rng.torus_point(1);
    const SpacePoint b = rng.torus_point(1);
    CHECK(dist(r[0](a), r[0](b)) == doctest::Approx(dist(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("composition and Newton inversion") {
  const SmoothMap g = cat_map();
  const SmoothMap r = rotation_map(Vector::Constant(2, 0.1));
  const SmoothMap h = compose(r, g);
  const SpacePoint p{0.2, 0.7};
  CHECK(dist(h(p), r(g(p))) < 1e-15);
  CHECK(dist(invert_map(h, h(p)), p) < 1e-12);
  CHECK(dist(newton_invert(g, g(p), g(p)), p) < 1e-10);
}

TEST_CASE("dimension checks") {
  CHECK_THROWS_AS(cat_map()(SpacePoint{0.1}), DimensionMismatch);
}

TEST_CASE("seeded generator is reproducible") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.in_ball(3, 0.1).norm() <= 0.1);
  }
  CHECK(Rng::stream(5, 0).next_u64() != Rng::stream(5, 1).next_u64());
}
