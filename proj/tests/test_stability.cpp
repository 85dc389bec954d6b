#include <doctest.h>

#include <cmath>

#include "ifsshadow/catalog.hpp"
#include "ifsshadow/metrics.hpp"
#include "ifsshadow/perturbation.hpp"
#include "ifsshadow/rng.hpp"
#include "ifsshadow/stability.hpp"
#include "oracles.hpp"

using namespace ifsshadow;

namespace {

std::vector<SpacePoint> samples(int n, int dim, std::uint64_t seed) {
  std::vector<SpacePoint> out;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) out.push_back(rng.torus_point(dim));
  return out;
}

IFS bumped_cat(double shift) {
  const SpacePoint c{0.5, 0.5};
  const BumpDiffeo b(2, {c}, {c.shifted(Vector::Constant(2, shift / std::sqrt(2.0)))});
  return IFS({compose(b.as_map(), cat_map())});
}

}  // namespace

TEST_CASE("semi-conjugacy of a family with itself is the identity") {
  const IFS f = build_cat_ifs();
  const auto s = SymbolSequence::constant(0);
  const auto h = build_semiconj(f, f, s, 0.05, samples(20, 2, 1), 10);
  REQUIRE(h.all_ok());
  for (std::size_t i = 0; i < h.primary; ++i) {
    CHECK(h.entries[i].shift < 1e-10);
    CHECK(h.entries[i].max_residual < 1e-10);
  }
  CHECK(semiconj_residual(f, f, s, h, 10) < 1e-10);
  CHECK(h.two_sided);
}

TEST_CASE("semi-conjugacy to a bump-perturbed cat map") {
  const IFS f = build_cat_ifs();
  const IFS g = bumped_cat(1e-3);
  CHECK(dist_D0(f, g, MetricGrid(2, 256)) == doctest::Approx(1e-3).epsilon(1e-6));
  const auto s = SymbolSequence::constant(0);
  const auto h = build_semiconj(f, g, s, 0.05, samples(30, 2, 2), 20);
  CHECK(h.all_ok());
  for (std::size_t i = 0; i < h.primary; ++i) {
    CHECK(h.entries[i].shift < 0.05);
    CHECK(h.entries[i].max_residual < 0.05);
    // h(x) must start an exact F-orbit.
    const auto img = oracle::cat_step({h.entries[i].hx[0], h.entries[i].hx[1]});
    CHECK(oracle::torus_dist({img[0], img[1]}, oracle::coords(h(g[0](h.entries[i].x)))) < 0.1);
  }
  CHECK(semiconj_residual(f, g, s, h, 20) < 0.1);
  CHECK(h.d0_mode == "matched");
  CHECK(image_net_radius(h, MetricGrid(2, 4)) < 0.5);
}

TEST_CASE("semi-conjugacy between contractions with moved fixed points") {
  const IFS f = build_contraction_ifs(0.5, std::vector<double>{0.0, 0.5});
  const IFS g = build_contraction_ifs(0.5, std::vector<double>{0.001, 0.499});
  const auto s = SymbolSequence::periodic({0, 1, 1});
  const auto h = build_semiconj(f, g, s, 0.05, samples(30, 1, 3), 15);
  CHECK_FALSE(h.two_sided);
  CHECK(h.all_ok());
  for (std::size_t i = 0; i < h.primary; ++i) {
    CHECK(h.entries[i].shift < 0.05);
    CHECK(h.entries[i].max_residual < 0.05);
  }
}

TEST_CASE("lookup refuses far points") {
  const IFS f = build_cat_ifs();
  const auto h = build_semiconj(f, f, SymbolSequence::constant(0), 1e-3, {SpacePoint{0.1, 0.1}}, 2,
                                SemiConjOptions{{}, false});
  CHECK(h.entries.size() == 1);
  CHECK_THROWS(h(SpacePoint{0.6, 0.6}));
}

TEST_CASE("ball cover geometry of the identity") {
  const SmoothMap id = identity_map(2);
  const auto ok = check_ball_cover(id, 0.05, 0.0, 20, 200, 1);
  CHECK(ok.pass);
  CHECK(ok.violation_count == 0);
  const auto bad = check_ball_cover(id, 0.05, 0.05, 20, 200, 1);
  CHECK_FALSE(bad.pass);
  CHECK(bad.violation_count > 0);
  for (const auto& ce : bad.counterexamples) CHECK(ce.preimage_dist >= 0.05);

  const auto rot = check_ball_cover(rotation_map(Vector::Constant(2, 0.3)), 1e-6, 0.0, 10, 100, 2);
  CHECK(rot.pass);
}

TEST_CASE("ball cover is reproducible and capped") {
  const SmoothMap f1 = torus_map(TorusVariant::kF1);
  const auto a = check_ball_cover(f1, 0.05, 0.05, 10, 200, 7, 5);
  const auto b = check_ball_cover(f1, 0.05, 0.05, 10, 200, 7, 5);
  CHECK(a.counterexamples.size() <= 5);
  CHECK(a.violation_count == b.violation_count);
  CHECK(a.center_worst == b.center_worst);
  CHECK(cover_center(7, 3, 4) == a.centers[3]);
}

TEST_CASE("ball cover agrees with the dense oracle on a few centers") {
  for (int variant = 0; variant < 2; ++variant) {
    const SmoothMap f = torus_map(variant == 0 ? TorusVariant::kF1 : TorusVariant::kF2);
    const auto rep = check_ball_cover(f, 0.05, 0.05, 3, 2000, 11);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto dense = oracle::dense_cover_torus(variant == 0, oracle::coords(rep.centers[i]), 0.05, 0.05, 20000);
      CHECK(dense.pass == rep.center_pass[i]);
    }
  }
}
