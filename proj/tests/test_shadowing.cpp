#include <doctest.h>

#include <cmath>

#include "baselines.hpp"
#include "ifsshadow/catalog.hpp"
#include "ifsshadow/errors.hpp"
#include "ifsshadow/rng.hpp"
#include "ifsshadow/shadowing.hpp"
#include "oracles.hpp"

using namespace ifsshadow;

namespace {

double max_gap(const std::vector<std::array<double, 2>>& a, const ChainRecord& b) {
  double g = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    g = std::max(g, oracle::torus_dist({a[k][0], a[k][1]}, oracle::coords(b.points[k])));
  }
  return g;
}

}  // namespace

TEST_CASE("exact chains shadow themselves") {
  const IFS c = build_contraction_ifs(0.5, std::vector<double>{0.0, 0.5});
  const auto xi = orbit_chain(c, SymbolSequence::periodic({0, 1}), SpacePoint{0.3}, 100);
  const auto r = shadow_contraction(c, xi);
  CHECK(r.sup_dist == 0.0);

  const IFS g = build_cat_ifs();
  const auto eg = orbit_chain(g, SymbolSequence::constant(0), SpacePoint{0.3, 0.1}, 40);
  CHECK(shadow_linear_hyperbolic(g[0], eg).sup_dist < 1e-12);
  const auto n = shadow_newton(g, eg);
  CHECK(n.iterations <= 1);
  CHECK(n.sup_dist < 1e-10);
}

TEST_CASE("contraction shadow matches forward iteration") {
  const std::vector<double> offsets{0.0, 0.5};
  const IFS c = build_contraction_ifs(0.5, offsets);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto sigma = SymbolSequence::random(2, 999, s);
    const auto xi = gen_pseudo_orbit(c, sigma, SpacePoint{0.3}, 0.01, 1000, s);
    const auto r = shadow_contraction(c, xi);
    const auto exact = oracle::contraction_orbit(0.5, offsets, sigma, xi.points[0][0], 1000);
    double gap = 0.0, sup = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) {
      gap = std::max(gap, oracle::torus_dist({exact[k]}, oracle::coords(r.shadow.points[k])));
      sup = std::max(sup, oracle::torus_dist({exact[k]}, oracle::coords(xi.points[k])));
    }
    CHECK(gap < 1e-12);
    CHECK(r.sup_dist == doctest::Approx(sup).epsilon(1e-12));
    CHECK(r.sup_dist <= 0.02 + 1e-12);
    REQUIRE(r.bound);
    CHECK(*r.bound <= 0.02 + 1e-12);
  }
}

TEST_CASE("contraction bound with q = 0.9") {
  const IFS c = build_contraction_ifs(0.9, std::vector<double>{0.0, 0.1});
  ShadowOptions o;
  o.contraction_factor = contraction_factor(c);
  CHECK(*o.contraction_factor == doctest::Approx(0.9).epsilon(1e-12));
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto xi = gen_pseudo_orbit(c, SymbolSequence::random(2, 299, s), SpacePoint{0.5}, 0.01, 300, s);
    CHECK(shadow_contraction(c, xi, o).sup_dist <= 0.1 + 1e-12);
  }
}

TEST_CASE("non-contracting family is rejected") {
  const IFS g = build_cat_ifs();
  const auto xi = orbit_chain(g, SymbolSequence::constant(0), SpacePoint{0.3, 0.1}, 5);
  CHECK_THROWS_AS(shadow_contraction(g, xi), NotContracting);
  CHECK_THROWS_AS(shadow_linear_hyperbolic(identity_map(2), xi), Error);
  CHECK_THROWS_AS(HyperbolicSplitting(Matrix::Identity(2, 2)), NotHyperbolic);
}

TEST_CASE("hyperbolic splitting of the cat matrix") {
  const HyperbolicSplitting h(*cat_map().linear_part());
  CHECK(h.stable_modulus() == doctest::Approx(oracle::cat_stable()).epsilon(1e-12));
  CHECK(h.unstable_modulus() == doctest::Approx(oracle::cat_unstable()).epsilon(1e-12));
  CHECK(h.bound_factor() == doctest::Approx(oracle::cat_bound_factor()).epsilon(1e-12));
  CHECK(h.bound_factor() == doctest::Approx(2.236).epsilon(1e-3));
  Vector e(2);
  e << 3e-4, -7e-4;
  const auto [s, u] = h.split(e);
  CHECK((s + u - e).norm() < 1e-12);
  const auto sd = oracle::cat_stable_dir();
  CHECK(std::fabs(u[0] * sd[0] + u[1] * sd[1]) < 1e-15);
}

TEST_CASE("linear hyperbolic shadow agrees with the series oracle") {
  const IFS g = build_cat_ifs();
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto xi = gen_pseudo_orbit(g, SymbolSequence::constant(0), Rng(s).torus_point(2), 1e-3, 500, s);
    const auto r = shadow_linear_hyperbolic(g[0], xi);
    CHECK(max_gap(oracle::cat_series_shadow(xi), r.shadow) < 1e-12);
    CHECK(r.sup_dist <= 1e-3 * oracle::cat_bound_factor() + 1e-12);
    CHECK(r.residual <= 1e-9);
  }
}

TEST_CASE("single link split into stable and unstable corrections") {
  const IFS g = build_cat_ifs();
  ChainRecord xi;
  xi.points = {SpacePoint{0.2, 0.3}, g[0](SpacePoint{0.2, 0.3}).shifted(Vector::Constant(2, 1e-4))};
  const auto r = shadow_linear_hyperbolic(g[0], xi);
  CHECK(max_gap(oracle::cat_series_shadow(xi), r.shadow) < 1e-14);
  CHECK(validate_chain(g, r.shadow).is_delta_chain_for < 1e-12);
}

TEST_CASE("unpadded Newton is the dense minimum-norm solution") {
  const IFS g = build_cat_ifs();
  const auto xi = gen_pseudo_orbit(g, SymbolSequence::constant(0), SpacePoint{0.7, 0.1}, 1e-3, 60, 8);
  ShadowOptions o;
  o.padding = 0;
  const auto r = shadow_newton(g, xi, o);
  CHECK(max_gap(oracle::cat_dense_min_norm_shadow(xi), r.shadow) < 1e-10);
}

TEST_CASE("Newton agrees with the linear solver on the cat map") {
  const IFS g = build_cat_ifs();
  const auto xi = gen_pseudo_orbit(g, SymbolSequence::constant(0), SpacePoint{0.12, 0.56}, 1e-3, 500, 3);
  const auto a = shadow_linear_hyperbolic(g[0], xi);
  const auto b = shadow_newton(g, xi);
  double gap = 0.0;
  for (std::size_t k = 0; k < 500; ++k) gap = std::max(gap, dist(a.shadow.points[k], b.shadow.points[k]));
  CHECK(gap <= 1e-8);
}

TEST_CASE("Newton on the torus example (regression)") {
  const IFS f = build_torus_example();
  const auto xi = gen_pseudo_orbit(f, SymbolSequence::periodic({0, 1}), SpacePoint{0.1, 0.2, 0.3, 0.4}, 1e-4, 200, 1);
  const auto r = shadow_newton(f, xi);
  CHECK(r.residual <= 1e-10);
  CHECK(r.sup_dist == doctest::Approx(baseline::kTorusNewtonSupDist).epsilon(1e-9));
}

TEST_CASE("auto solver selection") {
  const auto xi2 = orbit_chain(build_cat_ifs(), SymbolSequence::constant(0), SpacePoint{0.3, 0.1}, 5);
  CHECK(shadow_auto(build_cat_ifs(), xi2).solver == "linear-hyperbolic");
  const IFS c = build_contraction_ifs(0.5, std::vector<double>{0.0, 0.5});
  CHECK(shadow_auto(c, orbit_chain(c, SymbolSequence::constant(0), SpacePoint{0.3}, 5)).solver == "contraction");
  const IFS f = build_torus_example();
  CHECK(shadow_auto(f, orbit_chain(f, SymbolSequence::constant(0), SpacePoint{0.3, 0.1, 0.2, 0.4}, 5)).solver ==
        "newton");
  CHECK(parse_solver_choice("hyperbolic") == SolverChoice::kLinearHyperbolic);
  CHECK_THROWS_AS(parse_solver_choice("magic"), ConfigError);
}

TEST_CASE("verify_shadowing") {
  const IFS c = build_contraction_ifs(0.5, std::vector<double>{0.0, 0.5});
  const auto exact = orbit_chain(c, SymbolSequence::constant(1), SpacePoint{0.2}, 30);
  CHECK(verify_shadowing(c, exact, exact, 1e-6).shadows);

  const auto xi = gen_pseudo_orbit(c, SymbolSequence::random(2, 999, 42), SpacePoint{0.3}, 0.01, 1000, 42);
  const auto r = shadow_contraction(c, xi);
  CHECK(verify_shadowing(c, xi, r.shadow, 0.02).shadows);

  const IFS g = build_cat_ifs();
  const auto eg = orbit_chain(g, SymbolSequence::constant(0), SpacePoint{0.3, 0.1}, 30);
  ChainRecord moved = eg;
  moved.points[12] = moved.points[12].shifted(Vector::Constant(2, 0.02 / std::sqrt(2.0)));
  const auto v = verify_shadowing(g, eg, moved, 0.01);
  CHECK_FALSE(v.shadows);
  REQUIRE(v.worst_k);
  CHECK(*v.worst_k == 12);
}

TEST_CASE("finite windows") {
  const IFS c = build_contraction_ifs(0.5, std::vector<double>{0.0, 0.5});
  std::vector<ChainRecord> singles;
  for (int i = 0; i < 5; ++i) {
    ChainRecord w;
    w.points = {SpacePoint{0.1 * i}};
    singles.push_back(w);
  }
  auto rep = finite_shadow_probe(c, singles, 1e-9);
  CHECK(rep.all_pass);
  for (const auto& w : rep.windows) CHECK(w.sup_dist == 0.0);

  std::vector<ChainRecord> windows;
  for (std::uint64_t s = 0; s < 50; ++s) {
    windows.push_back(gen_pseudo_orbit(c, SymbolSequence::random(2, 99, s), SpacePoint{0.4}, 0.01, 100, s));
  }
  CHECK(finite_shadow_probe(c, windows, 0.02 + 1e-12).all_pass);

  const IFS g = build_cat_ifs();
  const auto long_chain = gen_pseudo_orbit(g, SymbolSequence::constant(0), SpacePoint{0.3, 0.3}, 1e-3, 200, 2);
  std::vector<ChainRecord> nested;
  for (std::size_t m : {25, 50, 100, 200}) {
    ChainRecord w = long_chain;
    w.points.resize(m);
    nested.push_back(w);
  }
  rep = finite_shadow_probe(g, nested, 1e-3 * oracle::cat_bound_factor() + 1e-12);
  CHECK(rep.all_pass);
  for (const auto& w : rep.windows) CHECK(w.sup_dist <= 1e-3 * oracle::cat_bound_factor() + 1e-12);
}

TEST_CASE("uniqueness of shadows") {
  const IFS g = build_cat_ifs();
  const auto xi = gen_pseudo_orbit(g, SymbolSequence::constant(0), SpacePoint{0.2, 0.7}, 1e-5, 60, 4);
  auto v = check_uniqueness(g, xi, 0.2, 20);
  CHECK(v.outcome == UniquenessOutcome::kUnique);
  CHECK(v.shadowing_candidates >= 1);
  CHECK(v.max_deviation <= 1e-8);

  const auto exact = orbit_chain(g, SymbolSequence::constant(0), SpacePoint{0.2, 0.7}, 30);
  v = check_uniqueness(g, exact, 0.05, 10);
  CHECK(v.outcome == UniquenessOutcome::kUnique);

  const IFS id = build_identity_ifs(2);
  const auto still = orbit_chain(id, SymbolSequence::constant(0), SpacePoint{0.5, 0.5}, 20);
  v = check_uniqueness(id, still, 0.1, 20);
  CHECK(v.outcome == UniquenessOutcome::kNotUnique);
  CHECK(v.max_deviation > 1e-3);
  CHECK(std::string(to_string(v.outcome)) == "not-unique");
}
