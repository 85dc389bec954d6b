#include "ifsshadow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ifsshadow/catalog.hpp"
#include "ifsshadow/errors.hpp"
#include "ifsshadow/expansiveness.hpp"
#include "ifsshadow/metrics.hpp"
#include "ifsshadow/perturbation.hpp"
#include "ifsshadow/rng.hpp"
#include "ifsshadow/shadowing.hpp"
#include "ifsshadow/stability.hpp"

namespace ifsshadow {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void check_config(const RunConfig& c) {
  require(c.delta >= 0.0 && c.eps >= 0.0 && c.big_delta >= 0.0 && c.eta >= 0.0 && c.mu >= 0.0,
          "delta, eps, Delta, eta and mu must be nonnegative");
  require(c.len >= 1, "len must be at least 1");
  require(c.chains >= 1, "chains must be at least 1");
  require(c.m >= 0 && c.k_window >= 0 && c.n_cap >= 0, "m, K and N_cap must be nonnegative");
  require(c.grid >= 0, "grid must be nonnegative");
  require(c.trials >= 1 && c.samples >= 1, "trials and samples must be positive");
  require(c.centers >= 0 && c.probes >= 0, "centers and probes must be nonnegative");
}

MetricGrid grid_for(const RunConfig& c, int dim) {
  return MetricGrid(dim, c.grid > 0 ? c.grid : MetricGrid::default_resolution(dim));
}

SymbolSequence sigma_for(const RunConfig& c, const IFS& ifs, std::uint64_t seed) {
  SymbolSequence s = resolve_sigma(c.sigma, static_cast<int>(ifs.size()), seed);
  s.check_against(ifs);
  return s;
}

// Chain i of a batch: seed + i drives the noise, the start point and a
// random schedule.
ChainRecord make_chain(const RunConfig& c, const IFS& ifs, int i) {
  const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
  const SymbolSequence sigma = sigma_for(c, ifs, seed);
  const SpacePoint x0 = c.x0.empty() ? Rng::stream(seed, 1).torus_point(ifs.dim()) : parse_point(c.x0);
  if (x0.dim() != ifs.dim()) throw DimensionMismatch(ifs.dim(), x0.dim());
  PseudoOrbitOptions po;
  po.noise = parse_noise_model(c.noise);
  po.decimals = c.decimals;
  return gen_pseudo_orbit(ifs, sigma, x0, c.delta, static_cast<std::size_t>(c.len), seed, po);
}

ChainRecord input_chain(const RunConfig& c, const IFS& ifs) {
  if (c.chain_in.empty()) return make_chain(c, ifs, 0);
  ChainRecord chain = read_chain_csv(c.chain_in);
  if (chain.dim() != ifs.dim()) throw DimensionMismatch(ifs.dim(), chain.dim());
  chain.delta = validate_chain(ifs, chain).is_delta_chain_for;
  return chain;
}

ShadowOptions shadow_options(const RunConfig& c) {
  ShadowOptions o;
  o.solver = parse_solver_choice(c.solver);
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.padding = c.padding;
  return o;
}

void write_csv(const RunConfig& c, const std::string& content) {
  if (!c.csv.empty()) write_file_atomic(c.csv, content);
}

std::string fmt_point(const SpacePoint& p) {
  std::string s;
  for (int i = 0; i < p.dim(); ++i) s += (i ? "," : "") + format_number(p[i]);
  return s;
}

std::string point_header(const std::string& name, int dim) {
  std::string s;
  for (int i = 0; i < dim; ++i) s += (i ? "," : "") + name + std::to_string(i);
  return s;
}

Json cmd_generate(const RunConfig& c) {
  const IFS ifs = resolve_system(c.system);
  const ChainRecord chain = make_chain(c, ifs, 0);
  write_csv(c, chain_to_csv(chain));
  const ChainVerdict v = validate_chain(ifs, chain);
  return {{"points", chain.points.size()},
          {"delta_claimed", chain.delta},
          {"delta_measured", v.is_delta_chain_for},
          {"sigma", sigma_to_json(chain.sigma)},
          {"first_point", point_to_json(chain.points.front())},
          {"last_point", point_to_json(chain.points.back())}};
}

Json cmd_shadow(const RunConfig& c) {
  const IFS ifs = resolve_system(c.system);
  ShadowOptions o = shadow_options(c);
  const int n = c.chain_in.empty() ? c.chains : 1;
  if (o.solver == SolverChoice::kAuto && n > 1) o.contraction_factor = contraction_factor(ifs);
  Json runs = Json::array();
  double worst = 0.0, worst_res = 0.0;
  std::string solver;
  for (int i = 0; i < n; ++i) {
    const ChainRecord xi = c.chain_in.empty() ? make_chain(c, ifs, i) : input_chain(c, ifs);
    const ShadowResult r = shadow_auto(ifs, xi, o);
    if (i == 0) write_csv(c, chain_to_csv(r.shadow));
    worst = std::max(worst, r.sup_dist);
    worst_res = std::max(worst_res, r.residual);
    solver = r.solver;
    Json run = {{"solver", r.solver}, {"sup_dist", r.sup_dist}, {"residual", r.residual}, {"iterations", r.iterations}};
    if (r.bound) run["bound"] = *r.bound;
    runs.push_back(run);
  }
  if (n == 1) return runs[0];
  return {{"solver", solver}, {"sup_dist", worst}, {"residual", worst_res}, {"chains", n}, {"runs", runs}};
}

Json cmd_verify(const RunConfig& c) {
  require(!c.chain_in.empty() && !c.shadow_in.empty(), "verify needs --chain-in and --shadow-in");
  const IFS ifs = resolve_system(c.system);
  const ChainRecord xi = read_chain_csv(c.chain_in);
  const ChainRecord y = read_chain_csv(c.shadow_in);
  const ShadowVerdict v = verify_shadowing(ifs, xi, y, c.eps, c.tol);
  Json j = {{"shadows", v.shadows}, {"exact", v.exact}, {"sup_dist", v.sup_dist}, {"link_residual", v.link_residual}};
  j["worst_k"] = v.worst_k ? Json(*v.worst_k) : Json(nullptr);
  return j;
}

Json cmd_expansive(const RunConfig& c) {
  const IFS ifs = resolve_system(c.system);
  const SymbolSequence sigma = sigma_for(c, ifs, c.seed);
  const MetricGrid grid = grid_for(c, ifs.dim());
  const ExpansivenessReport r = estimate_expansive_const(ifs, sigma, grid, c.pair_tol, c.n_cap, c.delta_grid);
  Json verdicts = Json::array();
  for (const auto& v : r.per_delta) {
    verdicts.push_back({{"Delta", v.delta}, {"verdict", to_string(v.verdict)}, {"violations", v.violation_count}});
  }
  Json violations = Json::array();
  for (const auto& p : r.violating_pairs) {
    violations.push_back({{"x", point_to_json(p.x)}, {"y", point_to_json(p.y)}, {"max_sep", p.max_sep}});
  }
  Json j = {{"sigma", r.sigma_id},
            {"Delta_grid", c.delta_grid},
            {"grid_resolution", grid.resolution()},
            {"pairs_sampled", r.pairs_sampled},
            {"verdict", to_string(r.verdict)},
            {"verdicts", verdicts},
            {"violations", violations}};
  j["candidate_Delta"] = r.candidate_delta ? Json(*r.candidate_delta) : Json(nullptr);
  if (c.mu > 0.0) {
    const auto n = estimate_N_of_mu(ifs, sigma, c.eta, c.mu, grid, c.n_cap);
    j["N_of_mu"] = n ? Json(*n) : Json("saturated");
  }
  return j;
}

Json cmd_septime(const RunConfig& c) {
  require(!c.point_x.empty() && !c.point_y.empty(), "septime needs --x and --y");
  const IFS ifs = resolve_system(c.system);
  const SymbolSequence sigma = sigma_for(c, ifs, c.seed);
  const SpacePoint x = parse_point(c.point_x);
  const SpacePoint y = parse_point(c.point_y);
  const auto t = separation_time(ifs, sigma, x, y, c.eta, c.n_cap);
  return {{"separation_time", t ? Json(*t) : Json("saturated")}, {"initial_dist", dist(x, y)}};
}

Json cmd_perturb(const RunConfig& c) {
  const IFS ifs = resolve_system(c.system);
  const ChainRecord xi = input_chain(c, ifs);
  require(c.m < static_cast<int>(xi.points.size()), "m must be below the chain length");
  PerturbationOptions po;
  po.grid_resolution = c.grid;
  const PerturbedIfs p = perturbed_ifs(ifs, xi, xi.sigma, static_cast<std::size_t>(c.m), c.big_delta, po);
  write_csv(c, chain_to_csv(p.y));
  double shift = 0.0;
  for (int k = 0; k <= c.m; ++k) shift = std::max(shift, dist(xi.points[static_cast<std::size_t>(k)], p.y.points[static_cast<std::size_t>(k)]));
  const ChainVerdict v = validate_chain(p.g, p.y);
  Json labels = Json::array();
  for (const auto& g : p.g.maps()) labels.push_back(g.label());
  return {{"D0_matched", p.d0},
          {"max_shift", shift},
          {"chain_residual", v.is_delta_chain_for},
          {"exact_chain", v.is_exact_chain},
          {"delta_limit", p.delta_limit},
          {"chain_delta", validate_chain(ifs, xi).is_delta_chain_for},
          {"base_index", p.base_index},
          {"support_radii", p.support_radii},
          {"maps", labels}};
}

std::vector<std::pair<SpacePoint, SpacePoint>> parse_pairs(const std::string& text) {
  std::vector<std::pair<SpacePoint, SpacePoint>> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    const auto colon = item.find(':');
    require(colon != std::string::npos, "pairs look like p0,p1:q0,q1;...");
    out.emplace_back(parse_point(item.substr(0, colon)), parse_point(item.substr(colon + 1)));
  }
  return out;
}

Json cmd_movepoints(const RunConfig& c) {
  const int dim = c.pairs.empty() ? 2 : parse_pairs(c.pairs).front().first.dim();
  const auto pairs =
      c.pairs.empty() ? random_point_pairs(static_cast<std::size_t>(c.k_pairs), c.min_sep, c.delta, dim, c.seed)
                      : parse_pairs(c.pairs);
  const SmoothMap f = move_points_diffeo(pairs, c.delta, dim);
  double interp = 0.0;
  for (const auto& [p, q] : pairs) interp = std::max(interp, dist(f(p), q));
  const MetricGrid grid = grid_for(c, dim);
  const double r0 = rho0(f, identity_map(dim), grid);
  double roundtrip = 0.0;
  Rng rng(c.seed + 1);
  for (int i = 0; i < 1000; ++i) {
    const SpacePoint x = rng.torus_point(dim);
    roundtrip = std::max(roundtrip, dist(invert_map(f, f(x)), x));
  }
  for (const auto& pq : pairs) roundtrip = std::max(roundtrip, dist(invert_map(f, f(pq.first)), pq.first));
  std::string csv = point_header("p", dim) + "," + point_header("q", dim) + "\n";
  for (const auto& [p, q] : pairs) csv += fmt_point(p) + "," + fmt_point(q) + "\n";
  write_csv(c, csv);
  return {{"pairs", pairs.size()},
          {"interpolation_error", interp},
          {"rho0_to_identity", r0},
          {"grid_resolution", grid.resolution()},
          {"roundtrip", roundtrip},
          {"map", f.label()}};
}

IFS perturbed_family(const RunConfig& c, const IFS& f) {
  if (!c.g_system.empty()) return resolve_system(c.g_system);
  require(c.bump > 0.0, "semiconj needs --g or --bump");
  const int d = f.dim();
  const SpacePoint center(Vector::Constant(d, 0.5));
  const SpacePoint target = center.shifted(Vector::Constant(d, c.bump / std::sqrt(static_cast<double>(d))));
  const SmoothMap h = BumpDiffeo(d, {center}, {target}).as_map();
  std::vector<SmoothMap> maps;
  for (const auto& m : f.maps()) maps.push_back(compose(h, m));
  return IFS(std::move(maps));
}

Json cmd_semiconj(const RunConfig& c) {
  const IFS f = resolve_system(c.system);
  const IFS g = perturbed_family(c, f);
  const SymbolSequence sigma = sigma_for(c, f, c.seed);
  const MetricGrid grid = grid_for(c, f.dim());
  const double d0 = dist_D0(f, g, grid, PairingMode::kMatched);
  std::vector<SpacePoint> samples;
  Rng rng(c.seed);
  for (int i = 0; i < c.samples; ++i) samples.push_back(rng.torus_point(f.dim()));
  SemiConjOptions so;
  so.shadow = shadow_options(c);
  const SemiConjugacy h = build_semiconj(f, g, sigma, c.eps, samples, c.k_window, so);
  double shift = 0.0, worst = 0.0;
  std::size_t flagged = 0;
  std::string csv = point_header("x", f.dim()) + "," + point_header("hx", f.dim()) + ",max_residual\n";
  for (std::size_t i = 0; i < h.primary; ++i) {
    const auto& s = h.entries[i];
    shift = std::max(shift, s.shift);
    worst = std::max(worst, s.max_residual);
    flagged += s.ok ? 0 : 1;
    csv += fmt_point(s.x) + "," + fmt_point(s.hx) + "," + format_number(s.max_residual) + "\n";
  }
  write_csv(c, csv);
  const double conj = semiconj_residual(f, g, sigma, h, c.k_window);
  return {{"D0_matched", d0},
          {"d0_mode", h.d0_mode},
          {"samples", h.primary},
          {"table_size", h.entries.size()},
          {"max_shift", shift},
          {"max_residual", worst},
          {"conjugacy_residual", conj},
          {"flagged", flagged},
          {"all_within_eps", flagged == 0 && shift < c.eps && worst < c.eps},
          {"conjugacy_within_2eps", conj < 2.0 * c.eps}};
}

Json cmd_cover(const RunConfig& c) {
  const IFS ifs = resolve_system(c.system);
  require(c.map_index >= 0 && c.map_index < static_cast<int>(ifs.size()), "map index out of range");
  const SmoothMap& fi = ifs[static_cast<std::size_t>(c.map_index)];
  const CoverReport r = check_ball_cover(fi, c.eps, c.delta, static_cast<std::size_t>(c.centers),
                                         static_cast<std::size_t>(c.probes), c.seed,
                                         static_cast<std::size_t>(c.max_counterexamples));
  const int d = fi.dim();
  std::string csv = point_header("X", d) + "," + point_header("Z", d) + ",preimage_dist,epsilon\n";
  for (const auto& e : r.counterexamples) {
    csv += fmt_point(e.x) + "," + fmt_point(e.z) + "," + format_number(e.preimage_dist) + "," + format_number(c.eps) + "\n";
  }
  write_csv(c, csv);
  std::size_t passing = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < r.center_pass.size(); ++i) {
    passing += r.center_pass[i] ? 1 : 0;
    worst = std::max(worst, r.center_worst[i]);
  }
  return {{"pass", r.pass},
          {"map", fi.label()},
          {"centers", r.centers.size()},
          {"centers_passing", passing},
          {"violations", r.violation_count},
          {"counterexamples_written", r.counterexamples.size()},
          {"worst_preimage_dist", worst},
          {"seed", r.seed}};
}

Json cmd_metrics(const RunConfig& c) {
  const IFS f = resolve_system(c.system);
  const IFS g = resolve_system(c.g_system.empty() ? c.system : c.g_system);
  if (f.dim() != g.dim()) throw DimensionMismatch(f.dim(), g.dim());
  const MetricGrid grid = grid_for(c, f.dim());
  const PairingMode mode = parse_pairing_mode(c.pairing);
  double value = 0.0;
  const auto idx = static_cast<std::size_t>(c.map_index);
  require(idx < f.size() && idx < g.size(), "map index out of range");
  if (c.metric == "rho0") {
    value = rho0(f[idx], g[idx], grid);
  } else if (c.metric == "rho1") {
    value = rho1(f[idx], g[idx], grid);
  } else if (c.metric == "D0") {
    value = dist_D0(f, g, grid, mode);
  } else if (c.metric == "D1") {
    value = dist_D1(f, g, grid, mode);
  } else {
    throw ConfigError("unknown metric '" + c.metric + "'");
  }
  return {{"metric", c.metric}, {"value", value}, {"grid_resolution", grid.resolution()}, {"grid_points", grid.size()}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"generate", "shadow",     "verify",   "expansive", "septime",
                                                 "perturb",  "movepoints", "semiconj", "cover",     "metrics"};
  return names;
}

Json config_to_json(const RunConfig& c) {
  return {{"system", c.system},   {"g", c.g_system},
          {"sigma", c.sigma},     {"x0", c.x0},
          {"chain_in", c.chain_in}, {"shadow_in", c.shadow_in},
          {"x", c.point_x},       {"y", c.point_y},
          {"pairs", c.pairs},     {"delta", c.delta},
          {"eps", c.eps},         {"Delta", c.big_delta},
          {"eta", c.eta},         {"mu", c.mu},
          {"pair_tol", c.pair_tol}, {"bump", c.bump},
          {"min_sep", c.min_sep}, {"tol", c.tol},
          {"Delta_grid", c.delta_grid}, {"len", c.len},
          {"chains", c.chains},   {"m", c.m},
          {"K", c.k_window},      {"N_cap", c.n_cap},
          {"grid", c.grid},       {"trials", c.trials},
          {"samples", c.samples}, {"centers", c.centers},
          {"probes", c.probes},   {"k_pairs", c.k_pairs},
          {"max_iter", c.max_iter}, {"padding", c.padding},
          {"decimals", c.decimals}, {"map_index", c.map_index},
          {"max_counterexamples", c.max_counterexamples}, {"seed", c.seed},
          {"noise", c.noise},     {"solver", c.solver},
          {"metric", c.metric},   {"pairing", c.pairing},
          {"generator", Rng::kGeneratorName}};
}

Json run_command(const RunConfig& c) {
  check_config(c);
  Json result;
  if (c.command == "generate") {
    result = cmd_generate(c);
  } else if (c.command == "shadow") {
    result = cmd_shadow(c);
  } else if (c.command == "verify") {
    result = cmd_verify(c);
  } else if (c.command == "expansive") {
    result = cmd_expansive(c);
  } else if (c.command == "septime") {
    result = cmd_septime(c);
  } else if (c.command == "perturb") {
    result = cmd_perturb(c);
  } else if (c.command == "movepoints") {
    result = cmd_movepoints(c);
  } else if (c.command == "semiconj") {
    result = cmd_semiconj(c);
  } else if (c.command == "cover") {
    result = cmd_cover(c);
  } else if (c.command == "metrics") {
    result = cmd_metrics(c);
  } else {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  return {{"command", c.command}, {"config", config_to_json(c)}, {"result", result}};
}

}  // namespace ifsshadow
