#include "ifsshadow/stability.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <map>

#include "ifsshadow/errors.hpp"
#include "ifsshadow/parallel.hpp"
#include "ifsshadow/rng.hpp"

namespace ifsshadow {

namespace {

bool window_two_sided(const IFS& ifs) { return ifs.all_invertible() && ifs.all_torus_maps(); }

bool single_symbol(const SymbolSequence& sigma) {
  const auto& w = sigma.window();
  if (w.empty()) return true;
  const int s = w.front();
  if (sigma.extension() == SymbolSequence::Extension::kConstant && sigma.fill() != s) return false;
  return std::all_of(w.begin(), w.end(), [s](int v) { return v == s; });
}

ChainRecord orbit_window(const IFS& g, const SymbolSequence& sigma, const SpacePoint& x, int k_window,
                         bool two_sided) {
  const std::int64_t lo = two_sided ? -k_window : 0;
  std::vector<SpacePoint> back;
  SpacePoint p = x;
  for (std::int64_t k = -1; k >= lo; --k) {
    p = invert_map(g[static_cast<std::size_t>(sigma(k))], p);
    back.push_back(p);
  }
  ChainRecord out;
  out.sigma = sigma;
  out.first = lo;
  out.points.assign(back.rbegin(), back.rend());
  out.points.push_back(x);
  p = x;
  for (std::int64_t k = 0; k < k_window; ++k) {
    p = g[static_cast<std::size_t>(sigma(k))](p);
    out.points.push_back(p);
  }
  return out;
}

// Shadow of the G-orbit of x; the orbit is relabeled so x sits at index 0.
SemiConjugacySample solve_sample(const IFS& f, const IFS& g, const SymbolSequence& sigma, const SpacePoint& x,
                                 double eps, int k_window, bool two_sided, const ShadowOptions& options) {
  SemiConjugacySample s;
  s.x = x;
  s.hx = x;
  try {
    const ChainRecord xi = orbit_window(g, sigma, x, k_window, two_sided);
    const ShadowResult r = shadow_auto(f, xi, options);
    s.hx = r.shadow.at(0);
    s.shift = dist(x, s.hx);
    s.max_residual = r.sup_dist;
    s.ok = s.shift < eps && s.max_residual < eps;
  } catch (const Error& e) {
    s.error = e.what();
    s.ok = false;
  }
  return s;
}

std::string point_key(const SpacePoint& p) {
  std::string key(sizeof(double) * static_cast<std::size_t>(p.dim()), '\0');
  std::memcpy(key.data(), p.coords().data(), key.size());
  return key;
}

}  // namespace

SpacePoint SemiConjugacy::operator()(const SpacePoint& x) const {
  if (entries.empty()) throw Error("semi-conjugacy table is empty");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double d = dist(x, entries[i].x);
    if (d < best_d) {
      best_d = d;
      best = i;
      if (d == 0.0) break;
    }
  }
  if (best_d > epsilon) {
    throw Error("nearest sample is " + format_number(best_d) + " away, farther than epsilon " +
                format_number(epsilon));
  }
  return entries[best].hx;
}

bool SemiConjugacy::all_ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const SemiConjugacySample& s) { return s.ok; });
}

SemiConjugacy build_semiconj(const IFS& f, const IFS& g, const SymbolSequence& sigma, double eps,
                             const std::vector<SpacePoint>& samples, int k_window, const SemiConjOptions& options) {
  if (f.dim() != g.dim()) throw DimensionMismatch(f.dim(), g.dim());
  if (f.size() != g.size()) throw Error("semi-conjugacy pairs maps by index; families differ in size");
  if (!(eps > 0.0)) throw Error("epsilon must be positive");
  if (k_window < 0) throw Error("K must be nonnegative");
  sigma.check_against(f);

  SemiConjugacy h;
  h.epsilon = eps;
  h.k_window = k_window;
  h.two_sided = window_two_sided(f) && window_two_sided(g);
  h.primary = samples.size();

  ShadowOptions so = options.shadow;
  if (so.solver == SolverChoice::kAuto && !so.contraction_factor) so.contraction_factor = contraction_factor(f);

  std::vector<SpacePoint> points = samples;
  if (options.include_orbit_points && single_symbol(sigma)) {
    std::map<std::string, bool> seen;
    for (const auto& x : samples) seen[point_key(x)] = true;
    for (const auto& x : samples) {
      ChainRecord orbit;
      try {
        orbit = orbit_window(g, sigma, x, k_window, h.two_sided);
      } catch (const Error&) {
        continue;
      }
      for (std::size_t i = 0; i < orbit.points.size(); ++i) {
        const std::int64_t k = orbit.first + static_cast<std::int64_t>(i);
        if (k == 0) continue;
        const SpacePoint& z = orbit.points[i];
        if (seen.emplace(point_key(z), true).second) points.push_back(z);
      }
    }
  }
  h.entries.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    h.entries[i] = solve_sample(f, g, sigma, points[i], eps, k_window, h.two_sided, so);
  });
  return h;
}

double semiconj_residual(const IFS& f, const IFS& g, const SymbolSequence& sigma, const SemiConjugacy& h,
                         int k_window) {
  if (h.entries.empty()) throw Error("semi-conjugacy table is empty");
  const bool two_sided = h.two_sided;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < h.entries.size(); ++i) index.emplace(point_key(h.entries[i].x), i);
  auto lookup = [&](const SpacePoint& z) {
    const auto it = index.find(point_key(z));
    return it != index.end() ? h.entries[it->second].hx : h(z);
  };
  return parallel_max(h.primary, [&](std::size_t i) {
    const auto& s = h.entries[i];
    const ChainRecord gz = orbit_window(g, sigma, s.x, k_window, two_sided);
    const ChainRecord fh = orbit_window(f, sigma, s.hx, k_window, two_sided);
    double worst = 0.0;
    for (std::size_t j = 0; j < gz.points.size(); ++j) {
      worst = std::max(worst, dist(fh.points[j], lookup(gz.points[j])));
    }
    return worst;
  });
}

double image_net_radius(const SemiConjugacy& h, const MetricGrid& grid) {
  if (h.entries.empty()) throw Error("semi-conjugacy table is empty");
  return parallel_max(grid.size(), [&](std::size_t i) {
    const SpacePoint p = grid.point(i);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : h.entries) best = std::min(best, dist(p, e.hx));
    return best;
  });
}

SpacePoint cover_center(std::uint64_t seed, std::size_t index, int dim) {
  return Rng::stream(seed, 2 * static_cast<std::uint64_t>(index)).torus_point(dim);
}

CoverReport check_ball_cover(const SmoothMap& fi, double eps, double delta, std::size_t n_centers,
                             std::size_t n_probes, std::uint64_t seed, std::size_t max_counterexamples) {
  if (!fi.invertible()) throw NotInvertible("ball cover check needs an invertible map");
  if (!(eps >= 0.0) || !(eps + delta >= 0.0)) throw Error("ball radius must be nonnegative");
  const int d = fi.dim();
  CoverReport report;
  report.epsilon = eps;
  report.delta = delta;
  report.seed = seed;
  report.probes_per_center = n_probes;
  report.centers.resize(n_centers);
  report.center_worst.assign(n_centers, 0.0);
  std::vector<std::vector<CoverCounterexample>> found(n_centers);
  std::vector<std::size_t> counts(n_centers, 0);
  parallel_for(n_centers, [&](std::size_t i) {
    const SpacePoint x = cover_center(seed, i, d);
    report.centers[i] = x;
    const SpacePoint fx = fi(x);
    Rng rng = Rng::stream(seed, 2 * static_cast<std::uint64_t>(i) + 1);
    for (std::size_t j = 0; j < n_probes; ++j) {
      const SpacePoint z = fx.shifted(rng.in_ball(d, eps + delta));
      const double pd = dist(invert_map(fi, z), x);
      report.center_worst[i] = std::max(report.center_worst[i], pd);
      if (!(pd < eps)) {
        ++counts[i];
        if (found[i].size() < max_counterexamples) found[i].push_back({i, x, z, pd});
      }
    }
  });
  report.center_pass.resize(n_centers);
  for (std::size_t i = 0; i < n_centers; ++i) {
    report.center_pass[i] = counts[i] == 0;
    report.violation_count += counts[i];
    for (auto& c : found[i]) {
      if (report.counterexamples.size() >= max_counterexamples) break;
      report.counterexamples.push_back(std::move(c));
    }
  }
  report.pass = report.violation_count == 0;
  return report;
}

}  // namespace ifsshadow
