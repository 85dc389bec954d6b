#include "ifsshadow/expansiveness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "ifsshadow/errors.hpp"
#include "ifsshadow/parallel.hpp"

namespace ifsshadow {

namespace {

// Walks the two-sided orbits of a pair in the order n = 0, 1, -1, 2, -2, ...
// and calls visit(n, distance) until it returns false.
template <class Visit>
void walk_pair(const IFS& ifs, const SymbolSequence& sigma, const SpacePoint& x, const SpacePoint& y, int n_cap,
               Visit visit) {
  if (x.dim() != ifs.dim()) throw DimensionMismatch(ifs.dim(), x.dim());
  if (y.dim() != ifs.dim()) throw DimensionMismatch(ifs.dim(), y.dim());
  if (!visit(0, dist(x, y))) return;
  SpacePoint fx = x, fy = y, bx = x, by = y;
  for (int n = 1; n <= n_cap; ++n) {
    const auto& f = ifs[static_cast<std::size_t>(sigma(n - 1))];
    fx = f(fx);
    fy = f(fy);
    if (!visit(n, dist(fx, fy))) return;
    const auto& g = ifs[static_cast<std::size_t>(sigma(-n))];
    bx = invert_map(g, bx);
    by = invert_map(g, by);
    if (!visit(-n, dist(bx, by))) return;
  }
}

void require_invertible(const IFS& ifs) {
  if (!ifs.all_invertible()) throw NotInvertible("two-sided orbits need invertible maps");
}

}  // namespace

std::optional<int> separation_time(const IFS& ifs, const SymbolSequence& sigma, const SpacePoint& x,
                                   const SpacePoint& y, double eta, int n_cap) {
  require_invertible(ifs);
  std::optional<int> out;
  walk_pair(ifs, sigma, x, y, n_cap, [&](int n, double d) {
    if (d > eta) {
      out = std::abs(n);
      return false;
    }
    return true;
  });
  return out;
}

double max_separation(const IFS& ifs, const SymbolSequence& sigma, const SpacePoint& x, const SpacePoint& y,
                      int n_cap, double stop_above) {
  require_invertible(ifs);
  double best = 0.0;
  walk_pair(ifs, sigma, x, y, n_cap, [&](int, double d) {
    best = std::max(best, d);
    return best <= stop_above;
  });
  return best;
}

std::vector<Vector> pair_directions(int dim) {
  std::vector<Vector> dirs;
  for (int i = 0; i < dim; ++i) dirs.push_back(Vector::Unit(dim, i));
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      dirs.push_back(r * (Vector::Unit(dim, i) + Vector::Unit(dim, j)));
      dirs.push_back(r * (Vector::Unit(dim, i) - Vector::Unit(dim, j)));
    }
  }
  return dirs;
}

std::vector<double> pair_scales(double start) {
  if (!(start > 0.0)) throw Error("pair scale must be positive");
  std::vector<double> out;
  for (double s = start; s <= 0.5; s *= 2.0) out.push_back(s);
  return out;
}

std::vector<PointPair> sample_pairs(const MetricGrid& grid, const std::vector<double>& scales) {
  const auto dirs = pair_directions(grid.dim());
  std::vector<PointPair> out;
  out.reserve(grid.size() * dirs.size() * scales.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SpacePoint x = grid.point(i);
    for (const auto& u : dirs) {
      for (double s : scales) out.push_back({x, x.shifted(s * u)});
    }
  }
  return out;
}

const char* to_string(ExpansiveVerdict verdict) {
  switch (verdict) {
    case ExpansiveVerdict::kExpansiveAtDelta:
      return "expansive-at-delta";
    case ExpansiveVerdict::kViolated:
      return "violated";
    case ExpansiveVerdict::kInconclusive:
      break;
  }
  return "inconclusive";
}

ExpansivenessReport estimate_expansive_const(const IFS& ifs, const SymbolSequence& sigma, const MetricGrid& grid,
                                             double pair_tolerance, int n_cap, const std::vector<double>& delta_grid,
                                             std::size_t max_reported) {
  require_invertible(ifs);
  if (grid.dim() != ifs.dim()) throw DimensionMismatch(ifs.dim(), grid.dim());
  if (!(pair_tolerance > 0.0)) throw Error("pair tolerance must be positive");
  if (n_cap < 0) throw Error("N_cap must be nonnegative");
  sigma.check_against(ifs);

  ExpansivenessReport report;
  report.sigma_id = sigma.describe();
  report.n_cap = n_cap;
  report.pair_tolerance = pair_tolerance;

  std::vector<PointPair> pairs = sample_pairs(grid, pair_scales(pair_tolerance * (1.0 + 1e-6)));
  pairs.erase(std::remove_if(pairs.begin(), pairs.end(),
                             [&](const PointPair& p) { return !(dist(p.x, p.y) > pair_tolerance); }),
              pairs.end());
  report.pairs_sampled = pairs.size();

  const double top = delta_grid.empty() ? 0.0 : *std::max_element(delta_grid.begin(), delta_grid.end());
  std::vector<double> sep(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    sep[i] = max_separation(ifs, sigma, pairs[i].x, pairs[i].y, n_cap, top);
  });

  for (double delta : delta_grid) {
    DeltaVerdict v;
    v.delta = delta;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (sep[i] <= delta) {
        ++v.violation_count;
        if (v.violations.size() < max_reported) v.violations.push_back({pairs[i].x, pairs[i].y, sep[i]});
      }
    }
    if (pairs.empty()) {
      v.verdict = ExpansiveVerdict::kInconclusive;
    } else {
      v.verdict = v.violation_count > 0 ? ExpansiveVerdict::kViolated : ExpansiveVerdict::kExpansiveAtDelta;
    }
    report.per_delta.push_back(std::move(v));
  }

  if (pairs.empty() || delta_grid.empty()) return report;
  const DeltaVerdict* best_ok = nullptr;
  const DeltaVerdict* smallest = nullptr;
  for (const auto& v : report.per_delta) {
    if (v.verdict == ExpansiveVerdict::kExpansiveAtDelta && (!best_ok || v.delta > best_ok->delta)) best_ok = &v;
    if (!smallest || v.delta < smallest->delta) smallest = &v;
  }
  if (best_ok) {
    report.verdict = ExpansiveVerdict::kExpansiveAtDelta;
    report.candidate_delta = best_ok->delta;
  } else {
    report.verdict = ExpansiveVerdict::kViolated;
    report.candidate_delta = smallest->delta;
    report.violating_pairs = smallest->violations;
  }
  return report;
}

std::optional<int> estimate_N_of_mu(const IFS& ifs, const SymbolSequence& sigma, double eta, double mu,
                                    const MetricGrid& grid, int n_cap, const std::vector<double>& scales) {
  require_invertible(ifs);
  if (grid.dim() != ifs.dim()) throw DimensionMismatch(ifs.dim(), grid.dim());
  if (n_cap < 1) throw Error("N_cap must be at least 1");
  sigma.check_against(ifs);
  const std::vector<PointPair> pairs = sample_pairs(grid, scales);
  std::vector<int> need(pairs.size(), 1);
  std::atomic<bool> saturated{false};
  parallel_for(pairs.size(), [&](std::size_t i) {
    if (saturated.load(std::memory_order_relaxed)) return;
    if (!(dist(pairs[i].x, pairs[i].y) >= mu)) return;
    const auto t = separation_time(ifs, sigma, pairs[i].x, pairs[i].y, eta, n_cap - 1);
    if (!t) {
      saturated = true;
      return;
    }
    need[i] = *t + 1;
  });
  if (saturated) return std::nullopt;
  int n = 1;
  for (int v : need) n = std::max(n, v);
  return n;
}

std::optional<int> estimate_N_of_mu(const IFS& ifs, const SymbolSequence& sigma, double eta, double mu,
                                    const MetricGrid& grid, int n_cap) {
  return estimate_N_of_mu(ifs, sigma, eta, mu, grid, n_cap, pair_scales(mu * (1.0 + 1e-9)));
}

}  // namespace ifsshadow
