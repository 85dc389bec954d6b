#include "ifsshadow/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ifsshadow/errors.hpp"
#include "ifsshadow/metrics.hpp"
#include "ifsshadow/rng.hpp"

namespace ifsshadow {

double bump_profile(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

double bump_profile_slope(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  const double w = 1.0 - a * a;
  return -2.0 * t / (w * w) * bump_profile(t);
}

double bump_profile_max_slope() {
  static const double value = [] {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (std::abs(bump_profile_slope(m1)) < std::abs(bump_profile_slope(m2))) {
        lo = m1;
      } else {
        hi = m2;
      }
    }
    return std::abs(bump_profile_slope(0.5 * (lo + hi)));
  }();
  return value;
}

namespace {

double min_pairwise(const std::vector<SpacePoint>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, dist(pts[i], pts[j]));
  }
  return best;
}

ChainRecord head_of(const ChainRecord& xi, const SymbolSequence& sigma, std::size_t m) {
  ChainRecord out = xi;
  out.sigma = sigma;
  out.points.resize(m + 1);
  return out;
}

}  // namespace

BumpDiffeo::BumpDiffeo(int dim, std::vector<SpacePoint> centers, std::vector<SpacePoint> targets,
                       std::optional<double> support_radius)
    : dim_(dim), centers_(std::move(centers)) {
  if (centers_.size() != targets.size()) throw Error("bump needs one target per center");
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (centers_[i].dim() != dim_) throw DimensionMismatch(dim_, centers_[i].dim());
    if (targets[i].dim() != dim_) throw DimensionMismatch(dim_, targets[i].dim());
    displacements_.push_back(geodesic_displacement(centers_[i], targets[i]));
  }
  const double spread = std::min({min_pairwise(centers_), min_pairwise(targets), 0.5});
  if (!(spread > 0.0)) throw Infeasible("bump centers or targets coincide");
  radius_ = support_radius ? *support_radius : 0.4 * spread;
  if (!(radius_ > 0.0) || 2.0 * radius_ >= spread) {
    throw Infeasible("bump supports of radius " + format_number(radius_) + " overlap (closest centers " +
                     format_number(spread) + " apart)");
  }
  const double margin = bump_profile_max_slope() * max_displacement() / radius_;
  if (margin >= 1.0) {
    throw Infeasible("displacement " + format_number(max_displacement()) + " too large for support radius " +
                     format_number(radius_) + "; move the points less or spread them further apart");
  }
}

double BumpDiffeo::max_displacement() const {
  double best = 0.0;
  for (const auto& d : displacements_) best = std::max(best, d.norm());
  return best;
}

SpacePoint BumpDiffeo::operator()(const SpacePoint& x) const {
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const double r = dist(centers_[i], x);
    // Supports are disjoint, so at most one bump acts on x.
    if (r < radius_) return x.shifted(bump_profile(r / radius_) * displacements_[i]);
  }
  return x;
}

Matrix BumpDiffeo::jacobian(const SpacePoint& x) const {
  Matrix j = Matrix::Identity(dim_, dim_);
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (dist(centers_[i], x) >= radius_) continue;
    const Vector v = lift_displacement(centers_[i], x);
    const double r = v.norm();
    if (r >= radius_ || r == 0.0) continue;
    const Vector grad = bump_profile_slope(r / radius_) / (radius_ * r) * v;
    j += displacements_[i] * grad.transpose();
  }
  return j;
}

SmoothMap BumpDiffeo::as_map() const {
  std::string label = "bump(" + format_number(radius_);
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    label += ";";
    for (int c = 0; c < dim_; ++c) label += (c ? "," : "") + format_number(centers_[i][c]);
    label += ":";
    for (int c = 0; c < dim_; ++c) label += (c ? "," : "") + format_number(displacements_[i][c]);
  }
  label += ")";
  auto self = std::make_shared<const BumpDiffeo>(*this);
  const SmoothMap forward(
      label, dim_, [self](const SpacePoint& p) { return (*self)(p); }, {},
      [self](const SpacePoint& p) { return self->jacobian(p); });
  // Each ball is mapped onto itself, so points outside every ball are fixed.
  auto inverse = [self, forward](const SpacePoint& z) {
    for (const auto& c : self->centers()) {
      if (dist(c, z) < self->support_radius()) return newton_invert(forward, z, z);
    }
    return z;
  };
  return SmoothMap(
      label, dim_, [self](const SpacePoint& p) { return (*self)(p); }, inverse,
      [self](const SpacePoint& p) { return self->jacobian(p); });
}

SmoothMap move_points_diffeo(const std::vector<std::pair<SpacePoint, SpacePoint>>& pairs, double delta, int dim) {
  if (dim < 2) throw Error("moving points needs dimension at least 2");
  if (pairs.empty()) return identity_map(dim);
  std::vector<SpacePoint> p, q;
  for (const auto& [a, b] : pairs) {
    if (!(dist(a, b) < delta)) {
      throw Error("pair moved by " + format_number(dist(a, b)) + ", not below delta " + format_number(delta));
    }
    p.push_back(a);
    q.push_back(b);
  }
  return BumpDiffeo(dim, std::move(p), std::move(q)).as_map();
}

std::vector<std::pair<SpacePoint, SpacePoint>> random_point_pairs(std::size_t k, double min_sep, double max_shift,
                                                                  int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SpacePoint> p;
  for (int draw = 0; p.size() < k; ++draw) {
    if (draw >= 10000) throw Infeasible("cannot place " + std::to_string(k) + " points " + format_number(min_sep) + " apart");
    const SpacePoint c = rng.torus_point(dim);
    bool far = true;
    for (const auto& q : p) far = far && dist(c, q) >= min_sep;
    if (far) p.push_back(c);
  }
  std::vector<std::pair<SpacePoint, SpacePoint>> out;
  for (const auto& c : p) out.emplace_back(c, c.shifted(rng.in_ball(dim, max_shift * (1.0 - 1e-9))));
  return out;
}

std::vector<SpacePoint> adjusted_points(const IFS& ifs, const ChainRecord& xi, std::size_t m, double eta,
                                        int lipschitz_resolution) {
  if (m >= xi.points.size()) throw Error("m must be below the chain length");
  if (!(eta > 0.0)) throw Error("eta must be positive");
  const ChainRecord head = head_of(xi, xi.sigma, m);
  const double delta = validate_chain(ifs, head).is_delta_chain_for;
  const MetricGrid grid(ifs.dim(), lipschitz_resolution > 0 ? lipschitz_resolution
                                                            : MetricGrid::default_resolution(ifs.dim()));
  double lip = 0.0;
  if (delta > 0.0 && m > 0) {
    for (const auto& f : ifs.maps()) lip = std::max(lip, lipschitz_estimate(f, grid));
  }
  const double step = 0.5 * std::min(eta, 2.0 * delta / (1.0 + lip));
  const int d = ifs.dim();

  std::vector<SpacePoint> y;
  y.reserve(m + 1);
  y.push_back(xi.points[0]);
  auto nearest = [&](const SpacePoint& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : y) best = std::min(best, dist(p, q));
    return best;
  };
  for (std::size_t k = 1; k <= m; ++k) {
    const SpacePoint& x = xi.points[k];
    const double gap = nearest(x);
    if (gap >= step && gap > 0.0) {
      y.push_back(x);
      continue;
    }
    SpacePoint pick = x;
    double pick_gap = gap;
    for (int axis = 0; axis < d && step > 0.0; ++axis) {
      for (double sign : {1.0, -1.0}) {
        const SpacePoint c = x.shifted(sign * step * Vector::Unit(d, axis));
        const double g = nearest(c);
        if (g > pick_gap) {
          pick = c;
          pick_gap = g;
        }
      }
    }
    if (!(pick_gap > 0.0)) {
      throw Infeasible("cannot separate point " + std::to_string(k) + " from earlier points within eta");
    }
    y.push_back(pick);
  }
  return y;
}

AdjustedPointsCheck check_adjusted_points(const IFS& ifs, const ChainRecord& xi, const std::vector<SpacePoint>& y,
                                          double eta) {
  if (y.empty() || y.size() > xi.points.size()) throw Error("adjusted points do not fit the chain");
  AdjustedPointsCheck c;
  const ChainRecord head = head_of(xi, xi.sigma, y.size() - 1);
  c.delta = validate_chain(ifs, head).is_delta_chain_for;
  for (std::size_t k = 0; k < y.size(); ++k) c.max_shift = std::max(c.max_shift, dist(xi.points[k], y[k]));
  for (std::size_t k = 0; k + 1 < y.size(); ++k) {
    const int s = xi.sigma(xi.first + static_cast<std::int64_t>(k));
    c.max_residual = std::max(c.max_residual, dist(ifs[static_cast<std::size_t>(s)](y[k]), y[k + 1]));
  }
  c.min_separation = y.size() < 2 ? std::numeric_limits<double>::infinity() : min_pairwise(y);
  const bool links_ok = c.delta > 0.0 ? c.max_residual < 3.0 * c.delta : c.max_residual <= 1e-12;
  c.ok = c.max_shift < eta && links_ok && c.min_separation > 0.0;
  return c;
}

double perturbation_delta_limit(const IFS& ifs, double big_delta, int grid_resolution) {
  if (!(big_delta > 0.0)) throw Error("Delta must be positive");
  const MetricGrid grid(ifs.dim(), grid_resolution > 0 ? grid_resolution : MetricGrid::default_resolution(ifs.dim()));
  double delta0 = 0.5 * big_delta;
  for (const auto& f : ifs.maps()) delta0 = std::min(delta0, big_delta / inverse_lipschitz_estimate(f, grid));
  return delta0 / 6.0;
}

SymbolSequence diagonal_symbols(const SymbolSequence& sigma, int n_symbols) {
  std::vector<int> w = sigma.window();
  for (auto& s : w) s = s * n_symbols + s;
  if (sigma.extension() == SymbolSequence::Extension::kPeriodic) return SymbolSequence::periodic(w, sigma.first());
  return SymbolSequence::padded(w, sigma.fill() * n_symbols + sigma.fill(), sigma.first());
}

IFS replicate_family(const IFS& ifs, const std::vector<int>& base_index) {
  std::vector<SmoothMap> maps;
  for (int b : base_index) maps.push_back(ifs[static_cast<std::size_t>(b)]);
  return IFS(std::move(maps));
}

PerturbedIfs perturbed_ifs(const IFS& ifs, const ChainRecord& xi, const SymbolSequence& sigma, std::size_t m,
                           double big_delta, const PerturbationOptions& options) {
  const int d = ifs.dim();
  if (d < 2) throw Error("perturbing an IFS needs dimension at least 2");
  if (xi.dim() != d) throw DimensionMismatch(d, xi.dim());
  if (m >= xi.points.size()) throw Error("m must be below the chain length");
  sigma.check_against(ifs);
  const int n = static_cast<int>(ifs.size());

  const double delta_limit = perturbation_delta_limit(ifs, big_delta, options.grid_resolution);
  ChainRecord chain = xi;
  chain.sigma = sigma;
  const double delta = validate_chain(ifs, head_of(xi, sigma, m)).is_delta_chain_for;
  if (delta > delta_limit) {
    throw Infeasible("chain slack " + format_number(delta) + " exceeds " + format_number(delta_limit) +
                     " admissible for Delta = " + format_number(big_delta));
  }
  const double eta = options.eta > 0.0 ? options.eta : 3.0 * delta_limit;
  std::vector<SpacePoint> y = adjusted_points(ifs, chain, m, eta, options.grid_resolution);
  std::vector<int> base_index;
  std::vector<double> radii;

  std::vector<SmoothMap> maps;
  for (int a = 0; a < n; ++a) {
    std::vector<SpacePoint> centers, targets;
    bool moves = false;
    for (std::size_t k = 0; k < m; ++k) {
      if (sigma(xi.first + static_cast<std::int64_t>(k)) != a) continue;
      centers.push_back(ifs[static_cast<std::size_t>(a)](y[k]));
      targets.push_back(y[k + 1]);
      moves = moves || !(centers.back() == targets.back());
    }
    std::optional<SmoothMap> h;
    if (moves) {
      BumpDiffeo bump(d, centers, targets);
      radii.push_back(bump.support_radius());
      h = bump.as_map();
    }
    for (int b = 0; b < n; ++b) {
      const SmoothMap& f = ifs[static_cast<std::size_t>(b)];
      maps.push_back(h ? compose(*h, f) : f);
      base_index.push_back(b);
    }
  }
  PerturbedIfs out{IFS(std::move(maps))};
  out.base_index = std::move(base_index);
  out.support_radii = std::move(radii);
  out.delta_limit = delta_limit;
  out.eta = eta;
  out.adjusted = y;

  const MetricGrid grid(d, options.grid_resolution > 0 ? options.grid_resolution : MetricGrid::default_resolution(d));
  out.d0 = dist_D0(replicate_family(ifs, out.base_index), out.g, grid, PairingMode::kMatched);
  if (!(out.d0 < big_delta)) {
    throw Infeasible("measured D0 " + format_number(out.d0) + " is not below Delta " + format_number(big_delta));
  }

  const SymbolSequence gs = diagonal_symbols(sigma, n);
  std::vector<SpacePoint> before;
  SpacePoint p = y.front();
  for (int i = 1; i <= options.extend_back; ++i) {
    p = invert_map(out.g[static_cast<std::size_t>(gs(xi.first - i))], p);
    before.push_back(p);
  }
  out.y.sigma = gs;
  out.y.kind = ChainKind::kExactChain;
  out.y.delta = 0.0;
  out.y.first = xi.first - static_cast<std::int64_t>(before.size());
  out.y.points.assign(before.rbegin(), before.rend());
  out.y.points.insert(out.y.points.end(), y.begin(), y.end());
  p = y.back();
  for (std::int64_t k = xi.first + static_cast<std::int64_t>(m); k < xi.last(); ++k) {
    p = out.g[static_cast<std::size_t>(gs(k))](p);
    out.y.points.push_back(p);
  }
  return out;
}

}  // namespace ifsshadow
