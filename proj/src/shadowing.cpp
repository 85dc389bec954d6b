#include "ifsshadow/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ifsshadow/errors.hpp"
#include "ifsshadow/metrics.hpp"
#include "ifsshadow/rng.hpp"

namespace ifsshadow {

namespace {

double window_sup_dist(const ChainRecord& xi, const std::vector<SpacePoint>& y, std::size_t offset) {
  double best = 0.0;
  for (std::size_t k = 0; k < xi.points.size(); ++k) best = std::max(best, dist(xi.points[k], y[offset + k]));
  return best;
}

double max_link_residual(const IFS& ifs, const std::vector<SpacePoint>& pts, std::int64_t first,
                         const SymbolSequence& sigma) {
  double best = 0.0;
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const int s = sigma(first + static_cast<std::int64_t>(j));
    best = std::max(best, dist(ifs[static_cast<std::size_t>(s)](pts[j]), pts[j + 1]));
  }
  return best;
}

void require_nonempty(const ChainRecord& xi) {
  if (xi.points.empty()) throw Error("chain has no points");
}

ChainRecord exact_record(std::vector<SpacePoint> pts, const ChainRecord& xi) {
  ChainRecord out;
  out.points = std::move(pts);
  out.sigma = xi.sigma;
  out.delta = 0.0;
  out.kind = ChainKind::kShadowCandidate;
  out.first = xi.first;
  return out;
}

// Solves the block-tridiagonal system with diagonal blocks diag[j], super
// diagonal upper[j] (between j and j+1) and sub diagonal lower[j] (between
// j+1 and j).
std::vector<Vector> block_thomas(const std::vector<Matrix>& diag, const std::vector<Matrix>& upper,
                                 const std::vector<Matrix>& lower, const std::vector<Vector>& rhs) {
  const std::size_t n = diag.size();
  std::vector<Matrix> cp(n);
  std::vector<Vector> dp(n);
  Matrix m = diag[0];
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) m = diag[j] - lower[j - 1] * cp[j - 1];
    Eigen::PartialPivLU<Matrix> lu(m);
    const Vector b = j > 0 ? Vector(rhs[j] - lower[j - 1] * dp[j - 1]) : rhs[j];
    dp[j] = lu.solve(b);
    if (j + 1 < n) cp[j] = lu.solve(upper[j]);
  }
  std::vector<Vector> x(n);
  x[n - 1] = dp[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) x[j] = dp[j] - cp[j] * x[j + 1];
  return x;
}

}  // namespace

SolverChoice parse_solver_choice(const std::string& name) {
  if (name == "auto") return SolverChoice::kAuto;
  if (name == "contraction") return SolverChoice::kContraction;
  if (name == "linear-hyperbolic" || name == "hyperbolic" || name == "linear") return SolverChoice::kLinearHyperbolic;
  if (name == "newton") return SolverChoice::kNewton;
  throw ConfigError("unknown solver '" + name + "'");
}

double contraction_factor(const IFS& ifs, int resolution) {
  const MetricGrid grid(ifs.dim(), resolution > 0 ? resolution : MetricGrid::default_resolution(ifs.dim()));
  double q = 0.0;
  for (const auto& m : ifs.maps()) q = std::max(q, lipschitz_estimate(m, grid));
  return q;
}

ShadowResult shadow_contraction(const IFS& ifs, const ChainRecord& xi, const ShadowOptions& options) {
  require_nonempty(xi);
  if (xi.dim() != ifs.dim()) throw DimensionMismatch(ifs.dim(), xi.dim());
  double q = 0.0;
  if (options.contraction_factor) {
    q = *options.contraction_factor;
    if (q >= 1.0) throw NotContracting("family", q);
  } else {
    const MetricGrid grid(ifs.dim(), options.lipschitz_resolution > 0 ? options.lipschitz_resolution
                                                                      : MetricGrid::default_resolution(ifs.dim()));
    for (const auto& m : ifs.maps()) {
      const double lq = lipschitz_estimate(m, grid);
      if (lq >= 1.0) throw NotContracting(m.label(), lq);
      q = std::max(q, lq);
    }
  }
  std::vector<SpacePoint> y;
  y.reserve(xi.points.size());
  y.push_back(xi.points.front());
  for (std::size_t j = 0; j + 1 < xi.points.size(); ++j) {
    const int s = xi.sigma(xi.first + static_cast<std::int64_t>(j));
    y.push_back(ifs[static_cast<std::size_t>(s)](y.back()));
  }
  const double delta = max_link_residual(ifs, xi.points, xi.first, xi.sigma);
  ShadowResult out;
  out.sup_dist = window_sup_dist(xi, y, 0);
  out.solver = "contraction";
  out.residual = max_link_residual(ifs, y, xi.first, xi.sigma);
  out.bound = delta / (1.0 - q);
  out.shadow = exact_record(std::move(y), xi);
  return out;
}

HyperbolicSplitting::HyperbolicSplitting(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw NotHyperbolic("matrix must be square");
  Eigen::EigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw NotHyperbolic("eigen decomposition failed");
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vectors_);
  const auto sv = svd.singularValues();
  if (sv.minCoeff() <= 1e-10 * sv.maxCoeff()) throw NotHyperbolic("matrix is not diagonalizable");
  inverse_vectors_ = vectors_.inverse();
  const int n = static_cast<int>(values_.size());
  stable_.assign(static_cast<std::size_t>(n), false);
  stable_modulus_ = 0.0;
  unstable_modulus_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double r = std::abs(values_[i]);
    if (std::abs(r - 1.0) <= 1e-9) {
      throw NotHyperbolic("eigenvalue of modulus 1 (" + format_number(values_[i].real()) + "+" +
                          format_number(values_[i].imag()) + "i)");
    }
    if (r < 1.0) {
      stable_[static_cast<std::size_t>(i)] = true;
      has_stable_ = true;
      stable_modulus_ = std::max(stable_modulus_, r);
    } else {
      has_unstable_ = true;
      unstable_modulus_ = std::min(unstable_modulus_, r);
    }
  }
}

std::pair<Vector, Vector> HyperbolicSplitting::split(const Vector& v) const {
  const Eigen::VectorXcd coeff = inverse_vectors_ * v.cast<std::complex<double>>();
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(coeff.size());
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(coeff.size());
  for (Eigen::Index i = 0; i < coeff.size(); ++i) {
    if (stable_[static_cast<std::size_t>(i)]) {
      s[i] = coeff[i];
    } else {
      u[i] = coeff[i];
    }
  }
  return {(vectors_ * s).real(), (vectors_ * u).real()};
}

double HyperbolicSplitting::bound_factor() const {
  double f = 0.0;
  if (has_stable_) f += 1.0 / (1.0 - stable_modulus_);
  if (has_unstable_) f += 1.0 / (unstable_modulus_ - 1.0);
  return f;
}

ShadowResult shadow_linear_hyperbolic(const SmoothMap& a, const ChainRecord& xi) {
  require_nonempty(xi);
  if (xi.dim() != a.dim()) throw DimensionMismatch(a.dim(), xi.dim());
  if (!a.linear_part()) throw NotHyperbolic("'" + a.label() + "' is not a toral automorphism");
  const HyperbolicSplitting split(*a.linear_part());
  const std::size_t n = xi.points.size();
  const auto& values = split.eigenvalues();
  const auto& vinv = split.inverse_vectors();
  const int d = a.dim();

  // modal link errors a_k = V^-1 e_k with e_k = x_{k+1} - f(x_k)
  std::vector<Eigen::VectorXcd> err(n > 0 ? n - 1 : 0);
  double delta = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vector e = lift_displacement(a(xi.points[k]), xi.points[k + 1]);
    delta = std::max(delta, e.norm());
    err[k] = vinv * e.cast<std::complex<double>>();
  }
  // corrections satisfy c_{k+1} = A c_k - e_k
  std::vector<Eigen::VectorXcd> c(n, Eigen::VectorXcd::Zero(d));
  for (int i = 0; i < d; ++i) {
    if (split.is_stable_mode(i)) {
      for (std::size_t k = 0; k + 1 < n; ++k) c[k + 1][i] = values[i] * c[k][i] - err[k][i];
    } else {
      for (std::size_t k = n - 1; k-- > 0;) c[k][i] = (c[k + 1][i] + err[k][i]) / values[i];
    }
  }
  std::vector<SpacePoint> y;
  y.reserve(n);
  for (std::size_t k = 0; k < n; ++k) y.push_back(xi.points[k].shifted((split.eigenvectors() * c[k]).real()));

  ShadowResult out;
  out.sup_dist = window_sup_dist(xi, y, 0);
  out.solver = "linear-hyperbolic";
  double res = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) res = std::max(res, dist(a(y[k]), y[k + 1]));
  out.residual = res;
  out.bound = delta * split.bound_factor();
  out.shadow = exact_record(std::move(y), xi);
  return out;
}

RefineResult refine_chain(const IFS& ifs, std::vector<SpacePoint> init, std::int64_t first,
                          const SymbolSequence& sigma, double tol, int max_iter) {
  RefineResult out;
  const std::size_t n = init.size();
  if (n == 0) throw Error("chain has no points");
  if (!ifs.all_have_jacobians()) throw Error("Newton refinement needs Jacobians for every map");
  const int d = ifs.dim();
  out.points = std::move(init);
  if (n == 1) return out;
  const std::size_t links = n - 1;

  auto residuals = [&](const std::vector<SpacePoint>& pts, std::vector<Vector>& r) {
    double sq = 0.0;
    double mx = 0.0;
    for (std::size_t j = 0; j < links; ++j) {
      const auto& f = ifs[static_cast<std::size_t>(sigma(first + static_cast<std::int64_t>(j)))];
      r[j] = lift_displacement(f(pts[j]), pts[j + 1]);
      const double nn = r[j].squaredNorm();
      sq += nn;
      mx = std::max(mx, std::sqrt(nn));
    }
    return std::make_pair(sq, mx);
  };

  std::vector<Vector> r(links);
  auto [sq, mx] = residuals(out.points, r);
  double best = mx;
  const Matrix eye = Matrix::Identity(d, d);
  std::vector<Matrix> jac(links);
  std::vector<Matrix> diag(links);
  std::vector<Matrix> upper(links > 0 ? links - 1 : 0);
  std::vector<Matrix> lower(links > 0 ? links - 1 : 0);
  std::vector<Vector> rhs(links);
  for (int iter = 0;; ++iter) {
    out.iterations = iter;
    out.residual = mx;
    if (mx <= tol) return out;
    if (iter >= max_iter) {
      throw ConvergenceError("Newton shadowing did not reach " + format_number(tol) + " in " +
                                 std::to_string(max_iter) + " iterations",
                             best, iter);
    }
    for (std::size_t j = 0; j < links; ++j) {
      const auto& f = ifs[static_cast<std::size_t>(sigma(first + static_cast<std::int64_t>(j)))];
      jac[j] = f.jacobian(out.points[j]);
      diag[j] = jac[j] * jac[j].transpose() + eye;
      rhs[j] = -r[j];
    }
    for (std::size_t j = 0; j + 1 < links; ++j) {
      upper[j] = -jac[j + 1].transpose();
      lower[j] = -jac[j + 1];
    }
    const std::vector<Vector> mu = block_thomas(diag, upper, lower, rhs);
    std::vector<Vector> step(n, Vector::Zero(d));
    for (std::size_t j = 0; j < n; ++j) {
      if (j >= 1) step[j] += mu[j - 1];
      if (j < links) step[j] -= jac[j].transpose() * mu[j];
    }
    double alpha = 1.0;
    bool accepted = false;
    std::vector<SpacePoint> trial(n);
    std::vector<Vector> rt(links);
    for (int halving = 0; halving < 30; ++halving) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = out.points[j].shifted(alpha * step[j]);
      const auto [tsq, tmx] = residuals(trial, rt);
      if (tsq < sq || tmx <= tol) {
        out.points.swap(trial);
        r.swap(rt);
        sq = tsq;
        mx = tmx;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    best = std::min(best, mx);
    if (!accepted) throw ConvergenceError("Newton line search stalled", best, iter + 1);
  }
}

ChainRecord pad_chain(const IFS& ifs, const ChainRecord& xi, int back, int ahead) {
  require_nonempty(xi);
  std::vector<SpacePoint> before;
  before.reserve(static_cast<std::size_t>(std::max(back, 0)));
  SpacePoint p = xi.points.front();
  for (int i = 1; i <= back; ++i) {
    const int s = xi.sigma(xi.first - i);
    p = invert_map(ifs[static_cast<std::size_t>(s)], p);
    before.push_back(p);
  }
  ChainRecord out;
  out.sigma = xi.sigma;
  out.delta = xi.delta;
  out.kind = xi.kind;
  out.first = xi.first - static_cast<std::int64_t>(before.size());
  out.points.assign(before.rbegin(), before.rend());
  out.points.insert(out.points.end(), xi.points.begin(), xi.points.end());
  p = xi.points.back();
  for (int i = 0; i < ahead; ++i) {
    const int s = xi.sigma(xi.last() + i);
    p = ifs[static_cast<std::size_t>(s)](p);
    out.points.push_back(p);
  }
  return out;
}

ShadowResult shadow_newton(const IFS& ifs, const ChainRecord& xi, const ShadowOptions& options) {
  require_nonempty(xi);
  if (xi.dim() != ifs.dim()) throw DimensionMismatch(ifs.dim(), xi.dim());
  xi.sigma.check_against(ifs);
  const int pad = std::max(options.padding, 0);
  const int back = ifs.all_invertible() && ifs.all_torus_maps() ? pad : 0;
  const ChainRecord ext = pad_chain(ifs, xi, back, pad);
  RefineResult refined = refine_chain(ifs, ext.points, ext.first, xi.sigma, options.tol, options.max_iter);
  const auto offset = static_cast<std::size_t>(xi.first - ext.first);
  std::vector<SpacePoint> y(refined.points.begin() + static_cast<std::ptrdiff_t>(offset),
                            refined.points.begin() + static_cast<std::ptrdiff_t>(offset + xi.points.size()));
  ShadowResult out;
  out.sup_dist = window_sup_dist(xi, y, 0);
  out.solver = "newton";
  out.iterations = refined.iterations;
  out.residual = max_link_residual(ifs, y, xi.first, xi.sigma);
  out.shadow = exact_record(std::move(y), xi);
  return out;
}

ShadowResult shadow_auto(const IFS& ifs, const ChainRecord& xi, const ShadowOptions& options) {
  switch (options.solver) {
    case SolverChoice::kContraction:
      return shadow_contraction(ifs, xi, options);
    case SolverChoice::kNewton:
      return shadow_newton(ifs, xi, options);
    case SolverChoice::kLinearHyperbolic: {
      require_nonempty(xi);
      const int s = xi.sigma(xi.first);
      for (std::int64_t k = xi.first; k < xi.last(); ++k) {
        if (xi.sigma(k) != s) throw NotHyperbolic("linear-hyperbolic solver needs a single-map schedule");
      }
      xi.sigma.check_against(ifs);
      return shadow_linear_hyperbolic(ifs[static_cast<std::size_t>(s)], xi);
    }
    case SolverChoice::kAuto:
      break;
  }
  if (ifs.size() == 1 && ifs[0].linear_part()) {
    bool hyperbolic = true;
    try {
      HyperbolicSplitting split(*ifs[0].linear_part());
    } catch (const NotHyperbolic&) {
      hyperbolic = false;
    }
    if (hyperbolic) return shadow_linear_hyperbolic(ifs[0], xi);
  }
  const double q = options.contraction_factor ? *options.contraction_factor
                                              : contraction_factor(ifs, options.lipschitz_resolution);
  if (q < 1.0) {
    ShadowOptions o = options;
    o.contraction_factor = q;
    return shadow_contraction(ifs, xi, o);
  }
  return shadow_newton(ifs, xi, options);
}

ShadowVerdict verify_shadowing(const IFS& ifs, const ChainRecord& xi, const ChainRecord& y, double eps,
                               double tol) {
  require_nonempty(xi);
  require_nonempty(y);
  if (xi.dim() != y.dim()) throw DimensionMismatch(xi.dim(), y.dim());
  ShadowVerdict v;
  const ChainVerdict chain = validate_chain(ifs, y, tol);
  v.exact = chain.is_exact_chain;
  v.link_residual = chain.is_delta_chain_for;
  const std::int64_t lo = std::max(xi.first, y.first);
  const std::int64_t hi = std::min(xi.last(), y.last());
  if (lo > hi) throw Error("chains have no common index");
  for (std::int64_t k = lo; k <= hi; ++k) {
    const double dk = dist(xi.at(k), y.at(k));
    if (!v.worst_k || dk > v.sup_dist) {
      v.sup_dist = dk;
      v.worst_k = k;
    }
  }
  v.shadows = v.exact && v.sup_dist <= eps;
  return v;
}

FiniteShadowReport finite_shadow_probe(const IFS& ifs, const std::vector<ChainRecord>& windows, double eps,
                                       const ShadowOptions& options) {
  FiniteShadowReport report;
  ShadowOptions o = options;
  if (o.solver == SolverChoice::kAuto && !o.contraction_factor && !windows.empty()) {
    o.contraction_factor = contraction_factor(ifs, o.lipschitz_resolution);
  }
  for (const auto& w : windows) {
    FiniteWindowEntry e;
    e.m = w.points.empty() ? 0 : w.points.size() - 1;
    try {
      e.delta = validate_chain(ifs, w).is_delta_chain_for;
      const ShadowResult r = shadow_auto(ifs, w, o);
      e.sup_dist = r.sup_dist;
      e.solver = r.solver;
      e.pass = r.sup_dist <= eps;
    } catch (const Error& err) {
      e.error = err.what();
      e.pass = false;
    }
    report.all_pass = report.all_pass && e.pass;
    report.windows.push_back(std::move(e));
  }
  return report;
}

const char* to_string(UniquenessOutcome outcome) {
  switch (outcome) {
    case UniquenessOutcome::kUnique:
      return "unique";
    case UniquenessOutcome::kNotUnique:
      return "not-unique";
    case UniquenessOutcome::kInconclusive:
      break;
  }
  return "inconclusive";
}

UniquenessVerdict check_uniqueness(const IFS& ifs, const ChainRecord& xi, double eps, int trials,
                                   const UniquenessOptions& options) {
  require_nonempty(xi);
  if (trials < 1) throw Error("uniqueness check needs at least one trial");
  if (!(eps > 0.0)) throw Error("epsilon must be positive");
  const int pad = std::max(options.padding, 0);
  const int back = ifs.all_invertible() && ifs.all_torus_maps() ? pad : 0;
  const ChainRecord ext = pad_chain(ifs, xi, back, pad);
  const auto offset = static_cast<std::size_t>(xi.first - ext.first);
  const int d = ifs.dim();

  UniquenessVerdict v;
  v.trials = trials;
  std::vector<std::vector<SpacePoint>> shadows;
  Rng rng(options.seed);
  for (int t = 0; t < trials; ++t) {
    std::vector<SpacePoint> init = ext.points;
    if (t > 0) {
      const Vector w = rng.in_ball(d, 0.5 * eps);
      for (auto& p : init) p = p.shifted(w);
    }
    RefineResult r;
    try {
      r = refine_chain(ifs, std::move(init), ext.first, xi.sigma, options.tol, options.max_iter);
    } catch (const ConvergenceError&) {
      ++v.failed_solves;
      continue;
    }
    bool within = true;
    for (std::size_t k = 0; k < ext.points.size() && within; ++k) within = dist(ext.points[k], r.points[k]) < eps;
    if (within) shadows.push_back(std::move(r.points));
  }
  v.shadowing_candidates = static_cast<int>(shadows.size());
  for (std::size_t a = 0; a < shadows.size(); ++a) {
    for (std::size_t b = a + 1; b < shadows.size(); ++b) {
      for (std::size_t k = 0; k < xi.points.size(); ++k) {
        v.max_deviation = std::max(v.max_deviation, dist(shadows[a][offset + k], shadows[b][offset + k]));
      }
    }
  }
  if (shadows.size() < 2) {
    v.outcome = UniquenessOutcome::kInconclusive;
  } else {
    v.outcome = v.max_deviation <= options.agreement ? UniquenessOutcome::kUnique : UniquenessOutcome::kNotUnique;
  }
  return v;
}

}  // namespace ifsshadow
