#include "ifsshadow/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ifsshadow/errors.hpp"
#include "ifsshadow/rng.hpp"

namespace ifsshadow {

IFS::IFS(std::vector<SmoothMap> maps) : maps_(std::move(maps)), dim_(0) {
  if (maps_.empty()) throw Error("an IFS needs at least one map");
  dim_ = maps_.front().dim();
  for (const auto& m : maps_) {
    if (m.dim() != dim_) throw DimensionMismatch(dim_, m.dim());
  }
}

bool IFS::all_invertible() const {
  return std::all_of(maps_.begin(), maps_.end(), [](const SmoothMap& m) { return m.invertible(); });
}

bool IFS::all_have_jacobians() const {
  return std::all_of(maps_.begin(), maps_.end(), [](const SmoothMap& m) { return m.has_jacobian(); });
}

bool IFS::all_torus_maps() const {
  return std::all_of(maps_.begin(), maps_.end(),
                     [](const SmoothMap& m) { return m.domain() == Domain::kTorus; });
}

bool same_family(const IFS& f, const IFS& g) {
  if (f.size() != g.size() || f.dim() != g.dim()) return false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].label() != g[i].label()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

SymbolSequence::SymbolSequence(std::vector<int> window, std::int64_t first, Extension ext, int fill)
    : window_(std::move(window)), first_(first), extension_(ext), fill_(fill) {
  for (int s : window_) {
    if (s < 0) throw Error("symbols must be nonnegative");
  }
  if (fill_ < 0) throw Error("symbols must be nonnegative");
  if (extension_ == Extension::kPeriodic && window_.empty()) {
    throw Error("a periodic symbol sequence needs a nonempty window");
  }
}

SymbolSequence SymbolSequence::constant(int symbol) { return {{}, 0, Extension::kConstant, symbol}; }

SymbolSequence SymbolSequence::periodic(std::vector<int> window, std::int64_t first) {
  return {std::move(window), first, Extension::kPeriodic, 0};
}

SymbolSequence SymbolSequence::padded(std::vector<int> window, int fill, std::int64_t first) {
  return {std::move(window), first, Extension::kConstant, fill};
}

SymbolSequence SymbolSequence::random(int n_symbols, std::size_t length, std::uint64_t seed,
                                      std::int64_t first) {
  if (n_symbols < 1) throw Error("random symbol sequence needs at least one symbol");
  if (length == 0) throw Error("random symbol sequence needs a nonempty window");
  Rng rng(seed);
  std::vector<int> w(length);
  for (auto& s : w) s = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_symbols)));
  return periodic(std::move(w), first);
}

int SymbolSequence::operator()(std::int64_t k) const {
  const auto n = static_cast<std::int64_t>(window_.size());
  const std::int64_t rel = k - first_;
  if (rel >= 0 && rel < n) return window_[static_cast<std::size_t>(rel)];
  if (extension_ == Extension::kConstant) return fill_;
  const std::int64_t r = ((rel % n) + n) % n;
  return window_[static_cast<std::size_t>(r)];
}

void SymbolSequence::check_against(const IFS& ifs) const {
  const auto n = static_cast<int>(ifs.size());
  for (int s : window_) {
    if (s >= n) throw Error("symbol " + std::to_string(s) + " out of range for an IFS of size " + std::to_string(n));
  }
  if (extension_ == Extension::kConstant && fill_ >= n) {
    throw Error("extension symbol " + std::to_string(fill_) + " out of range for an IFS of size " + std::to_string(n));
  }
}

std::string SymbolSequence::describe() const {
  std::ostringstream os;
  auto list = [&] {
    os << '[';
    for (std::size_t i = 0; i < window_.size(); ++i) os << (i ? "," : "") << window_[i];
    os << "]@" << first_;
  };
  if (extension_ == Extension::kPeriodic) {
    os << "periodic:";
    list();
  } else if (window_.empty()) {
    os << "constant:" << fill_;
  } else {
    os << "padded:";
    list();
    os << ",fill=" << fill_;
  }
  return os.str();
}

const char* to_string(ChainKind kind) {
  switch (kind) {
    case ChainKind::kExactChain: return "exact-chain";
    case ChainKind::kDeltaChain: return "delta-chain";
    case ChainKind::kShadowCandidate: return "shadow-candidate";
  }
  return "?";
}

// ---------------------------------------------------------------------------

SpacePoint orbit_map(const IFS& ifs, const SymbolSequence& sigma, std::int64_t k, const SpacePoint& x) {
  SpacePoint y = x;
  if (k >= 0) {
    for (std::int64_t j = 0; j < k; ++j) y = ifs[static_cast<std::size_t>(sigma(j))](y);
    return y;
  }
  for (std::int64_t j = -1; j >= k; --j) {
    const SmoothMap& f = ifs[static_cast<std::size_t>(sigma(j))];
    if (!f.invertible()) throw NotInvertible("negative orbit index needs invertible map '" + f.label() + "'");
    y = invert_map(f, y);
  }
  return y;
}

ChainRecord orbit_chain(const IFS& ifs, const SymbolSequence& sigma, const SpacePoint& x,
                        std::size_t len, std::int64_t first) {
  if (len == 0) throw Error("chain length must be positive");
  ChainRecord c;
  c.sigma = sigma;
  c.first = first;
  c.kind = ChainKind::kExactChain;
  c.delta = 0.0;
  c.points.reserve(len);
  c.points.push_back(x);
  for (std::size_t i = 1; i < len; ++i) {
    const std::int64_t k = first + static_cast<std::int64_t>(i) - 1;
    c.points.push_back(ifs[static_cast<std::size_t>(sigma(k))](c.points.back()));
  }
  return c;
}

std::vector<double> link_residuals(const IFS& ifs, const ChainRecord& chain) {
  std::vector<double> r;
  if (chain.points.size() < 2) return r;
  r.reserve(chain.points.size() - 1);
  for (std::size_t i = 0; i + 1 < chain.points.size(); ++i) {
    const std::int64_t k = chain.first + static_cast<std::int64_t>(i);
    const int s = chain.sigma(k);
    if (s < 0 || static_cast<std::size_t>(s) >= ifs.size()) {
      throw Error("symbol " + std::to_string(s) + " at k=" + std::to_string(k) + " out of range");
    }
    r.push_back(dist(chain.points[i + 1], ifs[static_cast<std::size_t>(s)](chain.points[i])));
  }
  return r;
}

ChainVerdict validate_chain(const IFS& ifs, const ChainRecord& chain, double tol) {
  ChainVerdict v;
  const auto r = link_residuals(ifs, chain);
  if (r.empty()) return v;
  const auto it = std::max_element(r.begin(), r.end());
  v.is_delta_chain_for = *it;
  v.worst_k = chain.first + static_cast<std::int64_t>(it - r.begin());
  v.is_exact_chain = *it <= tol;
  return v;
}

NoiseModel parse_noise_model(const std::string& name) {
  if (name == "uniform" || name == "uniform-ball") return NoiseModel::kUniformBall;
  if (name == "rounding" || name == "fixed-decimal") return NoiseModel::kRounding;
  throw Error("unknown noise model '" + name + "'");
}

const char* to_string(NoiseModel model) {
  return model == NoiseModel::kUniformBall ? "uniform-ball" : "rounding";
}

namespace {

SpacePoint round_point(const SpacePoint& p, int decimals, bool keep_in_cube) {
  const double scale = std::pow(10.0, decimals);
  Vector c(p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    double r = std::round(p[i] * scale) / scale;
    if (r >= 1.0) r = keep_in_cube ? (scale - 1.0) / scale : 0.0;
    c[i] = r;
  }
  return SpacePoint(std::move(c));
}

bool inside_cube(const Vector& v) { return (v.array() >= 0.0).all() && (v.array() < 1.0).all(); }

}  // namespace

ChainRecord gen_pseudo_orbit(const IFS& ifs, const SymbolSequence& sigma, const SpacePoint& x0,
                             double delta, std::size_t len, std::uint64_t seed,
                             const PseudoOrbitOptions& options) {
  if (!(delta >= 0.0)) throw Error("delta must be nonnegative");
  if (len == 0) throw Error("chain length must be at least 1");
  if (x0.dim() != ifs.dim()) throw DimensionMismatch(ifs.dim(), x0.dim());
  sigma.check_against(ifs);
  const bool cube = !ifs.all_torus_maps();
  const int d = ifs.dim();

  ChainRecord c;
  c.sigma = sigma;
  c.first = 0;
  c.kind = ChainKind::kDeltaChain;
  c.points.reserve(len);
  Rng rng(seed);

  if (options.noise == NoiseModel::kRounding) {
    if (options.decimals < 0 || options.decimals > 15) throw Error("decimals must lie in [0, 15]");
    const double unit = std::pow(10.0, -options.decimals);
    c.delta = (cube ? unit : 0.5 * unit) * std::sqrt(static_cast<double>(d));
    c.points.push_back(round_point(x0, options.decimals, cube));
    for (std::size_t i = 1; i < len; ++i) {
      const auto& f = ifs[static_cast<std::size_t>(sigma(static_cast<std::int64_t>(i) - 1))];
      c.points.push_back(round_point(f(c.points.back()), options.decimals, cube));
    }
    return c;
  }

  c.delta = delta;
  c.points.push_back(x0);
  for (std::size_t i = 1; i < len; ++i) {
    const auto& f = ifs[static_cast<std::size_t>(sigma(static_cast<std::int64_t>(i) - 1))];
    const SpacePoint image = f(c.points.back());
    if (delta == 0.0) {
      c.points.push_back(image);
      continue;
    }
    Vector e = rng.in_ball(d, delta);
    if (cube) {
      int attempts = 0;
      while (!inside_cube(image.coords() + e)) {
        if (++attempts > 10000) throw Error("could not keep the pseudo-orbit inside the unit cube");
        e = rng.in_ball(d, delta);
      }
    }
    c.points.push_back(image.shifted(e));
  }
  return c;
}

}  // namespace ifsshadow
