#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ifsshadow/smooth_map.hpp"
#include "ifsshadow/space.hpp"

namespace ifsshadow {

/// Finite indexed family {f_0, ..., f_{N-1}} of self-maps of T^d.
/// Symbols are 0-based indices into maps().
class IFS {
 public:
  explicit IFS(std::vector<SmoothMap> maps);

  int dim() const { return dim_; }
  std::size_t size() const { return maps_.size(); }
  const SmoothMap& operator[](std::size_t i) const { return maps_.at(i); }
  const std::vector<SmoothMap>& maps() const { return maps_; }

  bool all_invertible() const;
  bool all_have_jacobians() const;
  /// True when every map descends to the torus (no unit-cube formulas).
  bool all_torus_maps() const;

 private:
  std::vector<SmoothMap> maps_;
  int dim_;
};

/// Same maps in the same order, compared by canonical label.
bool same_family(const IFS& f, const IFS& g);

/// A two-sided symbol schedule: explicit symbols on [first, first + len) and
/// an extension rule elsewhere.
class SymbolSequence {
 public:
  enum class Extension { kConstant, kPeriodic };

  /// Constant schedule lambda_k = symbol for all k.
  static SymbolSequence constant(int symbol);
  /// window repeated with period window.size(), anchored at `first`.
  static SymbolSequence periodic(std::vector<int> window, std::int64_t first = 0);
  /// window on [first, first + len), constant `fill` outside.
  static SymbolSequence padded(std::vector<int> window, int fill, std::int64_t first = 0);
  /// Uniform random window over {0..n_symbols-1}, periodic outside.
  static SymbolSequence random(int n_symbols, std::size_t length, std::uint64_t seed,
                               std::int64_t first = 0);

  int operator()(std::int64_t k) const;

  const std::vector<int>& window() const { return window_; }
  std::int64_t first() const { return first_; }
  Extension extension() const { return extension_; }
  int fill() const { return fill_; }

  /// Throws unless every symbol this schedule can produce indexes into `ifs`.
  void check_against(const IFS& ifs) const;
  /// Short human-readable description ("constant:0", "periodic:[0,1]@0", ...).
  std::string describe() const;

 private:
  SymbolSequence(std::vector<int> window, std::int64_t first, Extension ext, int fill);
  std::vector<int> window_;
  std::int64_t first_ = 0;
  Extension extension_ = Extension::kConstant;
  int fill_ = 0;
};

enum class ChainKind { kExactChain, kDeltaChain, kShadowCandidate };
const char* to_string(ChainKind kind);

/// Finite window of points x_k, k = first .. first + points.size() - 1.
/// Link k joins x_k to x_{k+1} through f_{sigma(k)}.
struct ChainRecord {
  std::vector<SpacePoint> points;
  SymbolSequence sigma = SymbolSequence::constant(0);
  double delta = 0.0;
  ChainKind kind = ChainKind::kDeltaChain;
  std::int64_t first = 0;

  std::int64_t last() const { return first + static_cast<std::int64_t>(points.size()) - 1; }
  const SpacePoint& at(std::int64_t k) const { return points.at(static_cast<std::size_t>(k - first)); }
  int dim() const { return points.empty() ? 0 : points.front().dim(); }
};

/// O(k)(x): identity at k = 0, f_{sigma(k-1)} o ... o f_{sigma(0)} for k > 0
/// and f_{sigma(k)}^{-1} o ... o f_{sigma(-1)}^{-1} for k < 0.
/// O(k+1) = f_{sigma(k)} o O(k) for every integer k.
SpacePoint orbit_map(const IFS& ifs, const SymbolSequence& sigma, std::int64_t k, const SpacePoint& x);

/// Exact orbit chain x_first .. x_{first+len-1} through x at index `first`.
ChainRecord orbit_chain(const IFS& ifs, const SymbolSequence& sigma, const SpacePoint& x,
                        std::size_t len, std::int64_t first = 0);

struct ChainVerdict {
  bool is_exact_chain = true;
  /// max_k dist(x_{k+1}, f_{sigma(k)}(x_k)); 0 for a single point.
  double is_delta_chain_for = 0.0;
  /// Index k of the worst link; empty when there are no links.
  std::optional<std::int64_t> worst_k;
};

ChainVerdict validate_chain(const IFS& ifs, const ChainRecord& chain, double tol = 1e-9);

/// Per-link residuals dist(x_{k+1}, f_{sigma(k)}(x_k)).
std::vector<double> link_residuals(const IFS& ifs, const ChainRecord& chain);

enum class NoiseModel { kUniformBall, kRounding };
NoiseModel parse_noise_model(const std::string& name);
const char* to_string(NoiseModel model);

struct PseudoOrbitOptions {
  NoiseModel noise = NoiseModel::kUniformBall;
  /// Decimal places kept by the rounding model.
  int decimals = 2;
};

/// delta-chain x_{k+1} = f_{sigma(k)}(x_k) + e_k of `len` points starting at
/// x0 (index 0). Uniform-ball noise draws e_k uniformly from the delta-ball;
/// for unit-cube maps the draw is rejected until the perturbed point stays in
/// the cube. Rounding noise rounds every coordinate (x0 included) to
/// `decimals` places. Deterministic in seed.
ChainRecord gen_pseudo_orbit(const IFS& ifs, const SymbolSequence& sigma, const SpacePoint& x0,
                             double delta, std::size_t len, std::uint64_t seed,
                             const PseudoOrbitOptions& options = {});

}  // namespace ifsshadow
