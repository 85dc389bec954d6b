#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ifsshadow/ifs.hpp"

namespace ifsshadow {

struct ShadowResult {
  ChainRecord shadow;       ///< exact chain on the window of the input
  double sup_dist = 0.0;    ///< max_k dist(x_k, y_k) over the window
  std::string solver;       ///< "contraction" | "linear-hyperbolic" | "newton"
  int iterations = 0;
  double residual = 0.0;    ///< max link residual of the returned chain
  /// A-priori sup_dist bound when the solver has one (contraction, hyperbolic).
  std::optional<double> bound;
};

enum class SolverChoice { kAuto, kContraction, kLinearHyperbolic, kNewton };
SolverChoice parse_solver_choice(const std::string& name);

struct ShadowOptions {
  SolverChoice solver = SolverChoice::kAuto;
  /// Newton: stop when the max link residual is at most tol.
  double tol = 1e-10;
  int max_iter = 50;
  /// Newton: exact-orbit points added on each side of the window before the
  /// solve (backward only when the maps are invertible). The minimum-norm
  /// correction on the padded window approximates the bi-infinite shadow, so
  /// the window result does not depend on where the chain happens to end.
  int padding = 32;
  /// Known contraction factor; skips the grid Lipschitz check.
  std::optional<double> contraction_factor;
  /// Grid resolution of the Lipschitz check (0 = MetricGrid default).
  int lipschitz_resolution = 0;
};

/// Largest grid Lipschitz estimate over the maps of `ifs`.
double contraction_factor(const IFS& ifs, int resolution = 0);

/// Exact chain y with y_first = x_first and y_{k+1} = f_{sigma(k)}(y_k).
/// sup_dist <= delta / (1 - q) with delta the measured link slack and q the
/// largest Lipschitz estimate. Throws NotContracting when some q_lambda >= 1.
ShadowResult shadow_contraction(const IFS& ifs, const ChainRecord& xi, const ShadowOptions& options = {});

/// Stable/unstable eigen-splitting of a hyperbolic toral automorphism.
class HyperbolicSplitting {
 public:
  /// Throws NotHyperbolic if some eigenvalue has modulus 1 (within 1e-9) or
  /// the matrix is not diagonalizable.
  explicit HyperbolicSplitting(const Matrix& a);

  /// (stable part, unstable part) of v; they sum to v.
  std::pair<Vector, Vector> split(const Vector& v) const;
  /// Largest stable and smallest unstable eigenvalue modulus.
  double stable_modulus() const { return stable_modulus_; }
  double unstable_modulus() const { return unstable_modulus_; }
  /// 1/(1 - lambda_s) + 1/(lambda_u - 1), each term present only when that
  /// subspace is nontrivial.
  double bound_factor() const;

  const Eigen::VectorXcd& eigenvalues() const { return values_; }
  const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }
  const Eigen::MatrixXcd& inverse_vectors() const { return inverse_vectors_; }
  bool is_stable_mode(int i) const { return stable_[static_cast<std::size_t>(i)]; }

 private:
  Eigen::VectorXcd values_;
  Eigen::MatrixXcd vectors_;
  Eigen::MatrixXcd inverse_vectors_;
  std::vector<bool> stable_;
  double stable_modulus_ = 0.0;
  double unstable_modulus_ = 0.0;
  bool has_stable_ = false;
  bool has_unstable_ = false;
};

/// Shadow of a chain of the single map `a` (whose linear part must be a
/// hyperbolic integer matrix). Link errors are split in the eigenbasis; stable
/// corrections are summed forward from zero at the first index and unstable
/// corrections backward from zero at the last index.
ShadowResult shadow_linear_hyperbolic(const SmoothMap& a, const ChainRecord& xi);

/// Gauss-Newton on the stacked lifted residuals
/// R_k(y) = y_{k+1} - f_{sigma(k)}(y_k), started at xi. Each step is the
/// minimum-norm solution of the linearized system, computed through the
/// block-tridiagonal normal matrix J J^T in O(len). Throws ConvergenceError
/// after max_iter iterations.
ShadowResult shadow_newton(const IFS& ifs, const ChainRecord& xi, const ShadowOptions& options = {});

struct RefineResult {
  std::vector<SpacePoint> points;
  int iterations = 0;
  double residual = 0.0;
};

/// Newton refinement of arbitrary initial points (index `first`) to an exact
/// chain. Building block of shadow_newton and of the uniqueness test.
RefineResult refine_chain(const IFS& ifs, std::vector<SpacePoint> init, std::int64_t first,
                          const SymbolSequence& sigma, double tol, int max_iter);

/// xi extended by exact orbit points: `back` before (through inverses, when
/// available) and `ahead` after. Returns the extended chain.
ChainRecord pad_chain(const IFS& ifs, const ChainRecord& xi, int back, int ahead);

/// Dispatches on options.solver. Auto picks linear-hyperbolic for a single
/// hyperbolic automorphism, contraction when every map contracts, Newton
/// otherwise.
ShadowResult shadow_auto(const IFS& ifs, const ChainRecord& xi, const ShadowOptions& options = {});

struct ShadowVerdict {
  bool shadows = false;       ///< exact AND sup_dist <= eps
  bool exact = false;
  double sup_dist = 0.0;
  double link_residual = 0.0;
  std::optional<std::int64_t> worst_k;  ///< index of the largest dist(x_k, y_k)
};

/// Checks that y is an exact chain (at tol) that stays within eps of xi on
/// their common index window.
ShadowVerdict verify_shadowing(const IFS& ifs, const ChainRecord& xi, const ChainRecord& y, double eps,
                               double tol = 1e-9);

struct FiniteWindowEntry {
  double delta = 0.0;        ///< measured link slack of the window
  std::size_t m = 0;         ///< last relative index (points - 1)
  double sup_dist = 0.0;
  std::string solver;
  bool pass = false;
  std::string error;         ///< solver failure, if any
};

struct FiniteShadowReport {
  std::vector<FiniteWindowEntry> windows;
  bool all_pass = true;
};

/// Shadows each finite window with the applicable solver and checks sup_dist
/// <= eps. Solver failures are recorded per window and count as failures.
FiniteShadowReport finite_shadow_probe(const IFS& ifs, const std::vector<ChainRecord>& windows, double eps,
                                       const ShadowOptions& options = {});

enum class UniquenessOutcome { kUnique, kNotUnique, kInconclusive };
const char* to_string(UniquenessOutcome outcome);

struct UniquenessVerdict {
  UniquenessOutcome outcome = UniquenessOutcome::kInconclusive;
  int trials = 0;
  int shadowing_candidates = 0;   ///< candidates within eps on the padded window
  int failed_solves = 0;
  double max_deviation = 0.0;     ///< largest pairwise distance on xi's window
};

struct UniquenessOptions {
  int padding = 32;
  double tol = 1e-12;
  int max_iter = 50;
  double agreement = 1e-8;
  std::uint64_t seed = 0;
};

/// Multi-start test of shadowing uniqueness. xi is padded by exact orbit
/// points; candidate 0 starts from the padded xi, the others from it shifted
/// by a seeded random vector of length <= eps/2. Each start is refined to an
/// exact chain; candidates within eps of the padded xi everywhere are compared
/// on xi's own window. Unique iff they all agree within `agreement`.
UniquenessVerdict check_uniqueness(const IFS& ifs, const ChainRecord& xi, double eps, int trials,
                                   const UniquenessOptions& options = {});

}  // namespace ifsshadow
