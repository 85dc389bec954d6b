#pragma once
// Independent reference computations used only by the tests. They share
// nothing with the library beyond its point and chain containers.

#include <algorithm>
#include <array>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ifsshadow/ifs.hpp"

namespace oracle {

inline double wrap(double x) { return x - std::floor(x); }

inline double residue(double d) {
  d = d - std::floor(d);
  return d > 0.5 ? d - 1.0 : d;
}

inline double torus_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::fabs(a[i] - b[i]);
    d = d - std::floor(d);
    d = std::min(d, 1.0 - d);
    s += d * d;
  }
  return std::sqrt(s);
}

inline std::vector<double> coords(const ifsshadow::SpacePoint& p) {
  std::vector<double> v(static_cast<std::size_t>(p.dim()));
  for (int i = 0; i < p.dim(); ++i) v[static_cast<std::size_t>(i)] = p[i];
  return v;
}

template <class P>
  requires std::same_as<P, ifsshadow::SpacePoint>
double torus_dist(const P& a, const P& b) {
  return torus_dist(coords(a), coords(b));
}

// Golden-ratio eigen-data of [[2,1],[1,1]]: roots of t^2 - 3t + 1.
inline double cat_unstable() { return (3.0 + std::sqrt(5.0)) / 2.0; }
inline double cat_stable() { return (3.0 - std::sqrt(5.0)) / 2.0; }
inline double cat_bound_factor() { return 1.0 / (1.0 - cat_stable()) + 1.0 / (cat_unstable() - 1.0); }

// Unit eigenvectors, orthogonal because the matrix is symmetric.
inline std::array<double, 2> cat_unstable_dir() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double n = std::sqrt(phi * phi + 1.0);
  return {phi / n, 1.0 / n};
}
inline std::array<double, 2> cat_stable_dir() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double n = std::sqrt(phi * phi + 1.0);
  return {-1.0 / n, phi / n};
}

inline std::array<double, 2> cat_step(const std::array<double, 2>& p) {
  return {wrap(2.0 * p[0] + p[1]), wrap(p[0] + p[1])};
}

// Series shadow of a cat-map chain: corrections c with c_{k+1} = A c_k - e_k,
// stable part summed forward from 0, unstable part backward from 0.
inline std::vector<std::array<double, 2>> cat_series_shadow(const ifsshadow::ChainRecord& xi) {
  const std::size_t n = xi.points.size();
  const auto su = cat_unstable_dir();
  const auto ss = cat_stable_dir();
  std::vector<double> es(n, 0.0), eu(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto img = cat_step({xi.points[k][0], xi.points[k][1]});
    const double e0 = residue(xi.points[k + 1][0] - img[0]);
    const double e1 = residue(xi.points[k + 1][1] - img[1]);
    es[k] = e0 * ss[0] + e1 * ss[1];
    eu[k] = e0 * su[0] + e1 * su[1];
  }
  std::vector<double> s(n, 0.0), u(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) s[k + 1] = cat_stable() * s[k] - es[k];
  for (std::size_t k = n - 1; k-- > 0;) u[k] = (u[k + 1] + eu[k]) / cat_unstable();
  std::vector<std::array<double, 2>> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = {wrap(xi.points[k][0] + s[k] * ss[0] + u[k] * su[0]), wrap(xi.points[k][1] + s[k] * ss[1] + u[k] * su[1])};
  }
  return y;
}

// Minimum-norm correction of a cat-map chain from a dense complete
// orthogonal decomposition of the full link Jacobian.
inline std::vector<std::array<double, 2>> cat_dense_min_norm_shadow(const ifsshadow::ChainRecord& xi) {
  const auto n = static_cast<Eigen::Index>(xi.points.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * (n - 1), 2 * n);
  Eigen::VectorXd r(2 * (n - 1));
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    j(2 * k, 2 * k) = -2.0;
    j(2 * k, 2 * k + 1) = -1.0;
    j(2 * k + 1, 2 * k) = -1.0;
    j(2 * k + 1, 2 * k + 1) = -1.0;
    j(2 * k, 2 * k + 2) = 1.0;
    j(2 * k + 1, 2 * k + 3) = 1.0;
    const auto& p = xi.points[static_cast<std::size_t>(k)];
    const auto& q = xi.points[static_cast<std::size_t>(k + 1)];
    const auto img = cat_step({p[0], p[1]});
    r(2 * k) = residue(q[0] - img[0]);
    r(2 * k + 1) = residue(q[1] - img[1]);
  }
  const Eigen::VectorXd c = j.completeOrthogonalDecomposition().solve(-r);
  std::vector<std::array<double, 2>> y(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& p = xi.points[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(k)] = {wrap(p[0] + c(2 * k)), wrap(p[1] + c(2 * k + 1))};
  }
  return y;
}

// Exact orbit of x -> q x + b_s on [0, 1), iterated in plain arithmetic.
inline std::vector<double> contraction_orbit(double q, const std::vector<double>& offsets,
                                             const ifsshadow::SymbolSequence& sigma, double x0, std::size_t len,
                                             std::int64_t first = 0) {
  std::vector<double> out{x0};
  for (std::size_t k = 0; k + 1 < len; ++k) {
    const int s = sigma(first + static_cast<std::int64_t>(k));
    out.push_back(q * out.back() + offsets[static_cast<std::size_t>(s)]);
  }
  return out;
}

// Central differences on the lift; the image is unwrapped against f(p).
inline Eigen::MatrixXd central_difference(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                                          const std::vector<double>& p, double h = 1e-6) {
  const auto base = f(p);
  const auto d = p.size();
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < d; ++c) {
    auto plus = p;
    auto minus = p;
    plus[c] += h;
    minus[c] -= h;
    const auto fp = f(plus);
    const auto fm = f(minus);
    for (std::size_t r = 0; r < d; ++r) {
      const double up = residue(fp[r] - base[r]);
      const double dn = residue(fm[r] - base[r]);
      jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (up - dn) / (2.0 * h);
    }
  }
  return jac;
}

// The skew product on T^4 written out from its formula, with the
// closed-form inverse.
inline double torus_c(bool plus, double u, double v) {
  const double a = std::cos(M_PI * (plus ? u + v : u - v));
  return a * a;
}
inline double torus_f(double x) { return std::sin(2.0 * M_PI * x) / (2.0 * M_PI); }

inline std::vector<double> torus_forward(bool plus, const std::vector<double>& p) {
  const double c = torus_c(plus, p[2], p[3]);
  const double fx = torus_f(p[0]);
  return {wrap(2.0 * p[0] - c * fx + p[1]), wrap(p[0] - c * fx + p[1]), wrap(2.0 * p[2] + p[3]), wrap(p[2] + p[3])};
}

inline std::vector<double> torus_inverse(bool plus, const std::vector<double>& q) {
  const double u = wrap(q[2] - q[3]);
  const double v = wrap(-q[2] + 2.0 * q[3]);
  const double x = wrap(q[0] - q[1]);
  const double y = wrap(q[1] - x + torus_c(plus, u, v) * torus_f(x));
  return {x, y, u, v};
}

// Radical inverse in base b, the building block of the Halton sequence.
inline double radical_inverse(std::uint64_t i, std::uint64_t b) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(b);
    r += f * static_cast<double>(i % b);
    i /= b;
  }
  return r;
}

struct DenseCoverResult {
  bool pass = true;
  double worst = 0.0;
  std::size_t probes = 0;
};

// Ball-cover check for one center of the torus map: Halton points of the
// cube [-r, r]^4 kept when inside the ball of radius r = eps + delta around
// the image, mapped back by the closed-form inverse.
inline DenseCoverResult dense_cover_torus(bool plus, const std::vector<double>& center, double eps, double delta,
                                          std::size_t probes) {
  const double r = eps + delta;
  const auto img = torus_forward(plus, center);
  const std::array<std::uint64_t, 4> bases{2, 3, 5, 7};
  DenseCoverResult out;
  for (std::uint64_t i = 1; out.probes < probes; ++i) {
    std::array<double, 4> off{};
    double n2 = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
      off[a] = r * (2.0 * radical_inverse(i, bases[a]) - 1.0);
      n2 += off[a] * off[a];
    }
    if (n2 >= r * r) continue;
    ++out.probes;
    std::vector<double> z(4);
    for (std::size_t a = 0; a < 4; ++a) z[a] = wrap(img[a] + off[a]);
    const double d = torus_dist(torus_inverse(plus, z), center);
    out.worst = std::max(out.worst, d);
    if (!(d < eps)) out.pass = false;
  }
  return out;
}

}  // namespace oracle
