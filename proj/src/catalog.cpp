#include "ifsshadow/catalog.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "ifsshadow/errors.hpp"
#include "ifsshadow/rng.hpp"

namespace ifsshadow {

namespace {

constexpr double kPi = std::numbers::pi;

std::string vector_label(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

std::string matrix_label(const Matrix& m) {
  std::string s;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    s += r ? ";" : "";
    for (Eigen::Index c = 0; c < m.cols(); ++c) s += (c ? "," : "") + format_number(m(r, c));
  }
  return s;
}

bool is_integer_matrix(const Matrix& m) {
  return ((m.array() - m.array().round()).abs() < 1e-12).all();
}

std::vector<double> parse_number_list(const std::string& text, const std::string& context) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in system '" + context + "'");
    }
  }
  if (out.empty()) throw ConfigError("system '" + context + "' needs parameters");
  return out;
}

}  // namespace

SmoothMap cat_map() {
  Matrix a(2, 2);
  a << 2, 1, 1, 1;
  SmoothMap m(
      "cat", 2,
      [](const SpacePoint& p) { return SpacePoint{2.0 * p[0] + p[1], p[0] + p[1]}; },
      [](const SpacePoint& p) { return SpacePoint{p[0] - p[1], -p[0] + 2.0 * p[1]}; },
      [a](const SpacePoint&) -> Matrix { return a; });
  return m.with_linear_part(a);
}

double torus_coupling(TorusVariant variant, double u, double v) {
  const double c = std::cos(kPi * (variant == TorusVariant::kF1 ? u + v : u - v));
  return c * c;
}

SmoothMap torus_map(TorusVariant variant) {
  // f(x) = sin(2 pi x) / (2 pi), f'(x) = cos(2 pi x).
  auto f = [](double x) { return std::sin(2.0 * kPi * x) / (2.0 * kPi); };
  const double sign = variant == TorusVariant::kF1 ? 1.0 : -1.0;
  auto forward = [variant, f](const SpacePoint& p) {
    const double x = p[0], y = p[1], u = p[2], v = p[3];
    const double cf = torus_coupling(variant, u, v) * f(x);
    return SpacePoint{2.0 * x - cf + y, x - cf + y, 2.0 * u + v, u + v};
  };
  auto inverse = [variant, f](const SpacePoint& q) {
    const double big_x = q[0], big_y = q[1], big_u = q[2], big_v = q[3];
    const double u = big_u - big_v;
    const double v = -big_u + 2.0 * big_v;
    const double x = big_x - big_y;
    const double y = big_y - x + torus_coupling(variant, u, v) * f(x);
    return SpacePoint{x, y, u, v};
  };
  auto jacobian = [variant, f, sign](const SpacePoint& p) -> Matrix {
    const double x = p[0], u = p[2], v = p[3];
    const double c = torus_coupling(variant, u, v);
    const double fx = f(x);
    const double dfx = std::cos(2.0 * kPi * x);
    // d/du cos^2(pi s) = -pi sin(2 pi s) ds/du with s = u +- v.
    const double dc = -kPi * std::sin(2.0 * kPi * (variant == TorusVariant::kF1 ? u + v : u - v));
    const double dc_du = dc;
    const double dc_dv = sign * dc;
    Matrix j(4, 4);
    j << 2.0 - c * dfx, 1.0, -dc_du * fx, -dc_dv * fx,
         1.0 - c * dfx, 1.0, -dc_du * fx, -dc_dv * fx,
         0.0, 0.0, 2.0, 1.0,
         0.0, 0.0, 1.0, 1.0;
    return j;
  };
  return SmoothMap(variant == TorusVariant::kF1 ? "torus_F1" : "torus_F2", 4, forward, inverse, jacobian);
}

SmoothMap affine_map(const Matrix& m, const Vector& b) {
  const auto d = m.rows();
  if (m.cols() != d) throw Error("affine map needs a square matrix");
  if (b.size() != d) throw DimensionMismatch(static_cast<int>(d), static_cast<int>(b.size()));
  const double det = m.determinant();
  if (std::abs(det) < 1e-14) throw Error("affine map matrix is singular");
  const Matrix minv = m.inverse();
  const bool automorphism = is_integer_matrix(m) && std::abs(std::abs(det) - 1.0) < 1e-12;
  const std::string label = "affine(" + matrix_label(m) + ";" + vector_label(b) + ")";
  SmoothMap map(
      label, static_cast<int>(d),
      [m, b](const SpacePoint& p) { return SpacePoint(Vector(m * p.coords() + b)); },
      [minv, b](const SpacePoint& p) { return SpacePoint(Vector(minv * (p.coords() - b))); },
      [m](const SpacePoint&) -> Matrix { return m; },
      automorphism ? Domain::kTorus : Domain::kUnitCube);
  if (automorphism) return map.with_linear_part(m.array().round().matrix());
  return map;
}

SmoothMap rotation_map(const Vector& angle) {
  const auto d = static_cast<int>(angle.size());
  SmoothMap m(
      "rotation(" + vector_label(angle) + ")", d,
      [angle](const SpacePoint& p) { return p.shifted(angle); },
      [angle](const SpacePoint& p) { return p.shifted(-angle); },
      [d](const SpacePoint&) -> Matrix { return Matrix::Identity(d, d); });
  return m.with_linear_part(Matrix::Identity(d, d));
}

SmoothMap polynomial_map(const std::vector<std::vector<double>>& coeffs) {
  if (coeffs.empty()) throw Error("polynomial map needs at least one coordinate");
  const auto d = static_cast<int>(coeffs.size());
  std::string label = "custom_poly(";
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    label += i ? ";" : "";
    for (std::size_t j = 0; j < coeffs[i].size(); ++j) label += (j ? "," : "") + format_number(coeffs[i][j]);
  }
  label += ")";
  auto eval = [coeffs](int i, double x) {
    double acc = 0.0;
    for (auto it = coeffs[i].rbegin(); it != coeffs[i].rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  auto deriv = [coeffs](int i, double x) {
    double acc = 0.0;
    const auto& c = coeffs[i];
    for (std::size_t j = c.size(); j-- > 1;) acc = acc * x + static_cast<double>(j) * c[j];
    return acc;
  };
  return SmoothMap(
      label, d,
      [d, eval](const SpacePoint& p) {
        Vector out(d);
        for (int i = 0; i < d; ++i) out[i] = eval(i, p[i]);
        return SpacePoint(std::move(out));
      },
      {},
      [d, deriv](const SpacePoint& p) -> Matrix {
        Matrix j = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i) j(i, i) = deriv(i, p[i]);
        return j;
      },
      Domain::kUnitCube);
}

IFS build_torus_example() { return IFS({torus_map(TorusVariant::kF1), torus_map(TorusVariant::kF2)}); }

IFS build_cat_ifs() { return IFS({cat_map()}); }

IFS build_contraction_ifs(double q, const std::vector<Vector>& offsets) {
  if (!(q > 0.0 && q < 1.0)) throw Error("contraction factor must lie in (0, 1), got " + format_number(q));
  if (offsets.empty()) throw Error("contraction IFS needs at least one offset");
  const auto d = offsets.front().size();
  std::vector<SmoothMap> maps;
  for (const auto& b : offsets) {
    if (b.size() != d) throw DimensionMismatch(static_cast<int>(d), static_cast<int>(b.size()));
    if ((b.array() < 0.0).any() || (b.array() > 1.0 - q + 1e-15).any()) {
      throw Error("contraction offsets must lie in [0, 1 - q] so images stay in the unit cube");
    }
    maps.push_back(affine_map(q * Matrix::Identity(d, d), b));
  }
  return IFS(std::move(maps));
}

IFS build_contraction_ifs(double q, const std::vector<double>& offsets) {
  std::vector<Vector> v;
  for (double b : offsets) v.push_back(Vector::Constant(1, b));
  return build_contraction_ifs(q, v);
}

IFS build_rotation_ifs(const std::vector<Vector>& angles) {
  if (angles.empty()) throw Error("rotation IFS needs at least one angle");
  std::vector<SmoothMap> maps;
  for (const auto& a : angles) maps.push_back(rotation_map(a));
  return IFS(std::move(maps));
}

IFS build_rotation_ifs(const std::vector<double>& angles) {
  std::vector<Vector> v;
  for (double a : angles) v.push_back(Vector::Constant(1, a));
  return build_rotation_ifs(v);
}

IFS build_identity_ifs(int dim) { return IFS({identity_map(dim)}); }

const std::vector<SystemCatalogEntry>& system_catalog() {
  static const std::vector<SystemCatalogEntry> entries = {
      {"cat", "cat", "toral automorphism (u,v) -> (2u+v, u+v) on T^2"},
      {"torus", "torus", "skew-product pair {F1, F2} on T^4 over the cat map"},
      {"torus_F1", "torus_F1", "F1 alone: coupling cos^2(pi(u+v))"},
      {"torus_F2", "torus_F2", "F2 alone: coupling cos^2(pi(u-v))"},
      {"contraction", "contraction:Q", "{q x, q x + 1 - q} on T^1"},
      {"contraction2d", "contraction2d:Q", "{q x, q x + (1-q, (1-q)/2)} on T^2"},
      {"rotation", "rotation:A[,B...]", "circle rotations, one map per angle"},
      {"identity", "identity:D", "identity map on T^D"},
  };
  return entries;
}

static IFS build_named(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "cat") return build_cat_ifs();
  if (name == "torus") return build_torus_example();
  if (name == "torus_F1") return IFS({torus_map(TorusVariant::kF1)});
  if (name == "torus_F2") return IFS({torus_map(TorusVariant::kF2)});
  if (name == "contraction" || name == "contraction2d") {
    const double q = args.empty() ? 0.5 : parse_number_list(args, spec).front();
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("contraction factor must lie in (0, 1)");
    if (name == "contraction") return build_contraction_ifs(q, std::vector<double>{0.0, 1.0 - q});
    Vector b0 = Vector::Zero(2);
    Vector b1(2);
    b1 << 1.0 - q, 0.5 * (1.0 - q);
    return build_contraction_ifs(q, std::vector<Vector>{b0, b1});
  }
  if (name == "rotation") return build_rotation_ifs(parse_number_list(args, spec));
  if (name == "identity") {
    const double d = args.empty() ? 1.0 : parse_number_list(args, spec).front();
    if (d < 1 || d != std::floor(d)) throw ConfigError("identity dimension must be a positive integer");
    return build_identity_ifs(static_cast<int>(d));
  }
  throw ConfigError("unknown system '" + spec + "'");
}

IFS system_from_name(const std::string& spec) {
  IFS ifs = build_named(spec);
  require_map_invariants(ifs);
  return ifs;
}

MapInvariantReport verify_map_invariants(const SmoothMap& m, std::size_t samples, std::uint64_t seed) {
  MapInvariantReport r;
  Rng rng(seed);
  const bool cube = m.domain() == Domain::kUnitCube;
  for (std::size_t s = 0; s < samples; ++s) {
    Vector c(m.dim());
    for (int i = 0; i < m.dim(); ++i) c[i] = cube ? rng.uniform(0.01, 0.99) : rng.uniform();
    const SpacePoint x(std::move(c));
    if (m.invertible()) r.max_roundtrip = std::max(r.max_roundtrip, dist(invert_map(m, m(x)), x));
    if (m.has_jacobian()) {
      const Matrix err = m.jacobian(x) - finite_difference_jacobian(m, x, 1e-6);
      r.max_jacobian_error = std::max(r.max_jacobian_error, err.cwiseAbs().maxCoeff());
    }
  }
  r.ok = r.max_roundtrip <= 1e-10 && r.max_jacobian_error <= 1e-4;
  return r;
}

void require_map_invariants(const IFS& ifs, std::size_t samples, std::uint64_t seed) {
  for (const auto& m : ifs.maps()) {
    const auto r = verify_map_invariants(m, samples, seed);
    if (!r.ok) {
      throw Error("map '" + m.label() + "' fails invariants: round trip " + format_number(r.max_roundtrip) +
                  ", Jacobian error " + format_number(r.max_jacobian_error));
    }
  }
}

}  // namespace ifsshadow
