#include "ifsshadow/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ifsshadow/catalog.hpp"
#include "ifsshadow/errors.hpp"

namespace ifsshadow {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + s + "' in " + context);
  }
}

int to_int(const std::string& s, const std::string& context) {
  const double v = to_double(s, context);
  if (v != static_cast<double>(static_cast<long long>(v))) throw ConfigError("expected an integer in " + context);
  return static_cast<int>(v);
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (j.is_number()) {
    Vector v(1);
    v[0] = j.get<double>();
    return v;
  }
  if (!j.is_array()) throw ConfigError(what + " must be a number or an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
      throw ConfigError("matrix rows differ in length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

SmoothMap map_from_json(const Json& j, int dim) {
  if (!j.contains("kind")) throw ConfigError("map entry needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  const Json params = j.value("params", Json::object());
  if (kind == "cat") return cat_map();
  if (kind == "torus_F1") return torus_map(TorusVariant::kF1);
  if (kind == "torus_F2") return torus_map(TorusVariant::kF2);
  if (kind == "identity") return identity_map(dim);
  if (kind == "rotation") return rotation_map(vector_from_json(params.at("angle"), "angle"));
  if (kind == "affine") {
    const Matrix m = matrix_from_json(params.at("matrix"));
    const Vector b = params.contains("offset") ? vector_from_json(params.at("offset"), "offset")
                                               : Vector(Vector::Zero(m.rows()));
    return affine_map(m, b);
  }
  if (kind == "contraction") {
    const double q = params.at("q").get<double>();
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("contraction factor must lie in (0, 1)");
    const Vector b = params.contains("offset") ? vector_from_json(params.at("offset"), "offset")
                                               : Vector(Vector::Zero(dim));
    return affine_map(q * Matrix::Identity(b.size(), b.size()), b);
  }
  if (kind == "custom_poly") {
    return polynomial_map(params.at("coeffs").get<std::vector<std::vector<double>>>());
  }
  throw ConfigError("unknown map kind '" + kind + "'");
}

}  // namespace

IFS ifs_from_json(const Json& j) {
  try {
    const int dim = j.at("space").at("dim").get<int>();
    if (dim < 1) throw ConfigError("space dimension must be positive");
    std::vector<SmoothMap> maps;
    for (const auto& m : j.at("maps")) {
      SmoothMap f = map_from_json(m, dim);
      if (f.dim() != dim) throw DimensionMismatch(dim, f.dim());
      maps.push_back(std::move(f));
    }
    if (maps.empty()) throw ConfigError("IFS needs at least one map");
    return IFS(std::move(maps));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad IFS definition: ") + e.what());
  }
}

IFS load_ifs(const std::string& path) {
  try {
    return ifs_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
}

IFS resolve_system(const std::string& name_or_path) {
  if (std::filesystem::is_regular_file(name_or_path)) return load_ifs(name_or_path);
  return system_from_name(name_or_path);
}

SymbolSequence sigma_from_json(const Json& j) {
  try {
    const std::vector<int> window = j.value("window", std::vector<int>{});
    const std::string ext = j.value("extension", std::string("constant:0"));
    const std::int64_t first = j.value("first", std::int64_t{0});
    if (ext == "periodic") {
      if (window.empty()) throw ConfigError("periodic schedule needs a nonempty window");
      return SymbolSequence::periodic(window, first);
    }
    if (ext.rfind("constant:", 0) == 0) {
      return SymbolSequence::padded(window, to_int(ext.substr(9), "extension"), first);
    }
    throw ConfigError("unknown extension '" + ext + "'");
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad schedule: ") + e.what());
  }
}

Json sigma_to_json(const SymbolSequence& sigma) {
  Json j;
  j["window"] = sigma.window();
  j["extension"] = sigma.extension() == SymbolSequence::Extension::kPeriodic
                       ? std::string("periodic")
                       : "constant:" + std::to_string(sigma.fill());
  j["first"] = sigma.first();
  return j;
}

SymbolSequence resolve_sigma(const std::string& spec, int n_symbols, std::uint64_t seed) {
  if (std::filesystem::is_regular_file(spec)) {
    try {
      return sigma_from_json(Json::parse(read_file(spec)));
    } catch (const Json::exception& e) {
      throw ConfigError("cannot parse " + spec + ": " + e.what());
    }
  }
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "constant") return SymbolSequence::constant(args.empty() ? 0 : to_int(args, spec));
  if (kind == "periodic") {
    std::vector<int> w;
    for (const auto& s : split(args, ',')) w.push_back(to_int(s, spec));
    if (w.empty()) throw ConfigError("periodic schedule needs symbols");
    return SymbolSequence::periodic(w);
  }
  if (kind == "random") {
    const int len = args.empty() ? 1000 : to_int(args, spec);
    if (len < 1) throw ConfigError("random schedule needs a positive length");
    return SymbolSequence::random(n_symbols, static_cast<std::size_t>(len), seed);
  }
  throw ConfigError("unknown schedule '" + spec + "'");
}

Json point_to_json(const SpacePoint& p) {
  Json j = Json::array();
  for (int i = 0; i < p.dim(); ++i) j.push_back(p[i]);
  return j;
}

SpacePoint point_from_json(const Json& j) { return SpacePoint(vector_from_json(j, "point")); }

SpacePoint parse_point(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty()) throw ConfigError("empty point");
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_double(parts[i], "point");
  return SpacePoint(std::move(v));
}

std::string chain_to_csv(const ChainRecord& chain) {
  std::string out = "k,lambda";
  for (int i = 0; i < chain.dim(); ++i) out += ",x" + std::to_string(i);
  out += "\n";
  for (std::size_t j = 0; j < chain.points.size(); ++j) {
    const std::int64_t k = chain.first + static_cast<std::int64_t>(j);
    const int lambda = j + 1 < chain.points.size() ? chain.sigma(k) : -1;
    out += std::to_string(k) + "," + std::to_string(lambda);
    for (int i = 0; i < chain.dim(); ++i) out += "," + format_number(chain.points[j][i]);
    out += "\n";
  }
  return out;
}

void write_chain_csv(const std::string& path, const ChainRecord& chain) { write_file_atomic(path, chain_to_csv(chain)); }

ChainRecord read_chain_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,lambda", 0) != 0) throw ConfigError(path + ": missing chain header");
  const int dim = static_cast<int>(split(line, ',').size()) - 2;
  if (dim < 1) throw ConfigError(path + ": chain has no coordinates");
  ChainRecord chain;
  std::vector<int> symbols;
  std::int64_t expected = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (static_cast<int>(f.size()) != dim + 2) throw ConfigError(path + ": row has the wrong number of fields");
    const std::int64_t k = to_int(f[0], path);
    if (first_row) {
      chain.first = k;
      expected = k;
      first_row = false;
    }
    if (k != expected) throw ConfigError(path + ": indices must be consecutive");
    ++expected;
    const int lambda = to_int(f[1], path);
    if (lambda >= 0) symbols.push_back(lambda);
    Vector c(dim);
    for (int i = 0; i < dim; ++i) c[i] = to_double(f[static_cast<std::size_t>(i) + 2], path);
    chain.points.emplace_back(std::move(c));
  }
  if (chain.points.empty()) throw ConfigError(path + ": chain has no points");
  if (symbols.size() + 1 != chain.points.size()) throw ConfigError(path + ": one symbol per link expected");
  chain.sigma = symbols.empty() ? SymbolSequence::constant(0) : SymbolSequence::periodic(symbols, chain.first);
  return chain;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace ifsshadow
