#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "ifsshadow/ifs.hpp"

namespace ifsshadow {

using Json = nlohmann::json;

/// IFS definition:
///   {"space": {"dim": d}, "maps": [{"kind": ..., "params": {...}}, ...]}
/// kinds: cat, torus_F1, torus_F2, identity, rotation {angle},
/// affine {matrix, offset}, contraction {q, offset}, custom_poly {coeffs}.
IFS ifs_from_json(const Json& j);
IFS load_ifs(const std::string& path);

/// A catalog name ("cat", "contraction:0.5", ...) or a path to an IFS file.
IFS resolve_system(const std::string& name_or_path);

/// {"window": [...], "extension": "constant:N" | "periodic", "first": k}
SymbolSequence sigma_from_json(const Json& j);
Json sigma_to_json(const SymbolSequence& sigma);

/// Inline schedules: "constant:s", "periodic:a,b,...", "random:len" (uniform
/// over the n_symbols maps, seeded), or a path to a schedule file.
SymbolSequence resolve_sigma(const std::string& spec, int n_symbols, std::uint64_t seed);

Json point_to_json(const SpacePoint& p);
SpacePoint point_from_json(const Json& j);
/// "0.3,0.25" -> point.
SpacePoint parse_point(const std::string& text);

/// CSV with header k,lambda,x0,x1,... and lambda = -1 on the last row.
std::string chain_to_csv(const ChainRecord& chain);
void write_chain_csv(const std::string& path, const ChainRecord& chain);
/// Reads a chain file; symbols outside the window repeat periodically.
ChainRecord read_chain_csv(const std::string& path);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Pretty JSON with a trailing newline.
std::string dump_json(const Json& j);

}  // namespace ifsshadow
