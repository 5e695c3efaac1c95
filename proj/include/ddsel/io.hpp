#pragma once

#include "ddsel/bench.hpp"
#include "ddsel/bounds.hpp"
#include "ddsel/core.hpp"
#include "ddsel/milo.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace ddsel {

using Json = nlohmann::json;

/// Headerless comma-separated reals. Throws Io on unreadable files and
/// MalformedProblem on ragged rows or unparsable fields.
Matrix read_matrix_csv(const std::string& path);
/// A single column, or a single row.
Vector read_vector_csv(const std::string& path);

/// Values are written with %.17g so a read reproduces them bit-exactly.
void write_matrix_csv(const std::string& path, const Matrix& m);
void write_vector_csv(const std::string& path, const Vector& v);

Json to_json(const Solution& s);
Json to_json(const BoundSet& b);
BoundSet bounds_from_json(const Json& j);
/// The incumbent, certificate and progress log. Node traces are left out.
Json to_json(const MiloResult& r);
Json to_json(const PathResult& r);
Json to_json(const Metrics& m);

/// Long format: delta, index (1-based), value; one line per nonzero.
void write_path_csv(const std::string& path, const PathResult& r);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

}  // namespace ddsel
