#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "sq/bodies.hpp"

namespace sq {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

// {"kind": "...", ...payload}. Oracle bodies are not serializable.
Json body_to_json(const Body& body);
Body body_from_json(const Json& j);

// Accepts a path to a JSON file, an inline JSON document, or a built-in:
//   cube:N  cross:N  ball:N  lp:P:N  random-polytope:V:N
// The seed only affects random-polytope.
Body parse_body_spec(const std::string& spec, std::uint64_t seed = 0);

}  // namespace sq
