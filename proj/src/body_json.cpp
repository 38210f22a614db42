#include "sq/body_json.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

namespace sq {
namespace {

void expect_keys(const Json& j, std::set<std::string> allowed) {
  allowed.insert("kind");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw InvalidArgument("body json: unknown field '" + key + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw InvalidArgument("not an integer: " + s);
  return v;
}

double parse_exponent(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InvalidArgument("not a number: " + s);
  return v;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix json: expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InvalidArgument("matrix json: ragged rows");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("vector json: expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Json body_to_json(const Body& body) {
  Json j;
  j["kind"] = std::string(to_string(body.kind()));
  switch (body.kind()) {
    case BodyKind::Ellipsoid:
      j["Q"] = matrix_to_json(body.as<EllipsoidNode>()->ellipsoid().form());
      break;
    case BodyKind::PolytopeH:
      j["normals"] = matrix_to_json(body.as<PolytopeHNode>()->normals());
      break;
    case BodyKind::PolytopeV:
      j["vertices"] = matrix_to_json(body.as<PolytopeVNode>()->generators());
      break;
    case BodyKind::LpBall: {
      const auto* lp = body.as<LpBallNode>();
      j["dim"] = lp->dim();
      if (std::isinf(lp->p()))
        j["p"] = "inf";
      else
        j["p"] = lp->p();
      break;
    }
    case BodyKind::LinearImage: {
      const auto* li = body.as<LinearImageNode>();
      j["map"] = matrix_to_json(li->map());
      j["body"] = body_to_json(li->inner());
      break;
    }
    case BodyKind::Polar:
      j["body"] = body_to_json(body.as<PolarNode>()->inner());
      break;
    case BodyKind::Slice: {
      const auto* s = body.as<SliceNode>();
      j["basis"] = matrix_to_json(s->basis());
      j["body"] = body_to_json(s->inner());
      break;
    }
    case BodyKind::Projection: {
      const auto* p = body.as<ProjectionNode>();
      j["basis"] = matrix_to_json(p->basis());
      j["body"] = body_to_json(p->inner());
      break;
    }
    case BodyKind::Oracle:
      throw UnsupportedRepresentation("oracle bodies cannot be serialized");
  }
  return j;
}

Body body_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) throw InvalidArgument("body json: missing 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "ellipsoid") {
    expect_keys(j, {"Q"});
    return ellipsoid_body(Ellipsoid(matrix_from_json(j.at("Q"))));
  }
  if (kind == "polytope_h") {
    expect_keys(j, {"normals"});
    return polytope_h(matrix_from_json(j.at("normals")));
  }
  if (kind == "polytope_v") {
    expect_keys(j, {"vertices"});
    return polytope_v(matrix_from_json(j.at("vertices")));
  }
  if (kind == "lp_ball") {
    expect_keys(j, {"dim", "p"});
    const auto& p = j.at("p");
    const double exponent = p.is_string() ? parse_exponent(p.get<std::string>()) : p.get<double>();
    return lp_ball(j.at("dim").get<int>(), exponent);
  }
  if (kind == "linear_image") {
    expect_keys(j, {"map", "body"});
    return Body(std::make_shared<LinearImageNode>(matrix_from_json(j.at("map")), body_from_json(j.at("body"))));
  }
  if (kind == "polar") {
    expect_keys(j, {"body"});
    return Body(std::make_shared<PolarNode>(body_from_json(j.at("body"))));
  }
  if (kind == "slice") {
    expect_keys(j, {"basis", "body"});
    const Body inner = body_from_json(j.at("body"));
    const Matrix basis = matrix_from_json(j.at("basis"));
    (void)Subspace(basis);
    if (basis.rows() != inner.dim()) throw DimensionMismatch("slice json: basis rows");
    return Body(std::make_shared<SliceNode>(inner, basis));
  }
  if (kind == "projection") {
    expect_keys(j, {"basis", "body"});
    return Body(std::make_shared<ProjectionNode>(body_from_json(j.at("body")), matrix_from_json(j.at("basis"))));
  }
  throw InvalidArgument("body json: unknown kind '" + kind + "'");
}

Body parse_body_spec(const std::string& spec, std::uint64_t seed) {
  if (spec.empty()) throw InvalidArgument("empty body specification");
  if (spec.front() == '{') return body_from_json(Json::parse(spec));
  {
    std::ifstream in(spec);
    if (in) return body_from_json(Json::parse(in));
  }
  const auto parts = split(spec, ':');
  const std::string& name = parts.front();
  auto arity = [&](std::size_t n) {
    if (parts.size() != n + 1) throw InvalidArgument("body spec '" + spec + "': wrong number of parameters");
  };
  if (name == "cube") {
    arity(1);
    return cube(parse_int(parts[1]));
  }
  if (name == "cross") {
    arity(1);
    return cross_polytope(parse_int(parts[1]));
  }
  if (name == "ball") {
    arity(1);
    return unit_ball(parse_int(parts[1]));
  }
  if (name == "lp") {
    arity(2);
    return lp_ball(parse_int(parts[2]), parse_exponent(parts[1]));
  }
  if (name == "random-polytope") {
    arity(2);
    const int count = parse_int(parts[1]);
    const int dim = parse_int(parts[2]);
    if (count < dim) throw InvalidArgument("random-polytope: need at least dim vertices");
    RngStream rng(seed, 0xB0D1E5ULL);
    Matrix v(count, dim);
    for (int i = 0; i < count; ++i) v.row(i) = gaussian_vector(dim, rng).transpose();
    return polytope_v(v);
  }
  throw InvalidArgument("unknown body specification '" + spec + "'");
}

}  // namespace sq
