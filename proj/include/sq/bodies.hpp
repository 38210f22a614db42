#pragma once

// Symmetric convex bodies exposed through gauge and support oracles.
//
// A Body is an immutable, cheaply copyable handle to a representation node.
// Closed-form representations (ellipsoid, H- and V-polytopes, l_p balls)
// evaluate both oracles exactly or by a small linear program; composite
// nodes (linear images, polars, slices, projections) delegate to their
// operands. Coordinates of slices and projections are taken with respect to
// the orthonormal basis of the subspace, and the dual space is identified
// with the primal space through the Euclidean inner product.

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "sq/ellipsoid.hpp"
#include "sq/linear.hpp"

namespace sq {

enum class BodyKind {
  Ellipsoid,
  PolytopeH,
  PolytopeV,
  LpBall,
  LinearImage,
  Polar,
  Slice,
  Projection,
  Oracle,
};

std::string_view to_string(BodyKind kind);

class BodyNode {
 public:
  virtual ~BodyNode() = default;
  virtual int dim() const = 0;
  virtual BodyKind kind() const = 0;
  virtual double gauge(const Vector& x) const = 0;
  virtual double support(const Vector& y) const = 0;
  // Rows g_i with body = conv{+-g_i}, when the body is a polytope whose
  // generators are cheap to obtain exactly. Every vertex is among them;
  // some rows may be interior points.
  virtual std::optional<Matrix> vertices() const { return std::nullopt; }
  // Rows a_i with body = {x : |<a_i, x>| <= 1}, when cheaply available.
  virtual std::optional<Matrix> facets() const { return std::nullopt; }
  virtual std::string describe() const = 0;
};

class Body {
 public:
  explicit Body(std::shared_ptr<const BodyNode> node);

  int dim() const { return node_->dim(); }
  BodyKind kind() const { return node_->kind(); }
  double gauge(const Vector& x) const;
  double support(const Vector& y) const;
  std::optional<Matrix> vertices() const { return node_->vertices(); }
  std::optional<Matrix> facets() const { return node_->facets(); }
  std::string describe() const { return node_->describe(); }

  const BodyNode& node() const { return *node_; }
  template <class Node>
  const Node* as() const {
    return dynamic_cast<const Node*>(node_.get());
  }

 private:
  std::shared_ptr<const BodyNode> node_;
};

// ---------------------------------------------------------------------------
// Representation nodes.

class EllipsoidNode final : public BodyNode {
 public:
  explicit EllipsoidNode(Ellipsoid e) : ellipsoid_(std::move(e)) {}
  int dim() const override { return ellipsoid_.dim(); }
  BodyKind kind() const override { return BodyKind::Ellipsoid; }
  double gauge(const Vector& x) const override { return ellipsoid_.gauge(x); }
  double support(const Vector& y) const override { return ellipsoid_.support(y); }
  std::string describe() const override;
  const Ellipsoid& ellipsoid() const { return ellipsoid_; }

 private:
  Ellipsoid ellipsoid_;
};

// {x : |<a_i, x>| <= 1 for every row a_i of normals}.
class PolytopeHNode final : public BodyNode {
 public:
  explicit PolytopeHNode(Matrix normals);
  int dim() const override { return static_cast<int>(normals_.cols()); }
  BodyKind kind() const override { return BodyKind::PolytopeH; }
  double gauge(const Vector& x) const override;
  double support(const Vector& y) const override;
  std::optional<Matrix> vertices() const override;
  std::optional<Matrix> facets() const override { return normals_; }
  std::string describe() const override;
  const Matrix& normals() const { return normals_; }

 private:
  Matrix normals_;
  mutable std::once_flag vertices_once_;
  mutable std::optional<Matrix> vertices_;
};

// conv{+-v_i} over the rows v_i of vertices.
class PolytopeVNode final : public BodyNode {
 public:
  explicit PolytopeVNode(Matrix vertices);
  int dim() const override { return static_cast<int>(vertices_.cols()); }
  BodyKind kind() const override { return BodyKind::PolytopeV; }
  double gauge(const Vector& x) const override;
  double support(const Vector& y) const override;
  std::optional<Matrix> vertices() const override { return vertices_; }
  std::optional<Matrix> facets() const override;
  std::string describe() const override;
  const Matrix& generators() const { return vertices_; }

 private:
  Matrix vertices_;
  mutable std::once_flag facets_once_;
  mutable std::optional<Matrix> facets_;
};

// Unit ball of the l_p norm, p in [1, inf].
class LpBallNode final : public BodyNode {
 public:
  LpBallNode(int dim, double p);
  int dim() const override { return dim_; }
  BodyKind kind() const override { return BodyKind::LpBall; }
  double gauge(const Vector& x) const override;
  double support(const Vector& y) const override;
  std::optional<Matrix> vertices() const override;
  std::optional<Matrix> facets() const override;
  std::string describe() const override;
  double p() const { return p_; }
  double dual_exponent() const;

 private:
  int dim_;
  double p_;
};

// T(inner).
class LinearImageNode final : public BodyNode {
 public:
  LinearImageNode(Matrix map, Body inner);
  int dim() const override { return static_cast<int>(map_.rows()); }
  BodyKind kind() const override { return BodyKind::LinearImage; }
  double gauge(const Vector& x) const override;
  double support(const Vector& y) const override;
  std::optional<Matrix> vertices() const override;
  std::optional<Matrix> facets() const override;
  std::string describe() const override;
  const Matrix& map() const { return map_; }
  const Body& inner() const { return inner_; }
  double condition_number() const { return condition_; }

 private:
  Matrix map_;
  Matrix inverse_;
  double condition_;
  Body inner_;
};

// Polar of a body with no closed-form dual; swaps the two oracles.
class PolarNode final : public BodyNode {
 public:
  explicit PolarNode(Body inner) : inner_(std::move(inner)) {}
  int dim() const override { return inner_.dim(); }
  BodyKind kind() const override { return BodyKind::Polar; }
  double gauge(const Vector& x) const override { return inner_.support(x); }
  double support(const Vector& y) const override { return inner_.gauge(y); }
  std::optional<Matrix> vertices() const override { return inner_.facets(); }
  std::optional<Matrix> facets() const override { return inner_.vertices(); }
  std::string describe() const override;
  const Body& inner() const { return inner_; }

 private:
  Body inner_;
};

// Orthogonal projection of inner onto span(basis), in basis coordinates.
// Support is an exact restriction; gauge is a minimization over the
// orthogonal complement (a linear program for H-polytopes).
class ProjectionNode final : public BodyNode {
 public:
  ProjectionNode(Body inner, Matrix basis);
  int dim() const override { return static_cast<int>(basis_.cols()); }
  BodyKind kind() const override { return BodyKind::Projection; }
  double gauge(const Vector& z) const override;
  double support(const Vector& y) const override { return inner_.support(basis_ * y); }
  std::optional<Matrix> vertices() const override;
  std::optional<Matrix> facets() const override;
  std::string describe() const override;
  const Body& inner() const { return inner_; }
  const Matrix& basis() const { return basis_; }

 private:
  Body inner_;
  Matrix basis_;
  Matrix complement_;
  mutable std::once_flag facets_once_;
  mutable std::optional<Matrix> facets_;
};

// inner ∩ span(basis), in basis coordinates. Gauge is an exact restriction;
// support is the gauge of the projection of the polar.
class SliceNode final : public BodyNode {
 public:
  SliceNode(Body inner, Matrix basis);
  int dim() const override { return static_cast<int>(basis_.cols()); }
  BodyKind kind() const override { return BodyKind::Slice; }
  double gauge(const Vector& z) const override { return inner_.gauge(basis_ * z); }
  double support(const Vector& y) const override { return dual_.gauge(y); }
  std::optional<Matrix> vertices() const override;
  std::optional<Matrix> facets() const override;
  std::string describe() const override;
  const Body& inner() const { return inner_; }
  const Matrix& basis() const { return basis_; }

 private:
  Body inner_;
  Matrix basis_;
  Body dual_;
  mutable std::once_flag vertices_once_;
  mutable std::optional<Matrix> vertices_;
};

// Caller-supplied oracles. Not serializable.
class OracleNode final : public BodyNode {
 public:
  using Fn = std::function<double(const Vector&)>;
  OracleNode(int dim, Fn gauge, Fn support, std::string name)
      : dim_(dim), gauge_(std::move(gauge)), support_(std::move(support)), name_(std::move(name)) {}
  int dim() const override { return dim_; }
  BodyKind kind() const override { return BodyKind::Oracle; }
  double gauge(const Vector& x) const override { return gauge_(x); }
  double support(const Vector& y) const override { return support_(y); }
  std::string describe() const override { return name_; }

 private:
  int dim_;
  Fn gauge_;
  Fn support_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Constructors.

Body ellipsoid_body(const Ellipsoid& e);
Body polytope_h(Matrix normals);
Body polytope_v(Matrix vertices);
Body lp_ball(int dim, double p);
Body cube(int dim);
Body cross_polytope(int dim);
Body unit_ball(int dim);
Body oracle_body(int dim, OracleNode::Fn gauge, OracleNode::Fn support, std::string name);

// ---------------------------------------------------------------------------
// Operations. Each returns the most concrete representation available:
// H- and V-polytopes swap under polarity, slices of H-polytopes and
// projections of V-polytopes stay polytopes, ellipsoids stay ellipsoids.

Body polar(const Body& body);
Body linear_image(const Matrix& map, const Body& body);
Body slice(const Body& body, const Subspace& subspace);
Body project(const Body& body, const Subspace& subspace);

// Same as slice/project but with a raw orthonormal basis, which may span
// the whole space.
Body slice_by_basis(const Body& body, const Matrix& basis);
Body project_by_basis(const Body& body, const Matrix& basis);

// ---------------------------------------------------------------------------
// Polytope conversions (brute-force enumeration; desk dimensions only).

// Vertices (one per +-pair, as rows) of {x : |<a_i, x>| <= 1}. Throws
// UnsupportedRepresentation when the enumeration would be too large.
Matrix halfspace_to_vertices(const Matrix& normals);
// Facet normals (one per +-pair) of conv{+-v_i}: the vertices of the polar.
inline Matrix vertices_to_halfspaces(const Matrix& vertices) {
  return halfspace_to_vertices(vertices);
}

// Volume of conv{+-v_i} given its vertex representatives and facet normals
// (facets {<a, x> = 1}, one per +-pair), by cone decomposition over the face
// lattice.
double symmetric_polytope_volume(const Matrix& vertices, const Matrix& facet_normals);

}  // namespace sq
