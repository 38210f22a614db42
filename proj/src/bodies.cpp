#include "sq/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sq/lp.hpp"

namespace sq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dim(const Vector& x, int dim, const char* what) {
  if (x.size() != dim) {
    std::ostringstream os;
    os << what << ": expected dimension " << dim << ", got " << x.size();
    throw DimensionMismatch(os.str());
  }
}

double lp_norm(const Vector& x, double p) {
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  if (std::isinf(p)) return m;
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)) / m, p);
  return m * std::pow(s, 1.0 / p);
}

Matrix drop_zero_rows(const Matrix& rows) {
  const double scale = rows.rowwise().norm().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    if (rows.row(i).norm() > 1e-12 * scale) keep.push_back(i);
  Matrix out(static_cast<Eigen::Index>(keep.size()), rows.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows.row(keep[i]);
  return out;
}

void check_spanning(const Matrix& rows, const char* what) {
  if (rows.rows() == 0 || rows.cols() == 0) throw Degenerate(std::string(what) + ": empty");
  if (!rows.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entries");
  Eigen::ColPivHouseholderQR<Matrix> qr(rows);
  qr.setThreshold(1e-12);
  if (qr.rank() < rows.cols()) throw Degenerate(std::string(what) + ": rows do not span the space");
}

void check_basis(const Matrix& basis, int ambient, const char* what) {
  if (basis.rows() != ambient) throw DimensionMismatch(std::string(what) + ": subspace ambient dimension");
  if (basis.cols() < 1) throw InvalidArgument(std::string(what) + ": empty subspace");
  const double dev =
      (basis.transpose() * basis - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (dev > kOrthonormalTol) throw InvalidArgument(std::string(what) + ": basis not orthonormal");
}

// Minimum-norm point of the convex hull of the columns of G, by projected
// gradient on the simplex.
Vector min_norm_hull_point(const Matrix& G) {
  const auto m = G.cols();
  const Matrix gram = G.transpose() * G;
  const double lip = std::max(gram.diagonal().sum(), 1e-300);
  Vector lambda = Vector::Constant(m, 1.0 / static_cast<double>(m));
  for (int it = 0; it < 400; ++it) {
    Vector y = lambda - (gram * lambda) / lip;
    // Euclidean projection onto the simplex.
    Vector sorted = y;
    std::sort(sorted.data(), sorted.data() + m, std::greater<double>());
    double cumsum = 0.0, theta = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      cumsum += sorted(i);
      const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
      if (sorted(i) - t > 0) theta = t;
    }
    lambda = (y.array() - theta).max(0.0).matrix();
  }
  return G * lambda;
}

// Gradient sampling for nonsmooth convex objectives: the descent direction
// is the minimum-norm convex combination of gradients sampled in a shrinking
// neighbourhood, which follows ridges where coordinate search stalls.
double gradient_sampling(const std::function<double(const Vector&)>& f,
                         const std::function<Vector(const Vector&)>& gradient, Vector& x, double fx) {
  const auto k = x.size();
  RngStream rng(0x6A5ULL, static_cast<std::uint64_t>(k));
  const double scale = std::max(1.0, x.norm());
  double radius = 1e-2 * scale;
  for (int iter = 0; iter < 400 && radius > 1e-11 * scale; ++iter) {
    Matrix G(k, 2 * k + 2);
    G.col(0) = gradient(x);
    for (Eigen::Index j = 1; j < G.cols(); ++j) G.col(j) = gradient(x + radius * sphere_sample(static_cast<int>(k), rng));
    const Vector d = -min_norm_hull_point(G);
    const double dn = d.norm();
    if (dn < 1e-9) {
      radius *= 0.1;
      continue;
    }
    double t = std::min(1.0, 10.0 * radius / dn);
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Vector xn = x + t * d;
      const double fn = f(xn);
      if (fn < fx - 1e-6 * t * dn * dn) {
        x = xn;
        fx = fn;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) radius *= 0.1;
  }
  return fx;
}

// BFGS with central-difference gradients, gradient sampling across kinks,
// then a compass-search polish. The objective is convex, so a local minimum
// is global.
double local_minimize(const std::function<double(const Vector&)>& f, Vector x) {
  const auto k = x.size();
  double fx = f(x);
  auto gradient = [&](const Vector& at) {
    Vector g(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double h = 1e-7 * std::max(1.0, std::abs(at(i)));
      Vector a = at, b = at;
      a(i) += h;
      b(i) -= h;
      g(i) = (f(a) - f(b)) / (2 * h);
    }
    return g;
  };
  Matrix hinv = Matrix::Identity(k, k);
  Vector g = gradient(x);
  for (int iter = 0; iter < 200; ++iter) {
    if (g.norm() < 1e-12) break;
    Vector dir = -hinv * g;
    if (dir.dot(g) >= 0) {
      hinv.setIdentity();
      dir = -g;
    }
    double t = 1.0;
    Vector xn;
    double fn = fx;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      xn = x + t * dir;
      fn = f(xn);
      if (fn <= fx + 1e-4 * t * dir.dot(g)) {
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
    const Vector gn = gradient(xn);
    const Vector s = xn - x;
    const Vector yv = gn - g;
    const double sy = s.dot(yv);
    const double improvement = fx - fn;
    x = xn;
    fx = fn;
    g = gn;
    if (sy > 1e-16) {
      const double rho = 1.0 / sy;
      const Matrix id = Matrix::Identity(k, k);
      hinv = (id - rho * s * yv.transpose()) * hinv * (id - rho * yv * s.transpose()) +
             rho * s * s.transpose();
    }
    if (improvement <= 1e-15 * (1.0 + std::abs(fx)) && s.norm() < 1e-12 * (1.0 + x.norm())) break;
  }
  fx = gradient_sampling(f, gradient, x, fx);
  double step = 1e-3 * std::max(1.0, x.norm());
  while (step > 1e-11 * std::max(1.0, x.norm())) {
    bool improved = false;
    for (Eigen::Index i = 0; i < k; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector y = x;
        y(i) += sign * step;
        const double fy = f(y);
        if (fy < fx) {
          x = y;
          fx = fy;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return fx;
}

double minimize_convex(const std::function<double(const Vector&)>& f, int k, double scale) {
  RngStream rng(0x5EEDF00DULL, static_cast<std::uint64_t>(k));
  double best = local_minimize(f, Vector::Zero(k));
  for (int s = 0; s < 4; ++s) {
    Vector start = gaussian_vector(k, rng) * scale;
    best = std::min(best, local_minimize(f, start));
  }
  return best;
}

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

std::string_view to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::Ellipsoid: return "ellipsoid";
    case BodyKind::PolytopeH: return "polytope_h";
    case BodyKind::PolytopeV: return "polytope_v";
    case BodyKind::LpBall: return "lp_ball";
    case BodyKind::LinearImage: return "linear_image";
    case BodyKind::Polar: return "polar";
    case BodyKind::Slice: return "slice";
    case BodyKind::Projection: return "projection";
    case BodyKind::Oracle: return "oracle";
  }
  return "unknown";
}

Body::Body(std::shared_ptr<const BodyNode> node) : node_(std::move(node)) {
  if (!node_) throw InvalidArgument("null body node");
}

double Body::gauge(const Vector& x) const {
  check_dim(x, dim(), "gauge");
  return node_->gauge(x);
}

double Body::support(const Vector& y) const {
  check_dim(y, dim(), "support");
  return node_->support(y);
}

// --- Ellipsoid -------------------------------------------------------------

std::string EllipsoidNode::describe() const {
  return "ellipsoid(n=" + std::to_string(dim()) + ")";
}

// --- PolytopeH -------------------------------------------------------------

PolytopeHNode::PolytopeHNode(Matrix normals) : normals_(std::move(normals)) {
  check_spanning(normals_, "polytope_h normals");
  for (Eigen::Index i = 0; i < normals_.rows(); ++i)
    if (normals_.row(i).norm() == 0.0) throw Degenerate("polytope_h: zero normal");
}

double PolytopeHNode::gauge(const Vector& x) const {
  return (normals_ * x).cwiseAbs().maxCoeff();
}

double PolytopeHNode::support(const Vector& y) const {
  return lp::min_l1_representation(normals_, y);
}

std::optional<Matrix> PolytopeHNode::vertices() const {
  std::call_once(vertices_once_, [this] {
    try {
      vertices_ = halfspace_to_vertices(normals_);
    } catch (const UnsupportedRepresentation&) {
      vertices_.reset();
    }
  });
  return vertices_;
}

std::string PolytopeHNode::describe() const { return "polytope_h(" + shape(normals_) + ")"; }

// --- PolytopeV -------------------------------------------------------------

PolytopeVNode::PolytopeVNode(Matrix vertices) : vertices_(std::move(vertices)) {
  check_spanning(vertices_, "polytope_v vertices");
}

double PolytopeVNode::gauge(const Vector& x) const {
  return lp::min_l1_representation(vertices_, x);
}

double PolytopeVNode::support(const Vector& y) const {
  return (vertices_ * y).cwiseAbs().maxCoeff();
}

std::optional<Matrix> PolytopeVNode::facets() const {
  std::call_once(facets_once_, [this] {
    try {
      facets_ = vertices_to_halfspaces(vertices_);
    } catch (const UnsupportedRepresentation&) {
      facets_.reset();
    }
  });
  return facets_;
}

std::string PolytopeVNode::describe() const { return "polytope_v(" + shape(vertices_) + ")"; }

// --- LpBall ----------------------------------------------------------------

LpBallNode::LpBallNode(int dim, double p) : dim_(dim), p_(p) {
  if (dim < 1) throw InvalidArgument("lp_ball: dim must be >= 1");
  if (!(p >= 1.0)) throw InvalidArgument("lp_ball: p must lie in [1, inf]");
}

double LpBallNode::dual_exponent() const {
  if (p_ == 1.0) return kInf;
  if (std::isinf(p_)) return 1.0;
  return p_ / (p_ - 1.0);
}

double LpBallNode::gauge(const Vector& x) const { return lp_norm(x, p_); }
double LpBallNode::support(const Vector& y) const { return lp_norm(y, dual_exponent()); }

std::optional<Matrix> LpBallNode::vertices() const {
  if (p_ == 1.0) return Matrix::Identity(dim_, dim_);
  if (std::isinf(p_) && dim_ <= 16) {
    const long count = 1L << (dim_ - 1);
    Matrix v(count, dim_);
    for (long mask = 0; mask < count; ++mask) {
      v(mask, 0) = 1.0;
      for (int j = 1; j < dim_; ++j) v(mask, j) = (mask >> (j - 1)) & 1 ? -1.0 : 1.0;
    }
    return v;
  }
  return std::nullopt;
}

std::optional<Matrix> LpBallNode::facets() const {
  if (std::isinf(p_)) return Matrix::Identity(dim_, dim_);
  if (p_ == 1.0) return LpBallNode(dim_, std::numeric_limits<double>::infinity()).vertices();
  return std::nullopt;
}

std::string LpBallNode::describe() const {
  std::ostringstream os;
  os << "lp_ball(n=" << dim_ << ", p=" << p_ << ")";
  return os.str();
}

// --- LinearImage -----------------------------------------------------------

LinearImageNode::LinearImageNode(Matrix map, Body inner) : map_(std::move(map)), inner_(std::move(inner)) {
  if (map_.rows() != map_.cols() || map_.rows() != inner_.dim())
    throw DimensionMismatch("linear_image: map must be square and match the body dimension");
  Eigen::FullPivLU<Matrix> lu(map_);
  if (std::abs(lu.determinant()) < 1e-12 || !lu.isInvertible()) throw SingularMap("linear_image: singular map");
  inverse_ = lu.inverse();
  Eigen::JacobiSVD<Matrix> svd(map_);
  const auto& sv = svd.singularValues();
  condition_ = sv(0) / sv(sv.size() - 1);
}

double LinearImageNode::gauge(const Vector& x) const { return inner_.gauge(inverse_ * x); }
double LinearImageNode::support(const Vector& y) const { return inner_.support(map_.transpose() * y); }

std::optional<Matrix> LinearImageNode::vertices() const {
  auto v = inner_.vertices();
  if (!v) return std::nullopt;
  return Matrix(*v * map_.transpose());
}

std::optional<Matrix> LinearImageNode::facets() const {
  auto f = inner_.facets();
  if (!f) return std::nullopt;
  return Matrix(*f * inverse_);
}

std::string LinearImageNode::describe() const { return "linear_image(" + inner_.describe() + ")"; }

// --- Polar -----------------------------------------------------------------

std::string PolarNode::describe() const { return "polar(" + inner_.describe() + ")"; }

// --- Projection ------------------------------------------------------------

ProjectionNode::ProjectionNode(Body inner, Matrix basis)
    : inner_(std::move(inner)), basis_(std::move(basis)) {
  check_basis(basis_, inner_.dim(), "projection");
  complement_ = orthogonal_complement<double>(basis_);
}

double ProjectionNode::gauge(const Vector& z) const {
  const Vector base = basis_ * z;
  if (complement_.cols() == 0) return inner_.gauge(base);
  if (const auto* h = inner_.as<PolytopeHNode>())
    return lp::min_max_abs_affine(h->normals() * base, h->normals() * complement_);
  auto objective = [&](const Vector& u) { return inner_.gauge(base + complement_ * u); };
  const double scale = std::max(base.norm(), 1e-3);
  return minimize_convex(objective, static_cast<int>(complement_.cols()), scale);
}

std::optional<Matrix> ProjectionNode::vertices() const {
  auto v = inner_.vertices();
  if (!v) return std::nullopt;
  return drop_zero_rows(*v * basis_);
}

std::optional<Matrix> ProjectionNode::facets() const {
  std::call_once(facets_once_, [this] {
    if (auto v = vertices()) {
      try {
        facets_ = vertices_to_halfspaces(*v);
      } catch (const UnsupportedRepresentation&) {
        facets_.reset();
      }
    }
  });
  return facets_;
}

std::string ProjectionNode::describe() const {
  return "projection(" + inner_.describe() + ", d=" + std::to_string(dim()) + ")";
}

// --- Slice -----------------------------------------------------------------

SliceNode::SliceNode(Body inner, Matrix basis)
    : inner_(std::move(inner)),
      basis_(std::move(basis)),
      dual_(std::make_shared<ProjectionNode>(polar(inner_), basis_)) {}

std::optional<Matrix> SliceNode::facets() const {
  auto f = inner_.facets();
  if (!f) return std::nullopt;
  return drop_zero_rows(*f * basis_);
}

std::optional<Matrix> SliceNode::vertices() const {
  std::call_once(vertices_once_, [this] {
    if (auto f = facets()) {
      try {
        vertices_ = halfspace_to_vertices(*f);
      } catch (const UnsupportedRepresentation&) {
        vertices_.reset();
      }
    }
  });
  return vertices_;
}

std::string SliceNode::describe() const {
  return "slice(" + inner_.describe() + ", d=" + std::to_string(dim()) + ")";
}

// --- Constructors ----------------------------------------------------------

Body ellipsoid_body(const Ellipsoid& e) { return Body(std::make_shared<EllipsoidNode>(e)); }
Body polytope_h(Matrix normals) { return Body(std::make_shared<PolytopeHNode>(std::move(normals))); }
Body polytope_v(Matrix vertices) { return Body(std::make_shared<PolytopeVNode>(std::move(vertices))); }
Body lp_ball(int dim, double p) { return Body(std::make_shared<LpBallNode>(dim, p)); }
Body cube(int dim) { return polytope_h(Matrix::Identity(dim, dim)); }
Body cross_polytope(int dim) { return polytope_v(Matrix::Identity(dim, dim)); }
Body unit_ball(int dim) { return ellipsoid_body(Ellipsoid::unit_ball(dim)); }

Body oracle_body(int dim, OracleNode::Fn gauge, OracleNode::Fn support, std::string name) {
  return Body(std::make_shared<OracleNode>(dim, std::move(gauge), std::move(support), std::move(name)));
}

// --- Operations ------------------------------------------------------------

Body polar(const Body& body) {
  switch (body.kind()) {
    case BodyKind::Ellipsoid:
      return ellipsoid_body(body.as<EllipsoidNode>()->ellipsoid().polar());
    case BodyKind::PolytopeH:
      return polytope_v(body.as<PolytopeHNode>()->normals());
    case BodyKind::PolytopeV:
      return polytope_h(body.as<PolytopeVNode>()->generators());
    case BodyKind::LpBall: {
      const auto* lp = body.as<LpBallNode>();
      return lp_ball(lp->dim(), lp->dual_exponent());
    }
    case BodyKind::LinearImage: {
      const auto* li = body.as<LinearImageNode>();
      const Matrix inv_t = li->map().inverse().transpose();
      return linear_image(inv_t, polar(li->inner()));
    }
    case BodyKind::Polar:
      return body.as<PolarNode>()->inner();
    case BodyKind::Slice: {
      const auto* s = body.as<SliceNode>();
      return project_by_basis(polar(s->inner()), s->basis());
    }
    case BodyKind::Projection: {
      const auto* p = body.as<ProjectionNode>();
      return slice_by_basis(polar(p->inner()), p->basis());
    }
    case BodyKind::Oracle:
      break;
  }
  return Body(std::make_shared<PolarNode>(body));
}

Body linear_image(const Matrix& map, const Body& body) {
  if (map.rows() != body.dim() || map.cols() != body.dim())
    throw DimensionMismatch("linear_image: map must be square and match the body dimension");
  Eigen::FullPivLU<Matrix> lu(map);
  if (std::abs(lu.determinant()) < 1e-12 || !lu.isInvertible()) throw SingularMap("linear_image: singular map");
  switch (body.kind()) {
    case BodyKind::Ellipsoid:
      return ellipsoid_body(body.as<EllipsoidNode>()->ellipsoid().image(map));
    case BodyKind::PolytopeH:
      return polytope_h(body.as<PolytopeHNode>()->normals() * lu.inverse());
    case BodyKind::PolytopeV:
      return polytope_v(body.as<PolytopeVNode>()->generators() * map.transpose());
    case BodyKind::LinearImage: {
      const auto* li = body.as<LinearImageNode>();
      return linear_image(map * li->map(), li->inner());
    }
    case BodyKind::LpBall:
      if (body.as<LpBallNode>()->p() == 2.0) return ellipsoid_body(Ellipsoid::unit_ball(body.dim()).image(map));
      break;
    default:
      break;
  }
  return Body(std::make_shared<LinearImageNode>(map, body));
}

Body slice_by_basis(const Body& body, const Matrix& basis) {
  check_basis(basis, body.dim(), "slice");
  switch (body.kind()) {
    case BodyKind::Ellipsoid:
      return ellipsoid_body(body.as<EllipsoidNode>()->ellipsoid().slice(basis));
    case BodyKind::PolytopeH:
      return polytope_h(drop_zero_rows(body.as<PolytopeHNode>()->normals() * basis));
    case BodyKind::LpBall: {
      const double p = body.as<LpBallNode>()->p();
      if (p == 2.0) return unit_ball(static_cast<int>(basis.cols()));
      if (std::isinf(p)) return slice_by_basis(cube(body.dim()), basis);
      break;
    }
    case BodyKind::Slice: {
      const auto* s = body.as<SliceNode>();
      return slice_by_basis(s->inner(), s->basis() * basis);
    }
    default:
      break;
  }
  return Body(std::make_shared<SliceNode>(body, basis));
}

Body project_by_basis(const Body& body, const Matrix& basis) {
  check_basis(basis, body.dim(), "project");
  switch (body.kind()) {
    case BodyKind::Ellipsoid:
      return ellipsoid_body(body.as<EllipsoidNode>()->ellipsoid().project(basis));
    case BodyKind::PolytopeV:
      return polytope_v(drop_zero_rows(body.as<PolytopeVNode>()->generators() * basis));
    case BodyKind::LpBall: {
      const double p = body.as<LpBallNode>()->p();
      if (p == 2.0) return unit_ball(static_cast<int>(basis.cols()));
      if (p == 1.0) return project_by_basis(cross_polytope(body.dim()), basis);
      break;
    }
    case BodyKind::Projection: {
      const auto* p = body.as<ProjectionNode>();
      return project_by_basis(p->inner(), p->basis() * basis);
    }
    default:
      break;
  }
  return Body(std::make_shared<ProjectionNode>(body, basis));
}

Body slice(const Body& body, const Subspace& subspace) {
  if (subspace.ambient_dim() != body.dim()) throw DimensionMismatch("slice: subspace ambient dimension");
  return slice_by_basis(body, subspace.basis());
}

Body project(const Body& body, const Subspace& subspace) {
  if (subspace.ambient_dim() != body.dim()) throw DimensionMismatch("project: subspace ambient dimension");
  return project_by_basis(body, subspace.basis());
}

}  // namespace sq
