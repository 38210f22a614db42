#include "sq/fitting.hpp"

#include <cmath>
#include <limits>

namespace sq {
namespace {

constexpr int kAscentHalvings = 20;

Body normalized(const Body& body, const Ellipsoid& E) {
  if (body.dim() != E.dim()) throw DimensionMismatch("ellipsoid and body dimensions differ");
  if (E.form().isIdentity(0.0)) return body;
  return linear_image(E.normalizer(), body);
}

// Local ascent of h over the unit sphere, starting from u.
Vector sphere_ascent(const std::function<double(const Vector&)>& h, Vector u, double& value) {
  const int n = static_cast<int>(u.size());
  if (n == 1) return u;
  double step = 0.05;
  int halvings = 0;
  for (int round = 0; round < 400 && halvings < kAscentHalvings; ++round) {
    const Matrix tangent = orthogonal_complement<double>(Matrix(u));
    bool improved = false;
    for (Eigen::Index j = 0; j < tangent.cols(); ++j) {
      for (double sign : {1.0, -1.0}) {
        Vector cand = (u + sign * step * tangent.col(j)).normalized();
        const double v = h(cand);
        if (v > value) {
          value = v;
          u = cand;
          improved = true;
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      ++halvings;
    }
  }
  return u;
}

}  // namespace

std::string_view to_string(Parity p) { return p == Parity::Primal ? "primal" : "dual"; }

Parity parity_from_string(const std::string& s) {
  if (s == "primal") return Parity::Primal;
  if (s == "dual") return Parity::Dual;
  throw InvalidArgument("unknown parity '" + s + "'");
}

Json to_json(const RoundnessCertificate& c) {
  return Json{{"E", matrix_to_json(c.E.form())},
              {"s", c.s},
              {"inner_check", c.inner_check},
              {"outer_check", c.outer_check},
              {"probes", c.probes},
              {"exact", c.exact},
              {"seed", c.seed},
              {"tolerance", kContainmentTol}};
}

Json to_json(const SemiroundWitness& w) {
  return Json{{"target", std::string(to_string(w.target))},
              {"E", matrix_to_json(w.E.form())},
              {"ratio_bound", w.ratio_bound},
              {"measured_ratio", to_json(w.measured_ratio)}};
}

Ellipsoid mvee(const Matrix& points, double eps) {
  const auto m = points.rows();
  const auto n = points.cols();
  if (m == 0 || n == 0) throw Degenerate("mvee: no points");
  if (!(eps > 0)) throw InvalidArgument("mvee: eps must be positive");
  {
    Eigen::ColPivHouseholderQR<Matrix> qr(points);
    qr.setThreshold(1e-12);
    if (qr.rank() < n) throw Degenerate("mvee: points do not span the space");
  }
  const double dn = static_cast<double>(n);
  const double delta = std::pow(1.0 + eps, 2.0 / dn) - 1.0;

  Vector u = Vector::Constant(m, 1.0 / static_cast<double>(m));
  Matrix xinv;
  Vector lev(m);  // leverage v_i^T X^{-1} v_i
  auto refresh = [&] {
    Matrix x = points.transpose() * u.asDiagonal() * points;
    xinv = x.ldlt().solve(Matrix::Identity(n, n));
    lev = (points * xinv).cwiseProduct(points).rowwise().sum();
  };
  refresh();
  for (long iter = 1; iter <= 200000; ++iter) {
    Eigen::Index up = 0;
    const double lmax = lev.maxCoeff(&up);
    if (lmax <= dn * (1.0 + delta)) break;
    Eigen::Index down = -1;
    double lmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i)
      if (u(i) > 0 && lev(i) < lmin) {
        lmin = lev(i);
        down = i;
      }
    Eigen::Index j = up;
    double tau = (lmax - dn) / (dn * (lmax - 1.0));
    if (down >= 0 && dn - lmin > lmax - dn) {
      j = down;
      const double drop = -u(j) / (1.0 - u(j));
      tau = lmin > 1.0 ? std::max((lmin - dn) / (dn * (lmin - 1.0)), drop) : drop;
    }
    const double w = tau / (1.0 - tau);
    const double denom = 1.0 + w * lev(j);
    if (!(denom > 1e-12)) {
      j = up;
      tau = (lmax - dn) / (dn * (lmax - 1.0));
    }
    const double wj = tau / (1.0 - tau);
    const Vector xv = xinv * points.row(j).transpose();
    const double dj = 1.0 + wj * lev(j);
    const Vector cross = points * xv;
    xinv = (xinv - (wj / dj) * xv * xv.transpose()) / (1.0 - tau);
    lev = (lev - (wj / dj) * cross.cwiseAbs2()) / (1.0 - tau);
    u *= (1.0 - tau);
    u(j) += tau;
    if (u(j) < 1e-15) u(j) = 0.0;
    if (iter % 64 == 0) refresh();
  }
  refresh();
  const double lmax = lev.maxCoeff();
  Matrix q = xinv / lmax;
  q = 0.5 * (q + q.transpose());
  return Ellipsoid(q);
}

Ellipsoid john_inscribed(const Body& body, double eps) {
  std::optional<Ellipsoid> e;
  switch (body.kind()) {
    case BodyKind::Ellipsoid:
      return body.as<EllipsoidNode>()->ellipsoid();
    case BodyKind::PolytopeH:
      e = mvee(body.as<PolytopeHNode>()->normals(), eps).polar();
      break;
    case BodyKind::PolytopeV:
      e = mvee(vertices_to_halfspaces(body.as<PolytopeVNode>()->generators()), eps).polar();
      break;
    case BodyKind::LpBall: {
      // Invariant under coordinate permutations and sign changes, so the
      // John ellipsoid is the inscribed Euclidean ball.
      const auto* lp = body.as<LpBallNode>();
      const double n = lp->dim();
      const double radius = lp->p() >= 2.0 ? std::pow(n, 1.0 / lp->p() - 0.5) : 1.0;
      return Ellipsoid::ball(lp->dim(), radius);
    }
    case BodyKind::LinearImage: {
      const auto* li = body.as<LinearImageNode>();
      e = john_inscribed(li->inner(), eps).image(li->map());
      break;
    }
    default:
      throw UnsupportedRepresentation("john_inscribed: unsupported representation " +
                                      std::string(to_string(body.kind())));
  }
  const auto check = measure_roundness(body, *e, 2000, RngStream(0x10C4ULL, 1));
  if (check.inner_max > 1.0) return e->scaled(1.0 / check.inner_max);
  return *e;
}

RoundnessMeasurement measure_roundness(const Body& body, const Ellipsoid& E, long probes, const RngStream& rng) {
  if (probes < 1) throw InvalidArgument("probe count must be positive");
  const Body k = normalized(body, E);
  const int n = body.dim();
  RoundnessMeasurement out;
  out.probes = probes;

  if (const auto* el = k.as<EllipsoidNode>()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(el->ellipsoid().form());
    out.inner_max = std::sqrt(eig.eigenvalues().maxCoeff());
    out.outer_max = 1.0 / std::sqrt(eig.eigenvalues().minCoeff());
    out.farthest = E.normalizer_inverse() * (out.outer_max * eig.eigenvectors().col(0));
    out.inner_exact = out.outer_exact = true;
    return out;
  }
  if (const auto* h = k.as<PolytopeHNode>()) {
    out.inner_max = h->normals().rowwise().norm().maxCoeff();
    out.inner_exact = true;
  }
  if (const auto v = k.vertices()) {
    Eigen::Index best = 0;
    out.outer_max = v->rowwise().norm().maxCoeff(&best);
    out.farthest = E.normalizer_inverse() * v->row(best).transpose();
    out.outer_exact = true;
  }
  if (out.inner_exact && out.outer_exact) return out;

  RngStream stream = rng;
  double best_inner = -1.0, best_outer = -1.0;
  Vector arg_inner, arg_outer;
  for (long i = 0; i < probes; ++i) {
    const Vector u = sphere_sample(n, stream);
    const double g = k.gauge(u);
    if (g > best_inner) {
      best_inner = g;
      arg_inner = u;
    }
    const double ratio = 1.0 / g;
    if (ratio > best_outer) {
      best_outer = ratio;
      arg_outer = u;
    }
  }
  if (!out.inner_exact) {
    sphere_ascent([&](const Vector& u) { return k.gauge(u); }, arg_inner, best_inner);
    out.inner_max = best_inner;
  }
  if (!out.outer_exact) {
    const Vector u = sphere_ascent([&](const Vector& x) { return 1.0 / k.gauge(x); }, arg_outer, best_outer);
    out.outer_max = best_outer;
    out.farthest = E.normalizer_inverse() * (u * best_outer);
  }
  return out;
}

RoundnessCertificate roundness(const Body& body, const Ellipsoid& E, long probes, const RngStream& rng) {
  const auto m = measure_roundness(body, E, probes, rng);
  if (m.inner_max > 1.0 + kContainmentTol)
    throw InnerContainmentFailed("ellipsoid is not contained in the body: boundary gauge " +
                                 std::to_string(m.inner_max));
  RoundnessCertificate c{E, std::max(1.0, m.outer_max), m.inner_max, m.outer_max, probes, m.outer_exact,
                         rng.seed()};
  return c;
}

McEstimate semiround_ratio(const Body& body, const Ellipsoid& E, long samples, const RngStream& rng) {
  const auto check = measure_roundness(body, E, 2000, rng.split(7));
  if (check.inner_max > 1.0 + kContainmentTol)
    throw InnerContainmentFailed("semiround witness ellipsoid is not contained in the body");
  const int n = body.dim();
  const McEstimate mean = sphere_mean_inverse_power(normalized(body, E), n, samples, rng);
  McEstimate out = mean;
  out.value = std::pow(mean.value, 1.0 / n);
  out.std_error = out.value * mean.std_error / (n * mean.value);
  return out;
}

SemiroundWitness round_to_semiround(const Body& body, const RoundnessCertificate& cert, long samples,
                                    const RngStream& rng) {
  const double q = cert.s;
  const double bound = std::sqrt(q);
  SemiroundWitness w;
  w.ratio_bound = bound;
  const McEstimate primal = semiround_ratio(body, cert.E, samples, rng.split(1));
  if (primal.value <= bound * (1.0 + 1e-12)) {
    w.target = Parity::Primal;
    w.E = cert.E;
    w.measured_ratio = primal;
  } else {
    // K ⊆ qE gives E°/q ⊆ K°; Santalo bounds the dual ratio by q / a.
    w.target = Parity::Dual;
    w.E = cert.E.polar().scaled(1.0 / q);
    w.measured_ratio = semiround_ratio(polar(body), w.E, samples, rng.split(2));
  }
  if (w.measured_ratio.value > w.ratio_bound * (1.0 + 1e-12) + 3.0 * w.measured_ratio.std_error)
    throw WitnessViolated("semiround witness exceeds its bound: " + std::to_string(w.measured_ratio.value) +
                          " > " + std::to_string(w.ratio_bound));
  return w;
}

}  // namespace sq
