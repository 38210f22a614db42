#include "sq/measure.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sq/parallel.hpp"

namespace sq {
namespace {

Body normalized(const Body& body, const Ellipsoid& reference) {
  if (body.dim() != reference.dim()) throw DimensionMismatch("reference ellipsoid dimension");
  if (reference.form().isIdentity(0.0)) return body;
  return linear_image(reference.normalizer(), body);
}

double checked_gauge(const Body& body, const Vector& u) {
  const double g = body.gauge(u);
  if (!(g > 0.0) || !std::isfinite(g)) throw NonFiniteGauge("gauge is zero or non-finite on the sphere");
  return g;
}

}  // namespace

Json to_json(const McEstimate& e) {
  return Json{{"value", e.value}, {"std_error", e.std_error}, {"samples", e.samples}, {"seed", e.seed}};
}

McEstimate mc_estimate_from_json(const Json& j) {
  McEstimate e;
  e.value = j.at("value").get<double>();
  e.std_error = j.at("std_error").get<double>();
  e.samples = j.at("samples").get<long>();
  e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

McEstimate log_space_mean(std::span<const double> log_values) {
  McEstimate out;
  const auto n = static_cast<long>(log_values.size());
  out.samples = n;
  if (n == 0) return out;
  double shift = -std::numeric_limits<double>::infinity();
  for (double l : log_values) shift = std::max(shift, l);
  if (!std::isfinite(shift)) return out;
  double sum = 0.0;
  for (double l : log_values) sum += std::exp(l - shift);
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double l : log_values) {
    const double d = std::exp(l - shift) - mean;
    sq += d * d;
  }
  const double var = n > 1 ? sq / static_cast<double>(n - 1) : 0.0;
  const double scale = std::exp(shift);
  out.value = scale * mean;
  out.std_error = scale * std::sqrt(var / static_cast<double>(n));
  return out;
}

double log_unit_ball_volume(int k) {
  if (k < 0) throw InvalidArgument("unit_ball_volume: k must be >= 0");
  return 0.5 * k * std::log(std::numbers::pi) - std::lgamma(0.5 * k + 1.0);
}

double unit_ball_volume(int k) { return std::exp(log_unit_ball_volume(k)); }

std::vector<double> omega_table(int k_max) {
  std::vector<double> table;
  for (int k = 1; k <= k_max; ++k) table.push_back(unit_ball_volume(k));
  return table;
}

McEstimate sphere_mean_inverse_power(const Body& body, double exponent, long samples, const RngStream& rng) {
  if (samples < 1) throw InvalidArgument("sample count must be positive");
  const int n = body.dim();
  std::vector<double> logs(static_cast<std::size_t>(samples));
  for_each_chunk(samples, kMcChunk, [&](long c, long begin, long end) {
    RngStream stream = rng.split(static_cast<std::uint64_t>(c));
    for (long i = begin; i < end; ++i) {
      const Vector u = sphere_sample(n, stream);
      logs[static_cast<std::size_t>(i)] = -exponent * std::log(checked_gauge(body, u));
    }
  });
  McEstimate e = log_space_mean(logs);
  e.seed = rng.seed();
  return e;
}

McEstimate mc_volume(const Body& body, const Ellipsoid& reference, long samples, const RngStream& rng) {
  const Body k = normalized(body, reference);
  const int n = body.dim();
  McEstimate e = sphere_mean_inverse_power(k, n, samples, rng);
  const double factor = std::exp(log_unit_ball_volume(n) - 0.5 * reference.log_det());
  e.value *= factor;
  e.std_error *= factor;
  return e;
}

McEstimate ray_integral(const Body& body, const std::function<double(const Vector&)>& f, long samples,
                        const RngStream& rng) {
  if (samples < 1) throw InvalidArgument("sample count must be positive");
  const int n = body.dim();
  std::vector<double> logs(static_cast<std::size_t>(samples));
  for_each_chunk(samples, kMcChunk, [&](long c, long begin, long end) {
    RngStream stream = rng.split(static_cast<std::uint64_t>(c));
    for (long i = begin; i < end; ++i) {
      const Vector u = sphere_sample(n, stream);
      const double radius = 1.0 / checked_gauge(body, u);
      const double r = 1.0 - stream.uniform();
      const Vector x = std::pow(r, 1.0 / n) * radius * u;
      logs[static_cast<std::size_t>(i)] = n * std::log(radius) + std::log(f(x));
    }
  });
  McEstimate e = log_space_mean(logs);
  const double omega = unit_ball_volume(n);
  e.value *= omega;
  e.std_error *= omega;
  e.seed = rng.seed();
  return e;
}

MomentEstimate mc_gauge_moment(const Body& body, const Ellipsoid& reference, int k_exp, long samples,
                               const RngStream& rng) {
  if (k_exp < 0) throw InvalidArgument("moment exponent must be >= 0");
  const Body k = normalized(body, reference);
  const int n = body.dim();
  const double jacobian = std::exp(-0.5 * reference.log_det());
  MomentEstimate out;
  out.lhs = ray_integral(
      k, [k_exp](const Vector& x) { return std::pow(x.norm(), k_exp); }, samples, rng.split(1));
  out.lhs.value *= jacobian;
  out.lhs.std_error *= jacobian;
  out.rhs = sphere_mean_inverse_power(k, n + k_exp, samples, rng.split(2));
  const double factor = jacobian * n * unit_ball_volume(n) / (n + k_exp);
  out.rhs.value *= factor;
  out.rhs.std_error *= factor;
  out.rhs.seed = out.lhs.seed = rng.seed();
  return out;
}

AveragingResult slice_average_experiment(const std::function<double(const Vector&)>& f, int ambient_dim,
                                         int d, long outer, long inner, const RngStream& rng) {
  if (d < 1 || d >= ambient_dim) throw InvalidArgument("slice_average_experiment: need 1 <= d < ambient_dim");
  if (outer < 2 || inner < 1) throw InvalidArgument("slice_average_experiment: sample counts too small");
  AveragingResult out;

  const long total = outer * inner;
  std::vector<double> full(static_cast<std::size_t>(total));
  const RngStream full_rng = rng.split(1);
  for_each_chunk(total, kMcChunk, [&](long c, long begin, long end) {
    RngStream stream = full_rng.split(static_cast<std::uint64_t>(c));
    for (long i = begin; i < end; ++i) full[static_cast<std::size_t>(i)] = f(sphere_sample(ambient_dim, stream));
  });

  std::vector<double> per_subspace(static_cast<std::size_t>(outer));
  const RngStream outer_rng = rng.split(2);
  for_each_chunk(outer, 64, [&](long, long begin, long end) {
    for (long o = begin; o < end; ++o) {
      RngStream stream = outer_rng.split(static_cast<std::uint64_t>(o));
      const Subspace w = haar_subspace(ambient_dim, d, stream);
      double sum = 0.0;
      for (long i = 0; i < inner; ++i) sum += f(w.embed(sphere_sample(d, stream)));
      per_subspace[static_cast<std::size_t>(o)] = sum / static_cast<double>(inner);
    }
  });

  auto summarize = [&](const std::vector<double>& values) {
    McEstimate e;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    e.value = mean;
    e.std_error = std::sqrt(sq / (n - 1.0) / n);
    e.samples = static_cast<long>(values.size());
    e.seed = rng.seed();
    return e;
  };
  out.full = summarize(full);
  out.averaged = summarize(per_subspace);
  out.averaged.samples = total;
  return out;
}

std::optional<double> exact_volume(const Body& body) {
  const int n = body.dim();
  switch (body.kind()) {
    case BodyKind::Ellipsoid:
      return std::exp(log_unit_ball_volume(n) - 0.5 * body.as<EllipsoidNode>()->ellipsoid().log_det());
    case BodyKind::LpBall: {
      const double p = body.as<LpBallNode>()->p();
      if (std::isinf(p)) return std::ldexp(1.0, n);
      return std::exp(n * std::log(2.0 * std::tgamma(1.0 + 1.0 / p)) - std::lgamma(1.0 + n / p));
    }
    case BodyKind::PolytopeH: {
      const Matrix& a = body.as<PolytopeHNode>()->normals();
      if (a.rows() == n) return std::ldexp(1.0, n) / std::abs(a.determinant());
      if (n > 6) return std::nullopt;
      const auto v = body.vertices();
      if (!v) return std::nullopt;
      return symmetric_polytope_volume(*v, a);
    }
    case BodyKind::PolytopeV: {
      const Matrix& v = body.as<PolytopeVNode>()->generators();
      if (v.rows() == n) return std::ldexp(1.0, n) * std::abs(v.determinant()) / std::tgamma(n + 1.0);
      if (n > 6) return std::nullopt;
      try {
        return symmetric_polytope_volume(v, vertices_to_halfspaces(v));
      } catch (const UnsupportedRepresentation&) {
        return std::nullopt;
      }
    }
    case BodyKind::LinearImage: {
      const auto* li = body.as<LinearImageNode>();
      const auto inner = exact_volume(li->inner());
      if (!inner) return std::nullopt;
      return *inner * std::abs(li->map().determinant());
    }
    default:
      return std::nullopt;
  }
}

}  // namespace sq
