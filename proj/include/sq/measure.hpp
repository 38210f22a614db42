#pragma once

// Volume functionals. Every Monte Carlo routine works in the coordinates in
// which the reference ellipsoid is the Euclidean unit ball, integrates
// against the normalized rotation-invariant measure on the unit sphere, and
// accumulates the integrand in log space.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sq/bodies.hpp"
#include "sq/body_json.hpp"

namespace sq {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
};

Json to_json(const McEstimate& e);
McEstimate mc_estimate_from_json(const Json& j);

inline constexpr long kMcChunk = 4096;

// Mean and standard error of exp(log_values), computed stably.
McEstimate log_space_mean(std::span<const double> log_values);

// Omega_k = pi^{k/2} / Gamma(k/2 + 1).
double unit_ball_volume(int k);
double log_unit_ball_volume(int k);
std::vector<double> omega_table(int k_max);

// Vol K = Omega_n * mean over the sphere of gauge^{-n}.
McEstimate mc_volume(const Body& body, const Ellipsoid& reference, long samples, const RngStream& rng);

// Mean over the unit sphere of gauge_K(x)^{-exponent}, for K already in
// normalized coordinates.
McEstimate sphere_mean_inverse_power(const Body& body, double exponent, long samples, const RngStream& rng);

struct MomentEstimate {
  McEstimate lhs;  // integral over K of ||x||_E^k, sampled inside K along rays
  McEstimate rhs;  // n Omega_n / (n + k) * sphere mean of gauge^{-(n+k)}
};
MomentEstimate mc_gauge_moment(const Body& body, const Ellipsoid& reference, int k_exp, long samples,
                               const RngStream& rng);

// Integral over K of f(x), with K in normalized coordinates, from points
// x = r^{1/n} u / gauge(u) weighted by gauge(u)^{-n}.
McEstimate ray_integral(const Body& body, const std::function<double(const Vector&)>& f, long samples,
                        const RngStream& rng);

struct AveragingResult {
  McEstimate full;
  McEstimate averaged;
};
AveragingResult slice_average_experiment(const std::function<double(const Vector&)>& f, int ambient_dim,
                                         int d, long outer, long inner, const RngStream& rng);

// Closed-form volume when available.
std::optional<double> exact_volume(const Body& body);

}  // namespace sq
