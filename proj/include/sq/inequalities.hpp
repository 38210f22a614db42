#pragma once

// Numeric checks of the scalar identities and inequalities behind the
// subquotient estimate. Gamma and factorial arithmetic is done in log space.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sq/bodies.hpp"
#include "sq/measure.hpp"

namespace sq {

// f(n) = 2 Γ((n+3)/2) (n-2)! n! / (√π Γ((n+2)/2) (2n-1)!), n >= 2.
double log_gamma_ratio_f(int n);
// The same quantity from its unsimplified form
// Ω_n 4n (n-1)! n! / (Ω_{n+1} (n-1) (2n)!).
double log_gamma_ratio_f_omega(int n);
// f with the slice-identity constant 2n/((n+1)Ω_{n+1}): f(n) (n-1)/(n+1).
double log_gamma_ratio_f_corrected(int n);

struct StirlingRow {
  int n = 0;
  double f = 0.0;
  double f_omega = 0.0;
  double f_times_4n = 0.0;
  std::optional<double> ratio_to_prev;  // f(n) / f(n-2)
  double corrected_times_4n = 0.0;
};

std::vector<StirlingRow> stirling_table(int n_max);

struct RatioRow {
  int n = 0;
  double computed = 0.0;  // f(n+2) / f(n)
  double displayed = 0.0;  // (n²+2n-3) / (4n²+8n+3)
  double derived = 0.0;    // (n²+2n-3) / (16n²+32n+12)
};

std::vector<RatioRow> ratio_check(int n_max);

// Adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

struct BetaCheck {
  int n = 0;
  double quadrature = 0.0;
  double closed_form = 0.0;  // (n-1)! n! / (2n)!
  double relative_error = 0.0;
};

// ∫_0^1 t^{n-1} (1-t)^n dt, 1 <= n <= 15.
BetaCheck beta_integral_check(int n);

struct SliceIdentityCheck {
  int n = 0;
  McEstimate lhs;       // sphere mean over V' of gauge_K^{-2n}
  McEstimate moment;    // ∫_{K'} |x|^{n-1} dx
  double constant_displayed = 0.0;  // 2n / ((n-1) Ω_{n+1})
  double constant_moment = 0.0;     // 2n / ((n+1) Ω_{n+1})
  McEstimate rhs_displayed;
  McEstimate rhs_moment;
  double z_displayed = 0.0;
  double z_moment = 0.0;
  std::string match;  // "moment", "displayed", "both" or "neither" at 3 sigma
};

// Uses a Haar-random (n+1)-dimensional subspace V' drawn from rng.
SliceIdentityCheck slice_identity_check(int n, const Body& K, long samples, const RngStream& rng);

// conv(K × {0} ∪ {±s e_last}) and K × [-s, s] as oracle bodies.
Body double_cone(const Body& base, double s);
Body cylinder(const Body& base, double s);

struct SuspensionCheck {
  int n = 0;
  double s = 0.0;
  double base_volume = 0.0;
  double formula = 0.0;           // Vol(K'') s^n 2 (n-1)! n! / (2n)!
  McEstimate cone_axis;           // ∫ over the double cone of |x_0|^{n-1}
  McEstimate cone_norm;           // ∫ over the double cone of |x|^{n-1}
  McEstimate cylinder_axis;       // ∫ over the cylinder of |x_0|^{n-1}
  double z_cone = 0.0;
  bool cone_matches = false;      // |z_cone| <= 3
  bool norm_exceeds = false;      // cone_norm >= formula - 3 sigma
  bool cylinder_exceeds = false;  // cylinder_axis > formula + 3 sigma
};

SuspensionCheck suspension_bound_check(const Body& base, double s, long samples, const RngStream& rng);

struct ProductRow {
  int n = 0;
  std::string body;
  double mahler = 0.0;
  double normalized = 0.0;
  double std_error = 0.0;  // of normalized
  bool exact = false;
  bool santalo_ok = false;
  std::optional<double> reverse_bound;  // (log2 n)^{-n} for n >= 4
  bool reverse_ok = true;
};

using NamedBody = std::pair<std::string, Body>;

std::vector<ProductRow> santalo_sweep(const std::vector<NamedBody>& bodies, long samples, const RngStream& rng);
std::vector<NamedBody> default_santalo_bodies(const RngStream& rng);

std::string stirling_csv(const std::vector<StirlingRow>& rows);
std::string ratio_csv(const std::vector<RatioRow>& rows);
std::string beta_csv(const std::vector<BetaCheck>& rows);
std::string santalo_csv(const std::vector<ProductRow>& rows);

struct LabReport {
  std::vector<StirlingRow> stirling;
  std::vector<RatioRow> ratios;
  std::vector<BetaCheck> beta;
  std::vector<SliceIdentityCheck> slice_identity;
  std::vector<SuspensionCheck> suspension;
  std::vector<ProductRow> santalo;
};

LabReport run_inequality_lab(long samples, const RngStream& rng);
Json findings_json(const LabReport& report);

}  // namespace sq
