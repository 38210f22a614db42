#include "sq/inequalities.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "sq/fitting.hpp"

namespace sq {
namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double z_score(double a, double sa, double b, double sb) {
  const double diff = a - b;
  const double sigma = std::hypot(sa, sb);
  if (std::abs(diff) <= 1e-12 * std::max(std::abs(a), std::abs(b))) return 0.0;
  if (sigma == 0.0) return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  return diff / sigma;
}

McEstimate scaled(McEstimate e, double c) {
  e.value *= c;
  e.std_error *= std::abs(c);
  return e;
}

struct VolumeValue {
  double value;
  double std_error;
  bool exact;
};

VolumeValue volume_of(const Body& body, long samples, const RngStream& rng) {
  if (const auto v = exact_volume(body)) return {*v, 0.0, true};
  const auto e = mc_volume(body, Ellipsoid::unit_ball(body.dim()), samples, rng);
  return {e.value, e.std_error, false};
}

// Sum of |x_i|^{n-1}-type integrands breaks at n = 1 when x = 0; pow(0, 0)
// is 1 in the C library, which is the intended convention.
double power(double x, int e) { return std::pow(std::abs(x), e); }

}  // namespace

double log_gamma_ratio_f(int n) {
  if (n < 2) throw InvalidArgument("f(n) is defined for n >= 2");
  return std::log(2.0) + std::lgamma((n + 3) / 2.0) + log_factorial(n - 2) + log_factorial(n) -
         0.5 * std::log(std::numbers::pi) - std::lgamma((n + 2) / 2.0) - log_factorial(2 * n - 1);
}

double log_gamma_ratio_f_omega(int n) {
  if (n < 2) throw InvalidArgument("f(n) is defined for n >= 2");
  return log_unit_ball_volume(n) + std::log(4.0 * n) + log_factorial(n - 1) + log_factorial(n) -
         log_unit_ball_volume(n + 1) - std::log(n - 1.0) - log_factorial(2 * n);
}

double log_gamma_ratio_f_corrected(int n) {
  return log_gamma_ratio_f(n) + std::log(n - 1.0) - std::log(n + 1.0);
}

std::vector<StirlingRow> stirling_table(int n_max) {
  if (n_max < 2) throw InvalidArgument("stirling_table: n_max must be at least 2");
  std::vector<StirlingRow> rows;
  for (int n = 2; n <= n_max; ++n) {
    StirlingRow row;
    row.n = n;
    const double lf = log_gamma_ratio_f(n);
    row.f = std::exp(lf);
    row.f_omega = std::exp(log_gamma_ratio_f_omega(n));
    row.f_times_4n = std::exp(lf + n * std::log(4.0));
    if (n >= 4) row.ratio_to_prev = std::exp(lf - log_gamma_ratio_f(n - 2));
    row.corrected_times_4n = std::exp(log_gamma_ratio_f_corrected(n) + n * std::log(4.0));
    rows.push_back(row);
  }
  return rows;
}

std::vector<RatioRow> ratio_check(int n_max) {
  if (n_max < 4) throw InvalidArgument("ratio_check: n_max must be at least 4");
  std::vector<RatioRow> rows;
  for (int n = 2; n + 2 <= n_max; ++n) {
    const double nn = n;
    const double num = nn * nn + 2 * nn - 3;
    rows.push_back({n, std::exp(log_gamma_ratio_f(n + 2) - log_gamma_ratio_f(n)),
                    num / (4 * nn * nn + 8 * nn + 3), num / (16 * nn * nn + 32 * nn + 12)});
  }
  return rows;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  struct Rec {
    const std::function<double(double)>& f;
    double go(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
      const double delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
      return go(a, m, fa, flm, fm, left, tol / 2, depth - 1) + go(m, b, fm, frm, fb, right, tol / 2, depth - 1);
    }
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return Rec{f}.go(a, b, fa, fm, fb, whole, tol, 50);
}

BetaCheck beta_integral_check(int n) {
  if (n < 1 || n > 15) throw InvalidArgument("beta_integral_check: 1 <= n <= 15");
  auto integrand = [n](double t) { return std::pow(t, n - 1) * std::pow(1.0 - t, n); };
  // The integral shrinks like 4^{-n}; the tolerance is relative to a coarse
  // estimate of its size.
  const double coarse = adaptive_simpson(integrand, 0.0, 1.0, 1e-3);
  const double tol = 1e-13 * std::abs(coarse);
  BetaCheck out;
  out.n = n;
  out.quadrature = adaptive_simpson(integrand, 0.0, 1.0, tol);
  out.closed_form = std::exp(log_factorial(n - 1) + log_factorial(n) - log_factorial(2 * n));
  out.relative_error = std::abs(out.quadrature - out.closed_form) / out.closed_form;
  return out;
}

SliceIdentityCheck slice_identity_check(int n, const Body& K, long samples, const RngStream& rng) {
  if (K.dim() != 2 * n || n < 2) throw DimensionMismatch("slice_identity_check: need dim K = 2n, n >= 2");
  RngStream stream = rng.split(0);
  const Subspace V = haar_subspace(2 * n, n + 1, stream);
  const Body Kp = slice(K, V);
  SliceIdentityCheck out;
  out.n = n;
  out.lhs = sphere_mean_inverse_power(Kp, 2.0 * n, samples, rng.split(1));
  out.moment = ray_integral(Kp, [n](const Vector& x) { return std::pow(x.norm(), n - 1); }, samples, rng.split(2));
  const double omega = unit_ball_volume(n + 1);
  out.constant_displayed = 2.0 * n / ((n - 1) * omega);
  out.constant_moment = 2.0 * n / ((n + 1) * omega);
  out.rhs_displayed = scaled(out.moment, out.constant_displayed);
  out.rhs_moment = scaled(out.moment, out.constant_moment);
  out.z_displayed = z_score(out.lhs.value, out.lhs.std_error, out.rhs_displayed.value, out.rhs_displayed.std_error);
  out.z_moment = z_score(out.lhs.value, out.lhs.std_error, out.rhs_moment.value, out.rhs_moment.std_error);
  const bool d = std::abs(out.z_displayed) <= 3.0;
  const bool m = std::abs(out.z_moment) <= 3.0;
  out.match = d && m ? "both" : m ? "moment" : d ? "displayed" : "neither";
  return out;
}

Body double_cone(const Body& base, double s) {
  if (!(s > 0)) throw InvalidArgument("double_cone: height must be positive");
  const int n = base.dim();
  return oracle_body(
      n + 1, [base, s, n](const Vector& x) { return base.gauge(x.head(n)) + std::abs(x(n)) / s; },
      [base, s, n](const Vector& y) { return std::max(base.support(y.head(n)), s * std::abs(y(n))); },
      "double_cone(" + base.describe() + ")");
}

Body cylinder(const Body& base, double s) {
  if (!(s > 0)) throw InvalidArgument("cylinder: height must be positive");
  const int n = base.dim();
  return oracle_body(
      n + 1, [base, s, n](const Vector& x) { return std::max(base.gauge(x.head(n)), std::abs(x(n)) / s); },
      [base, s, n](const Vector& y) { return base.support(y.head(n)) + s * std::abs(y(n)); },
      "cylinder(" + base.describe() + ")");
}

SuspensionCheck suspension_bound_check(const Body& base, double s, long samples, const RngStream& rng) {
  const int n = base.dim();
  SuspensionCheck out;
  out.n = n;
  out.s = s;
  const auto vol = volume_of(base, samples, rng.split(0));
  out.base_volume = vol.value;
  const double beta = std::exp(log_factorial(n - 1) + log_factorial(n) - log_factorial(2 * n));
  out.formula = vol.value * std::pow(s, n) * 2.0 * beta;
  const double formula_sigma = vol.std_error * std::pow(s, n) * 2.0 * beta;
  auto axis = [n](const Vector& x) { return power(x(n), n - 1); };
  auto norm = [n](const Vector& x) { return power(x.norm(), n - 1); };
  const Body cone = double_cone(base, s);
  out.cone_axis = ray_integral(cone, axis, samples, rng.split(1));
  out.cone_norm = ray_integral(cone, norm, samples, rng.split(2));
  out.cylinder_axis = ray_integral(cylinder(base, s), axis, samples, rng.split(3));
  out.z_cone = z_score(out.cone_axis.value, out.cone_axis.std_error, out.formula, formula_sigma);
  out.cone_matches = std::abs(out.z_cone) <= 3.0;
  out.norm_exceeds = out.cone_norm.value >= out.formula - 3.0 * std::hypot(out.cone_norm.std_error, formula_sigma);
  out.cylinder_exceeds =
      out.cylinder_axis.value > out.formula + 3.0 * std::hypot(out.cylinder_axis.std_error, formula_sigma);
  return out;
}

std::vector<ProductRow> santalo_sweep(const std::vector<NamedBody>& bodies, long samples, const RngStream& rng) {
  std::vector<ProductRow> rows;
  std::uint64_t id = 0;
  for (const auto& [name, body] : bodies) {
    const int n = body.dim();
    const auto a = volume_of(body, samples, rng.split(id++));
    const auto b = volume_of(polar(body), samples, rng.split(id++));
    ProductRow row;
    row.n = n;
    row.body = name;
    row.mahler = a.value * b.value;
    const double omega = unit_ball_volume(n);
    row.normalized = row.mahler / (omega * omega);
    row.std_error = row.normalized * std::hypot(a.std_error / a.value, b.std_error / b.value);
    row.exact = a.exact && b.exact;
    row.santalo_ok = row.normalized <= 1.0 + 3.0 * row.std_error + 1e-12;
    if (n >= 4) {
      row.reverse_bound = std::pow(std::log2(static_cast<double>(n)), -n);
      row.reverse_ok = row.normalized + 3.0 * row.std_error >= *row.reverse_bound;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<NamedBody> default_santalo_bodies(const RngStream& rng) {
  std::vector<NamedBody> out;
  for (int n = 2; n <= 6; ++n) out.emplace_back("cube" + std::to_string(n), cube(n));
  for (int n = 2; n <= 6; ++n) out.emplace_back("cross" + std::to_string(n), cross_polytope(n));
  for (int n : {2, 4, 5}) out.emplace_back("l3_ball" + std::to_string(n), lp_ball(n, 3.0));
  RngStream stream = rng.split(0);
  for (int n : {2, 4, 6}) {
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = stream.normal();
    const Matrix Q = A * A.transpose() + 0.5 * Matrix::Identity(n, n);
    out.emplace_back("ellipsoid" + std::to_string(n), ellipsoid_body(Ellipsoid(Q)));
  }
  for (int n : {4, 5}) {
    Matrix V(2 * n + 2, n);
    for (Eigen::Index i = 0; i < V.rows(); ++i)
      for (int j = 0; j < n; ++j) V(i, j) = stream.normal();
    out.emplace_back("random_polytope" + std::to_string(n), polytope_v(V));
  }
  return out;
}

std::string stirling_csv(const std::vector<StirlingRow>& rows) {
  std::string out = "n,f,f_omega_form,f_times_4n,ratio_to_n_minus_2,corrected_times_4n\n";
  for (const auto& r : rows)
    out += std::to_string(r.n) + "," + num(r.f) + "," + num(r.f_omega) + "," + num(r.f_times_4n) + "," +
           (r.ratio_to_prev ? num(*r.ratio_to_prev) : std::string()) + "," + num(r.corrected_times_4n) + "\n";
  return out;
}

std::string ratio_csv(const std::vector<RatioRow>& rows) {
  std::string out = "n,computed,displayed,derived,displayed_over_computed\n";
  for (const auto& r : rows)
    out += std::to_string(r.n) + "," + num(r.computed) + "," + num(r.displayed) + "," + num(r.derived) + "," +
           num(r.displayed / r.computed) + "\n";
  return out;
}

std::string beta_csv(const std::vector<BetaCheck>& rows) {
  std::string out = "n,quadrature,closed_form,relative_error\n";
  for (const auto& r : rows)
    out += std::to_string(r.n) + "," + num(r.quadrature) + "," + num(r.closed_form) + "," + num(r.relative_error) +
           "\n";
  return out;
}

std::string santalo_csv(const std::vector<ProductRow>& rows) {
  std::string out = "n,body,mahler,normalized,std_error,exact,santalo_ok,reverse_bound,reverse_ok\n";
  for (const auto& r : rows)
    out += std::to_string(r.n) + "," + r.body + "," + num(r.mahler) + "," + num(r.normalized) + "," +
           num(r.std_error) + "," + (r.exact ? "1" : "0") + "," + (r.santalo_ok ? "1" : "0") + "," +
           (r.reverse_bound ? num(*r.reverse_bound) : std::string()) + "," + (r.reverse_ok ? "1" : "0") + "\n";
  return out;
}

LabReport run_inequality_lab(long samples, const RngStream& rng) {
  LabReport rep;
  rep.stirling = stirling_table(60);
  rep.ratios = ratio_check(60);
  for (int n = 1; n <= 15; ++n) rep.beta.push_back(beta_integral_check(n));

  RngStream bodies = rng.split(0);
  Matrix A(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = bodies.normal();
  const Matrix T = A + 3.0 * Matrix::Identity(4, 4);
  rep.slice_identity.push_back(slice_identity_check(2, unit_ball(4), samples, rng.split(1)));
  rep.slice_identity.push_back(slice_identity_check(2, cube(4), samples, rng.split(2)));
  rep.slice_identity.push_back(slice_identity_check(2, linear_image(T, unit_ball(4)), samples, rng.split(3)));

  rep.suspension.push_back(suspension_bound_check(unit_ball(1), 1.0, samples, rng.split(4)));
  rep.suspension.push_back(suspension_bound_check(unit_ball(2), 2.0, samples, rng.split(5)));
  rep.suspension.push_back(suspension_bound_check(cube(3), 1.5, samples, rng.split(6)));

  rep.santalo = santalo_sweep(default_santalo_bodies(rng.split(7)), samples, rng.split(8));
  return rep;
}

Json findings_json(const LabReport& rep) {
  bool all_above = true, corrected_above = true, decreasing = true;
  for (std::size_t i = 0; i < rep.stirling.size(); ++i) {
    const auto& r = rep.stirling[i];
    all_above = all_above && r.f_times_4n > 1.0;
    corrected_above = corrected_above && r.corrected_times_4n > 1.0;
    if (i >= 2) decreasing = decreasing && r.f_times_4n < rep.stirling[i - 2].f_times_4n;
  }
  double factor_min = std::numeric_limits<double>::infinity(), factor_max = 0.0;
  bool below_quarter = true;
  for (const auto& r : rep.ratios) {
    const double factor = r.displayed / r.computed;
    factor_min = std::min(factor_min, factor);
    factor_max = std::max(factor_max, factor);
    below_quarter = below_quarter && r.computed < 0.25;
  }
  double beta_worst = 0.0;
  for (const auto& b : rep.beta) beta_worst = std::max(beta_worst, b.relative_error);

  Json slice = Json::array();
  for (const auto& c : rep.slice_identity)
    slice.push_back({{"n", c.n},
                     {"lhs", to_json(c.lhs)},
                     {"rhs_displayed_constant", to_json(c.rhs_displayed)},
                     {"rhs_moment_constant", to_json(c.rhs_moment)},
                     {"z_displayed", c.z_displayed},
                     {"z_moment", c.z_moment},
                     {"match", c.match}});
  Json susp = Json::array();
  for (const auto& c : rep.suspension)
    susp.push_back({{"n", c.n},
                    {"s", c.s},
                    {"base_volume", c.base_volume},
                    {"formula", c.formula},
                    {"cone_axis_integral", to_json(c.cone_axis)},
                    {"cone_norm_integral", to_json(c.cone_norm)},
                    {"cylinder_axis_integral", to_json(c.cylinder_axis)},
                    {"z_cone", c.z_cone},
                    {"cone_matches", c.cone_matches},
                    {"norm_exceeds", c.norm_exceeds},
                    {"cylinder_exceeds", c.cylinder_exceeds}});
  bool santalo_ok = true, reverse_ok = true;
  for (const auto& r : rep.santalo) {
    santalo_ok = santalo_ok && r.santalo_ok;
    reverse_ok = reverse_ok && r.reverse_ok;
  }
  const auto& last = rep.stirling.back();
  return Json{
      {"schema", 1},
      {"gamma_inequality",
       {{"n_range", {rep.stirling.front().n, last.n}},
        {"all_f_times_4n_above_1", all_above},
        {"corrected_all_above_1", corrected_above},
        {"decreasing_along_n_plus_2", decreasing},
        {"f2_times_16", rep.stirling[0].f_times_4n},
        {"f4_times_256", rep.stirling[2].f_times_4n}}},
      {"f_times_4n_limit",
       {{"stated", 1.0},
        {"observed_at_n_max", last.f_times_4n},
        {"n_max", last.n},
        {"asymptotic_2_sqrt_2", 2.0 * std::numbers::sqrt2},
        {"status", "observed trend differs from the stated limit; only f(n) 4^n > 1 is used"}}},
      {"displayed_ratio",
       {{"displayed_over_computed_min", factor_min},
        {"displayed_over_computed_max", factor_max},
        {"computed_below_quarter", below_quarter},
        {"status", "displayed expression is 4x the direct evaluation; both tabulated"}}},
      {"slice_identity_constant",
       {{"displayed", "2n/((n-1) Omega_{n+1})"}, {"moment", "2n/((n+1) Omega_{n+1})"}, {"checks", slice}}},
      {"beta_integral", {{"max_relative_error", beta_worst}, {"pass", beta_worst <= 1e-10}}},
      {"suspension", susp},
      {"santalo", {{"all_below_1_plus_3sigma", santalo_ok}, {"reverse_bound_holds", reverse_ok}}}};
}

}  // namespace sq
