// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sq/engine.hpp"
#include "sq/inequalities.hpp"

using namespace sq;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      else detail.str("");
      pass = false;
      detail << what;
    }
  }
};

bool within_sigma(double a, double sa, double b, double sb, double k = 3.0) {
  return std::abs(a - b) <= k * std::hypot(sa, sb) + 1e-12 * std::max(std::abs(a), std::abs(b));
}

Matrix gaussian_matrix(int rows, int cols, RngStream& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

// Well-conditioned random map.
Matrix random_map(int n, RngStream& rng) { return gaussian_matrix(n, n, rng) / std::sqrt(n) + 1.5 * Matrix::Identity(n, n); }

Ellipsoid random_ellipsoid(int n, RngStream& rng) {
  const Matrix a = gaussian_matrix(n, n, rng);
  return Ellipsoid(a * a.transpose() / n + 0.3 * Matrix::Identity(n, n));
}

double lp_norm(const Vector& x, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)), p);
  return std::pow(s, 1.0 / p);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// 1. Omega_k closed forms.
void c1(Outcome& o) {
  const double pi = std::numbers::pi;
  const double expected[] = {2.0, pi, 4.0 * pi / 3.0, pi * pi / 2.0};
  double worst = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double rel = std::abs(unit_ball_volume(k) - expected[k - 1]) / expected[k - 1];
    worst = std::max(worst, rel);
    o.expect(rel <= 1e-12, "Omega_" + std::to_string(k) + " rel error " + fmt(rel));
  }
  for (int k = 5; k <= 20; ++k) {
    const double rel = std::abs(unit_ball_volume(k) - oracle::omega(k)) / oracle::omega(k);
    o.expect(rel <= 1e-12, "Omega_" + std::to_string(k) + " vs recursion");
  }
  if (o.pass) o.detail << "max rel error " << fmt(worst);
}

// 2. Sphere-integral volume vs exact volume.
void c2(Outcome& o) {
  RngStream bodies(2, 0);
  int checks = 0;
  double worst_z = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const Ellipsoid e = random_ellipsoid(n, bodies);
    struct Case {
      std::string name;
      Body body;
      double exact;
    };
    const Case cases[] = {
        {"cube", cube(n), oracle::cube_volume(n)},
        {"cross", cross_polytope(n), oracle::cross_volume(n)},
        {"l3", lp_ball(n, 3.0), oracle::lp_ball_volume(n, 3.0)},
        {"ellipsoid", ellipsoid_body(e), oracle::omega(n) / std::sqrt(e.form().determinant())},
    };
    for (const auto& c : cases) {
      const auto ex = exact_volume(c.body);
      o.expect(ex && std::abs(*ex - c.exact) <= 1e-9 * c.exact, c.name + std::to_string(n) + " exact_volume");
      const auto mc = mc_volume(c.body, Ellipsoid::unit_ball(n), 100000, RngStream(20 + n, checks));
      const double z = std::abs(mc.value - c.exact) / mc.std_error;
      worst_z = std::max(worst_z, z);
      o.expect(within_sigma(mc.value, mc.std_error, c.exact, 0.0),
               c.name + std::to_string(n) + " z=" + fmt(z));
      ++checks;
    }
  }
  if (o.pass) o.detail << checks << " bodies, max |z| " << fmt(worst_z);
}

// 3. Moment identity.
void c3(Outcome& o) {
  int checks = 0;
  double worst_z = 0.0;
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k <= 2; ++k)
      for (const auto& [name, body] : {std::pair<std::string, Body>{"cube", cube(n)}, {"cross", cross_polytope(n)}}) {
        const auto m = mc_gauge_moment(body, Ellipsoid::unit_ball(n), k, 100000, RngStream(3, checks++));
        const double z = std::abs(m.lhs.value - m.rhs.value) / std::hypot(m.lhs.std_error, m.rhs.std_error);
        worst_z = std::max(worst_z, z);
        o.expect(within_sigma(m.lhs.value, m.lhs.std_error, m.rhs.value, m.rhs.std_error),
                 name + std::to_string(n) + " k=" + std::to_string(k) + " z=" + fmt(z));
      }
  if (o.pass) o.detail << checks << " cases, max |z| " << fmt(worst_z);
}

// 4. Full-sphere vs subspace-averaged integrals.
void c4(Outcome& o) {
  double worst_z = 0.0;
  int id = 0;
  for (const auto& [N, d] : {std::pair{4, 2}, std::pair{6, 3}, std::pair{5, 2}}) {
    const Body c = cube(N);
    auto first = [](const Vector& x) { return x(0) * x(0); };
    auto gpow = [&c, N = N](const Vector& x) { return std::pow(c.gauge(x), -static_cast<double>(N)); };
    const auto a = slice_average_experiment(first, N, d, 200, 500, RngStream(4, id++));
    const auto b = slice_average_experiment(gpow, N, d, 200, 500, RngStream(4, id++));
    for (const auto* r : {&a, &b}) {
      const double z = std::abs(r->full.value - r->averaged.value) / std::hypot(r->full.std_error, r->averaged.std_error);
      worst_z = std::max(worst_z, z);
      o.expect(within_sigma(r->full.value, r->full.std_error, r->averaged.value, r->averaged.std_error),
               "N=" + std::to_string(N) + " z=" + fmt(z));
    }
    const double exact_first = 1.0 / N;
    o.expect(within_sigma(a.full.value, a.full.std_error, exact_first, 0.0), "x1^2 full vs 1/n");
    o.expect(within_sigma(a.averaged.value, a.averaged.std_error, exact_first, 0.0), "x1^2 averaged vs 1/n");
    const double exact_g = oracle::cube_volume(N) / oracle::omega(N);
    o.expect(within_sigma(b.full.value, b.full.std_error, exact_g, 0.0), "gauge power full vs 2^n/Omega_n");
    o.expect(within_sigma(b.averaged.value, b.averaged.std_error, exact_g, 0.0), "gauge power averaged vs 2^n/Omega_n");
  }
  if (o.pass) o.detail << "max |z| full vs averaged " << fmt(worst_z);
}

// 5. Santalo and the reverse bound.
void c5(Outcome& o) {
  auto bodies = default_santalo_bodies(RngStream(5, 0));
  // An oracle-only body forces the Monte Carlo path.
  bodies.emplace_back("l3_oracle4", oracle_body(
                                        4, [](const Vector& x) { return lp_norm(x, 3.0); },
                                        [](const Vector& y) { return lp_norm(y, 1.5); }, "l3 oracle"));
  const auto rows = santalo_sweep(bodies, 100000, RngStream(5, 1));
  int reverse_checked = 0;
  for (const auto& r : rows) {
    o.expect(r.santalo_ok && r.normalized <= 1.0 + 3.0 * r.std_error + 1e-12, r.body + " exceeds Santalo");
    if (r.body.rfind("ellipsoid", 0) == 0)
      o.expect(std::abs(r.normalized - 1.0) <= 3.0 * r.std_error + 1e-9, r.body + " not 1");
    if (r.body == "cube2" || r.body == "cross2") {
      const double target = 8.0 / (std::numbers::pi * std::numbers::pi);
      o.expect(std::abs(r.normalized - target) <= 3.0 * r.std_error + 1e-12, r.body + " != 8/pi^2");
    }
    if (r.n >= 4 && r.n <= 6) {
      const double bound = std::pow(std::log2(static_cast<double>(r.n)), -r.n);
      o.expect(r.normalized + 3.0 * r.std_error >= bound, r.body + " below (log2 n)^-n");
      ++reverse_checked;
    }
  }
  if (o.pass) o.detail << rows.size() << " bodies, reverse bound on " << reverse_checked;
}

// 6. Gamma inequality and discrepancy findings.
void c6(Outcome& o) {
  const auto rows = stirling_table(60);
  for (const auto& r : rows) {
    o.expect(r.f_times_4n > 1.0, "f(" + std::to_string(r.n) + ") 4^n <= 1");
    const double ref = oracle::f(r.n);
    o.expect(std::abs(r.f - ref) <= 1e-10 * ref, "f(" + std::to_string(r.n) + ") vs direct Gamma");
  }
  o.expect(std::abs(rows[0].f_times_4n - 8.0) <= 1e-10 * 8.0, "f(2) 16 != 8");
  o.expect(std::abs(rows[2].f_times_4n - 32.0 / 7.0) <= 1e-10 * 32.0 / 7.0, "f(4) 256 != 32/7");
  for (const auto& r : ratio_check(60)) {
    o.expect(r.computed < 0.25, "ratio >= 1/4 at n=" + std::to_string(r.n));
    const double nn = r.n;
    o.expect(std::abs(r.displayed - (nn * nn + 2 * nn - 3) / (4 * nn * nn + 8 * nn + 3)) <= 1e-15,
             "displayed ratio altered");
  }
  LabReport rep;
  rep.stirling = rows;
  rep.ratios = ratio_check(60);
  for (int n = 1; n <= 15; ++n) rep.beta.push_back(beta_integral_check(n));
  rep.slice_identity.push_back(slice_identity_check(2, unit_ball(4), 20000, RngStream(6, 0)));
  const Json findings = findings_json(rep);
  o.expect(findings.contains("displayed_ratio") && findings["displayed_ratio"]["displayed_over_computed_min"] > 3.99,
           "displayed-ratio finding missing");
  o.expect(findings.contains("slice_identity_constant") &&
               findings["slice_identity_constant"]["displayed"] == "2n/((n-1) Omega_{n+1})",
           "slice-constant finding missing");
  if (o.pass)
    o.detail << "f(2)16=" << fmt(rows[0].f_times_4n) << " f(4)256=" << fmt(rows[2].f_times_4n)
             << " f(60)4^60=" << fmt(rows.back().f_times_4n);
}

// 7. Beta integral.
void c7(Outcome& o) {
  double worst = 0.0;
  for (int n = 1; n <= 15; ++n) {
    const auto b = beta_integral_check(n);
    const double rel = std::abs(b.quadrature - oracle::beta(n)) / oracle::beta(n);
    worst = std::max(worst, rel);
    o.expect(rel <= 1e-10, "n=" + std::to_string(n) + " rel " + fmt(rel));
  }
  if (o.pass) o.detail << "max rel error " << fmt(worst);
}

// 8. John fitting.
void c8(Outcome& o) {
  const double eps = 1e-6;
  const Ellipsoid square = john_inscribed(cube(2), eps);
  const double dev = (square.form() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff();
  o.expect(dev <= eps, "square John ellipsoid deviates by " + fmt(dev));
  for (int n = 2; n <= 4; ++n) {
    const auto c = roundness(cube(n), john_inscribed(cube(n), eps), 1000, RngStream(8, n));
    o.expect(c.exact, "cube" + std::to_string(n) + " not exact");
    o.expect(std::abs(c.s - std::sqrt(n)) <= 1e-9, "cube" + std::to_string(n) + " s=" + fmt(c.s));
  }
  RngStream gen(8, 100);
  for (int t = 0; t < 12; ++t) {
    const int n = 2 + t % 4;
    Body b = t % 3 == 0   ? polytope_v(gaussian_matrix(2 * n + 1, n, gen))
             : t % 3 == 1 ? polytope_h(gaussian_matrix(2 * n + 2, n, gen))
                          : linear_image(random_map(n, gen), lp_ball(n, 1.0 + 3.0 * gen.uniform()));
    const Ellipsoid E = john_inscribed(b, eps);
    const auto m = measure_roundness(b, E, 20000, RngStream(8, 200 + t));
    o.expect(m.inner_max <= 1.0 + 1e-6, "E not inside body " + std::to_string(t));
    o.expect(m.outer_max <= std::sqrt(n) * (1.0 + eps) + 1e-9,
             "body " + std::to_string(t) + " s=" + fmt(m.outer_max) + " > sqrt(n)");
  }
  if (o.pass) o.detail << "square dev " << fmt(dev) << ", 12 random bodies within sqrt(n)(1+eps)";
}

PipelineConfig fast_config() {
  PipelineConfig cfg;
  cfg.search_samples = 10000;
  cfg.witness_samples = 40000;
  return cfg;
}

// 9. Pipeline, k = 0.
void c9(Outcome& o) {
  const auto cfg = fast_config();
  RngStream gen(9, 0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    Body b = t % 3 == 0 ? linear_image(random_map(4, gen), cube(4))
             : t % 3 == 1
                 ? linear_image(random_map(4, gen), lp_ball(4, t % 2 ? 1.0 + 4.0 * gen.uniform()
                                                                     : std::numeric_limits<double>::infinity()))
                 : polytope_v(gaussian_matrix(6 + t % 4, 4, gen));
    try {
      const auto cert = run_theorem(b, 0, 2, cfg, RngStream(90, t));
      worst = std::max(worst, cert.s_final);
      o.expect(cert.verified && cert.s_final <= 256.0 && cert.E_final.dim() == 2,
               "body " + std::to_string(t) + " s_final=" + fmt(cert.s_final));
    } catch (const std::exception& e) {
      o.expect(false, "body " + std::to_string(t) + ": " + e.what());
    }
  }
  const auto ball = run_theorem(unit_ball(4), 0, 2, cfg, RngStream(91, 0));
  o.expect(ball.verified && std::abs(ball.s_final - 1.0) <= 1e-9, "unit ball s_final=" + fmt(ball.s_final));
  if (o.pass) o.detail << "20 bodies, max s_final " << fmt(worst) << ", unit ball s_final " << fmt(ball.s_final);
}

// 10. Pipeline, k = 1.
void c10(Outcome& o) {
  const double r1 = level_bound(1);
  o.expect(std::abs(r1 - 4.0 * std::pow(2.0, 1.5)) <= 1e-12 * r1, "r_1 value");
  o.expect(oracle::bound_recursion_exact(1), "(2 r_1)^{2/3} != 8 symbolically");
  o.expect(std::abs(std::pow(2.0 * r1, 2.0 / 3.0) - 8.0) <= 1e-12, "(2 r_1)^{2/3} != 8 numerically");
  const auto cfg = fast_config();
  RngStream gen(10, 0);
  struct Case {
    std::string name;
    Body body;
    std::optional<Ellipsoid> witness;
  };
  const std::vector<Case> cases = {
      {"cube8", cube(8), std::nullopt},
      {"cross8", cross_polytope(8), std::nullopt},
      {"l3_image8", linear_image(random_map(8, gen), lp_ball(8, 3.0)), std::nullopt},
      {"random_polytope8", polytope_v(gaussian_matrix(14, 8, gen)), std::nullopt},
      {"scaled_cube8", linear_image(6.5 * Matrix::Identity(8, 8), cube(8)), Ellipsoid::unit_ball(8)},
  };
  double worst = 0.0;
  int flips = 0;
  for (std::size_t t = 0; t < cases.size(); ++t) {
    try {
      const auto cert = run_theorem(cases[t].body, 1, 2, cfg, RngStream(100, t), cases[t].witness);
      worst = std::max(worst, cert.s_final);
      for (const auto& step : cert.trace) {
        flips += step.parity_flip;
        o.expect(std::abs(step.witness.ratio_bound - 8.0) <= 1e-12, cases[t].name + " step bound != 8");
      }
      o.expect(cert.verified && cert.s_final <= 256.0 && cert.E_final.dim() == 2,
               cases[t].name + " s_final=" + fmt(cert.s_final));
    } catch (const std::exception& e) {
      o.expect(false, cases[t].name + ": " + e.what());
    }
  }
  if (o.pass) o.detail << cases.size() << " bodies, max s_final " << fmt(worst) << ", dual flips " << flips;
}

// 11. Automatic-level driver.
void c11(Outcome& o) {
  const auto cfg = fast_config();
  RngStream gen(11, 0);
  const std::vector<std::pair<std::string, Body>> cases = {
      {"cube4", cube(4)},
      {"cross6", cross_polytope(6)},
      {"random_polytope6", polytope_v(gaussian_matrix(10, 6, gen))},
      {"cube8", cube(8)},
      {"l3_image8", linear_image(random_map(8, gen), lp_ball(8, 3.0))},
  };
  std::ostringstream dims;
  for (std::size_t t = 0; t < cases.size(); ++t) {
    const auto& [name, body] = cases[t];
    try {
      const auto cert = run_corollary(body, cfg, RngStream(110, t));
      const double q = cert.corollary.at("q").get<double>();
      int k = 0;
      while (4.0 * std::pow(2.0, std::pow(1.5, k)) < std::sqrt(q)) ++k;
      const int N = body.dim();
      const int expected = N / (1 << (k + 1));
      o.expect(cert.corollary.at("k").get<int>() == k, name + " wrong k");
      o.expect(cert.E_final.dim() == expected, name + " dimension " + std::to_string(cert.E_final.dim()));
      o.expect(q <= std::sqrt(N) * (1.0 + cfg.eps) + 1e-9, name + " John roundness exceeds sqrt(N)");
      o.expect(cert.verified && cert.s_final <= 256.0, name + " not verified");
      dims << name << "->" << cert.E_final.dim() << " ";
    } catch (const std::exception& e) {
      o.expect(false, name + ": " + e.what());
    }
  }
  if (o.pass) o.detail << dims.str();
}

double max_gap(const Body& a, const Body& b, RngStream rng, bool support = false) {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vector u = sphere_sample(a.dim(), rng);
    const double x = support ? a.support(u) : a.gauge(u);
    const double y = support ? b.support(u) : b.gauge(u);
    worst = std::max(worst, std::abs(x - y) / std::abs(x));
  }
  return worst;
}

// 12. Duality and frame algebra.
void c12(Outcome& o) {
  RngStream gen(12, 0);
  double worst = 0.0;
  auto oracle_of = [](const Body& b) {
    return oracle_body(
        b.dim(), [b](const Vector& x) { return b.gauge(x); }, [b](const Vector& y) { return b.support(y); },
        "wrapped");
  };
  const std::vector<Body> bodies = {cube(4), cross_polytope(4), polytope_v(gaussian_matrix(9, 4, gen)),
                                    lp_ball(4, 3.0), ellipsoid_body(random_ellipsoid(4, gen)),
                                    linear_image(random_map(4, gen), lp_ball(4, 1.5))};
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const Body& K = bodies[i];
    // polar∘polar through generic wrappers, so no simplification applies.
    const Body twice = polar(oracle_of(polar(oracle_of(K))));
    const double g = max_gap(K, twice, RngStream(120, i));
    worst = std::max(worst, g);
    o.expect(g <= 1e-6, "polar polar gap " + fmt(g));
    // (K ∩ W)° = P_W K°, with the left side evaluated on the generic path.
    RngStream s = gen.split(i);
    const Subspace W = haar_subspace(4, 2, s);
    const Body lhs = polar(slice(oracle_of(K), W));
    const Body rhs = project(polar(K), W);
    const double d1 = max_gap(lhs, rhs, RngStream(121, i));
    const double d2 = max_gap(lhs, rhs, RngStream(122, i), true);
    worst = std::max({worst, d1, d2});
    o.expect(d1 <= 1e-6 && d2 <= 1e-6, "slice/projection duality gap " + fmt(std::max(d1, d2)));
  }
  // Frame reconstruction against the pipeline body, including dual branches.
  const auto cfg = fast_config();
  int dual_runs = 0;
  const std::vector<std::tuple<std::string, Body, std::optional<Ellipsoid>, int>> runs = {
      {"cube4", linear_image(random_map(4, gen), cube(4)), std::nullopt, 0},
      {"scaled_cube8", linear_image(6.5 * Matrix::Identity(8, 8), cube(8)), Ellipsoid::unit_ball(8), 1},
      {"ball8", ellipsoid_body(Ellipsoid::ball(8, 10.0)), Ellipsoid::unit_ball(8), 1},
      {"random_polytope8", polytope_v(gaussian_matrix(14, 8, gen)), std::nullopt, 1},
  };
  for (std::size_t t = 0; t < runs.size(); ++t) {
    const auto& [name, body, witness, k] = runs[t];
    try {
      const auto cert = run_theorem(body, k, 2, cfg, RngStream(123, t), witness);
      dual_runs += cert.frame.parity == Parity::Dual ||
                   std::any_of(cert.trace.begin(), cert.trace.end(), [](const auto& s) { return s.parity_flip; });
      const Body rebuilt = cert.frame.reconstruct(body);
      const double g = max_gap(*cert.final_body, rebuilt, RngStream(124, t));
      worst = std::max(worst, g);
      o.expect(g <= 1e-6 && cert.report.frame_mismatch <= 1e-6, name + " frame gap " + fmt(g));
      const auto rep = verify_certificate(body, cert, 1000, RngStream(125, t));
      o.expect(rep.pass, name + " verification failed");
      TheoremCertificate halved = cert;
      halved.s_final = cert.s_final / 2.0;
      const auto neg = verify_certificate(body, halved, 1000, RngStream(126, t));
      o.expect(!neg.pass && std::abs(neg.outer_violation - 2.0) <= 1e-6, name + " halved s_final not rejected");
    } catch (const std::exception& e) {
      o.expect(false, name + ": " + e.what());
    }
  }
  o.expect(dual_runs >= 2, "fewer than two dual-branch runs: " + std::to_string(dual_runs));
  if (o.pass) o.detail << "max relative gap " << fmt(worst) << ", dual-branch runs " << dual_runs;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"Omega_k closed forms", c1},
      {"sphere-integral volume identity", c2},
      {"gauge moment identity", c3},
      {"subspace averaging", c4},
      {"Santalo products and reverse bound", c5},
      {"Gamma-ratio inequality and findings", c6},
      {"beta integral quadrature", c7},
      {"John fitting and sqrt(n) roundness", c8},
      {"subquotient, k = 0", c9},
      {"subquotient, k = 1", c10},
      {"corollary driver", c11},
      {"duality and frame algebra", c12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed;
}
