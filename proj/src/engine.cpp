#include "sq/engine.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sq {
namespace {

constexpr double kFrameTol = 1e-6;
constexpr double kSubspaceTol = 1e-10;

long probe_count(const PipelineConfig& cfg, int dim) {
  return cfg.probes > 0 ? cfg.probes : default_probe_count(dim);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Distance of the columns of X from span(B), B orthonormal.
double outside(const Matrix& X, const Matrix& B) {
  if (X.cols() == 0) return 0.0;
  if (B.cols() == 0) return X.colwise().norm().maxCoeff();
  return (X - B * (B.transpose() * X)).colwise().norm().maxCoeff();
}

// Body reached after one claim step, normalized so its witness is the unit
// ball, plus the map applied.
struct Normalized {
  Body body;
  Matrix map;
};

Normalized normalize_to_witness(const Body& body, const Ellipsoid& E) {
  const Matrix R = E.normalizer();
  return {linear_image(R, body), R};
}

struct BaseResult {
  Body K2;
  Matrix slice_basis;
  SubspaceSearch search;
  FarthestPoint far;
  Ellipsoid E_final;
  double s_final = 1.0;
};

BaseResult base_step(const Body& body, const PipelineConfig& cfg, const RngStream& rng) {
  const int N = body.dim();
  if (N % 2 != 0 || N < 2) throw DimensionMismatch("base step needs an even dimension >= 2");
  const int n = N / 2;
  const double r = level_bound(0);
  auto search = find_good_subspace(body, r, cfg.slack, cfg.search_samples, cfg.max_tries, rng.split(1));
  const Body Kp = slice(body, search.subspace);
  auto far = farthest_point(Kp, probe_count(cfg, n + 1), rng.split(2));
  if (far.s > kRoundnessBound * (1.0 + cfg.slack_s))
    throw BoundViolated("farthest-point norm " + fmt(far.s) + " exceeds " + fmt(kRoundnessBound));
  const Matrix Z = orthogonal_complement<double>(Matrix(far.p.normalized()));
  const Matrix P = search.subspace.basis() * Z;
  Body K2 = slice_by_basis(body, P);
  if (n == 1) {
    const double g = K2.gauge(Vector::Ones(1));
    Matrix q(1, 1);
    q(0, 0) = g * g;
    return {K2, P, std::move(search), std::move(far), Ellipsoid(q), 1.0};
  }
  const auto cert = roundness(K2, Ellipsoid::unit_ball(n), probe_count(cfg, n), rng.split(3));
  return {K2, P, std::move(search), std::move(far), cert.E, cert.s};
}

// Largest relative gauge gap between two bodies on random unit directions.
double frame_gap(const Body& a, const Body& b, long probes, const RngStream& rng) {
  if (a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
  RngStream stream = rng;
  double worst = 0.0;
  for (long i = 0; i < probes; ++i) {
    const Vector u = sphere_sample(a.dim(), stream);
    const double ga = a.gauge(u);
    const double gb = b.gauge(u);
    worst = std::max(worst, std::abs(ga - gb) / std::max(std::abs(ga), 1e-300));
  }
  return worst;
}

// Claim steps k..1 and the base step on a body whose witness is the unit
// ball. The frame must already describe `body` in terms of `original`.
TheoremCertificate run_pipeline(const Body& original, Body body, SubquotientFrame frame, int k, int n,
                                const PipelineConfig& cfg, const RngStream& rng) {
  TheoremCertificate cert;
  cert.k = k;
  cert.n = n;
  double r = level_bound(k);
  for (int j = k; j >= 1; --j) {
    const int expected = (1 << (j + 1)) * n;
    if (body.dim() != expected)
      throw DimensionMismatch("level " + std::to_string(j) + ": expected dimension " + std::to_string(expected) +
                              ", got " + std::to_string(body.dim()));
    ClaimOutcome step = claim_step(body, r, cfg, rng.split(static_cast<std::uint64_t>(100 + j)));
    frame.apply_slice(step.slice_basis, "claim step " + std::to_string(j) + ": slice to V''");
    Body next = step.K2;
    if (step.parity_flip) {
      next = polar(next);
      frame.apply_polar("claim step " + std::to_string(j) + ": pass to the polar");
    }
    auto norm = normalize_to_witness(next, step.witness.E);
    frame.apply_map(norm.map, "claim step " + std::to_string(j) + ": normalize witness");
    body = norm.body;
    cert.trace.push_back(std::move(step));
    r = level_bound(j - 1);
  }
  if (body.dim() != 2 * n) throw DimensionMismatch("base step: dimension is not 2n");

  auto base = base_step(body, cfg, rng.split(200));
  frame.apply_slice(base.slice_basis, "base step: slice to V''");
  cert.final_body = base.K2;
  cert.E_final = base.E_final;
  cert.s_final = base.s_final;
  cert.s_farthest = base.far.s;
  cert.bound = kRoundnessBound;
  frame.check();

  const Body rebuilt = frame.reconstruct(original);
  cert.report.frame_mismatch = frame_gap(base.K2, rebuilt, cfg.verify_probes, rng.split(300));
  if (!(cert.report.frame_mismatch <= kFrameTol))
    throw FrameMismatch("frame reconstruction disagrees with the pipeline body: relative gap " +
                        fmt(cert.report.frame_mismatch));
  cert.frame = std::move(frame);

  const double mismatch = cert.report.frame_mismatch;
  cert.report = verify_certificate(original, cert, probe_count(cfg, n), rng.split(301));
  cert.report.frame_mismatch = mismatch;
  cert.verified = cert.report.pass;
  return cert;
}

}  // namespace

double level_bound(int k) {
  if (k < 0) throw InvalidArgument("level must be nonnegative");
  return 4.0 * std::pow(2.0, std::pow(1.5, k));
}

// --- frame -------------------------------------------------------------------

SubquotientFrame SubquotientFrame::identity(int n) {
  if (n < 1) throw InvalidArgument("frame dimension must be positive");
  SubquotientFrame f;
  f.original_dim = n;
  f.G = Matrix::Identity(n, n);
  f.F = Matrix(n, 0);
  f.U = Matrix::Identity(n, n);
  f.L = Matrix::Identity(n, n);
  return f;
}

void SubquotientFrame::apply_map(const Matrix& T, const std::string& note) {
  if (T.rows() != dim() || T.cols() != dim()) throw DimensionMismatch("frame map has the wrong shape");
  L = T * L;
  steps.push_back(note);
}

void SubquotientFrame::apply_slice(const Matrix& P, const std::string& note) {
  if (P.rows() != dim()) throw DimensionMismatch("slice basis has the wrong ambient dimension");
  const auto d = P.cols();
  const Matrix A = L.partialPivLu().solve(P);
  Eigen::HouseholderQR<Matrix> qr(A);
  const Matrix Q = qr.householderQ();
  const Matrix Z = Q.leftCols(d);
  const Matrix Rz = qr.matrixQR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  const Matrix H = U * Z;
  if (parity == Parity::Primal) {
    Matrix g(G.rows(), F.cols() + d);
    g << F, H;
    G = g;
  } else {
    Matrix f(F.rows(), F.cols() + (U.cols() - d));
    f << F, U * Q.rightCols(U.cols() - d);
    F = f;
  }
  U = H;
  L = Rz.inverse();
  steps.push_back(note);
}

void SubquotientFrame::apply_polar(const std::string& note) {
  L = L.inverse().transpose();
  parity = flipped(parity);
  steps.push_back(note);
}

Body SubquotientFrame::reconstruct(const Body& original) const {
  if (original.dim() != original_dim) throw DimensionMismatch("frame does not match the body dimension");
  const Body on_G = G.cols() == original_dim ? linear_image(Matrix(G.transpose()), original)
                                             : slice_by_basis(original, G);
  const Matrix Ug = G.transpose() * U;
  const Body S = Ug.cols() == Ug.rows() ? linear_image(Matrix(Ug.transpose()), on_G) : project_by_basis(on_G, Ug);
  return linear_image(L, parity == Parity::Primal ? S : polar(S));
}

void SubquotientFrame::check() const {
  if (G.rows() != original_dim || F.rows() != original_dim || U.rows() != original_dim)
    throw FrameMismatch("frame bases have the wrong ambient dimension");
  if (U.cols() != G.cols() - F.cols()) throw FrameMismatch("dim U != dim G - dim F");
  if (outside(F, G) > kSubspaceTol) throw FrameMismatch("F is not contained in G");
  if (outside(U, G) > kSubspaceTol) throw FrameMismatch("U is not contained in G");
  if (F.cols() > 0 && (F.transpose() * U).cwiseAbs().maxCoeff() > kSubspaceTol)
    throw FrameMismatch("U is not orthogonal to F");
}

namespace {

Json basis_to_json(const Matrix& B) {
  Json out = Json::array();
  for (Eigen::Index j = 0; j < B.cols(); ++j) out.push_back(vector_to_json(B.col(j)));
  return out;
}

Matrix basis_from_json(const Json& j, int ambient) {
  if (!j.is_array()) throw InvalidArgument("basis json: expected an array of vectors");
  Matrix B(ambient, static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vector v = vector_from_json(j[c]);
    if (v.size() != ambient) throw InvalidArgument("basis json: vector has the wrong dimension");
    B.col(static_cast<Eigen::Index>(c)) = v;
  }
  return B;
}

}  // namespace

Json to_json(const SubquotientFrame& f) {
  return Json{{"original_dim", f.original_dim},
              {"G", basis_to_json(f.G)},
              {"F", basis_to_json(f.F)},
              {"U", basis_to_json(f.U)},
              {"L", matrix_to_json(f.L)},
              {"parity", std::string(to_string(f.parity))},
              {"steps", f.steps}};
}

SubquotientFrame frame_from_json(const Json& j) {
  SubquotientFrame f;
  f.original_dim = j.at("original_dim").get<int>();
  if (f.original_dim < 1) throw InvalidArgument("frame: original_dim must be positive");
  f.G = basis_from_json(j.at("G"), f.original_dim);
  f.F = basis_from_json(j.at("F"), f.original_dim);
  f.U = basis_from_json(j.at("U"), f.original_dim);
  f.L = matrix_from_json(j.at("L"));
  f.parity = parity_from_string(j.at("parity").get<std::string>());
  f.steps = j.at("steps").get<std::vector<std::string>>();
  if (f.L.rows() != f.dim() || f.L.cols() != f.dim()) throw InvalidArgument("frame: L has the wrong shape");
  f.check();
  return f;
}

// --- pipeline steps ----------------------------------------------------------

SubspaceSearch find_good_subspace(const Body& body, double r, double slack, long samples, int max_tries,
                                  const RngStream& rng) {
  const int N = body.dim();
  if (N % 2 != 0) throw DimensionMismatch("find_good_subspace: dimension must be even");
  if (max_tries < 1) throw InvalidArgument("max_tries must be positive");
  const int n = N / 2;
  const double target = (1.0 + slack) * std::pow(r, 2.0 * n);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < max_tries; ++t) {
    RngStream stream = rng.split(static_cast<std::uint64_t>(t));
    Subspace V = haar_subspace(N, n + 1, stream);
    const McEstimate est = sphere_mean_inverse_power(slice(body, V), 2.0 * n, samples, stream.split(1));
    best = std::min(best, est.value);
    if (est.value <= target + est.std_error) return {std::move(V), est, t + 1};
  }
  throw SearchExhausted("no subspace met the acceptance bound " + fmt(target), best, max_tries);
}

FarthestPoint farthest_point(const Body& body, long probes, const RngStream& rng) {
  const auto m = measure_roundness(body, Ellipsoid::unit_ball(body.dim()), probes, rng);
  if (m.inner_max > 1.0 + kContainmentTol)
    throw InnerContainmentFailed("unit ball is not contained in the slice: boundary gauge " + fmt(m.inner_max));
  FarthestPoint out;
  out.exact = m.outer_exact;
  out.s = m.outer_max;
  out.p = m.farthest;
  if (out.s < 1.0) {
    // Only reachable through rounding: the unit ball lies inside the body.
    out.p *= 1.0 / out.s;
    out.s = 1.0;
  }
  return out;
}

ClaimOutcome claim_step(const Body& body, double r, const PipelineConfig& cfg, const RngStream& rng) {
  const int N = body.dim();
  if (N % 2 != 0 || N < 2) throw DimensionMismatch("claim step needs an even dimension >= 2");
  const int n = N / 2;
  auto search = find_good_subspace(body, r, cfg.slack, cfg.search_samples, cfg.max_tries, rng.split(1));
  const Body Kp = slice(body, search.subspace);
  const auto far = farthest_point(Kp, probe_count(cfg, n + 1), rng.split(2));
  const Matrix Z = orthogonal_complement<double>(Matrix(far.p.normalized()));
  const Matrix P = search.subspace.basis() * Z;
  const Body K2 = slice_by_basis(body, P);

  const double q = std::pow(2.0 * r, 4.0 / 3.0);
  const double bound = std::pow(2.0 * r, 2.0 / 3.0);
  SemiroundWitness witness;
  bool round_branch = false;
  if (far.s <= q) {
    round_branch = true;
    auto cert = roundness(K2, Ellipsoid::unit_ball(n), probe_count(cfg, n), rng.split(3));
    cert.s = q;
    witness = round_to_semiround(K2, cert, cfg.witness_samples, rng.split(4));
  } else {
    witness.target = Parity::Primal;
    witness.E = Ellipsoid::unit_ball(n);
    witness.ratio_bound = bound;
    witness.measured_ratio = semiround_ratio(K2, witness.E, cfg.witness_samples, rng.split(4));
    if (witness.measured_ratio.value > bound * (1.0 + 1e-12) + 3.0 * witness.measured_ratio.std_error)
      throw WitnessViolated("slice ratio " + fmt(witness.measured_ratio.value) + " exceeds " + fmt(bound));
  }
  ClaimOutcome out{K2,
                   witness,
                   witness.target == Parity::Dual,
                   far.s,
                   r,
                   search.subspace,
                   far.p,
                   search.estimate,
                   search.tries,
                   P,
                   round_branch};
  return out;
}

TheoremCertificate k0_step(const Body& body, const PipelineConfig& cfg, const RngStream& rng) {
  if (body.dim() % 2 != 0) throw DimensionMismatch("k0_step: dimension must be even");
  return run_pipeline(body, body, SubquotientFrame::identity(body.dim()), 0, body.dim() / 2, cfg, rng);
}

TheoremCertificate run_theorem(const Body& body, int k, int n, const PipelineConfig& cfg, const RngStream& rng,
                               const std::optional<Ellipsoid>& witness) {
  if (k < 0 || n < 1) throw InvalidArgument("run_theorem: need k >= 0 and n >= 1");
  const int N = (1 << (k + 1)) * n;
  if (body.dim() != N)
    throw DimensionMismatch("run_theorem: body dimension " + std::to_string(body.dim()) + " != 2^(k+1) n = " +
                            std::to_string(N));
  const Ellipsoid E = witness ? *witness : john_inscribed(body, cfg.eps);
  const McEstimate ratio = semiround_ratio(body, E, cfg.witness_samples, rng.split(10));
  const double rk = level_bound(k);
  if (ratio.value > rk * (1.0 + 1e-12) + 3.0 * ratio.std_error)
    throw WitnessViolated("input is not " + fmt(rk) + "-semiround for its witness: ratio " + fmt(ratio.value));
  auto norm = normalize_to_witness(body, E);
  auto frame = SubquotientFrame::identity(N);
  frame.apply_map(norm.map, "normalize input witness");
  auto cert = run_pipeline(body, norm.body, std::move(frame), k, n, cfg, rng.split(11));
  cert.input_witness = E;
  cert.input_ratio = ratio;
  return cert;
}

TheoremCertificate run_corollary(const Body& body, const PipelineConfig& cfg, const RngStream& rng) {
  const int N = body.dim();
  if (N < 2) throw InvalidArgument("run_corollary: dimension must be at least 2");
  const Ellipsoid john = john_inscribed(body, cfg.eps);
  const auto round = roundness(body, john, probe_count(cfg, N), rng.split(1));
  const double q = round.s;
  const auto first = round_to_semiround(body, round, cfg.witness_samples, rng.split(2));

  auto frame = SubquotientFrame::identity(N);
  Body work = body;
  if (first.target == Parity::Dual) {
    work = polar(work);
    frame.apply_polar("pass to the polar");
  }
  auto norm = normalize_to_witness(work, first.E);
  frame.apply_map(norm.map, "normalize John witness");
  work = norm.body;

  int k = 0;
  while (level_bound(k) < std::sqrt(q)) ++k;
  const int m = N / (1 << (k + 1));
  if (m < 1) throw Degenerate("run_corollary: dimension too small for level " + std::to_string(k));
  const int D = (1 << (k + 1)) * m;

  McEstimate ratio = first.measured_ratio;
  Ellipsoid witness = Ellipsoid::unit_ball(N);
  if (D < N) {
    // E ⊆ K ⊆ qE gives E∩W ⊆ K∩W ⊆ q(E∩W): the slice stays q-round.
    RngStream stream = rng.split(3);
    const Subspace W = haar_subspace(N, D, stream);
    frame.apply_slice(W.basis(), "pre-slice to dimension " + std::to_string(D));
    work = slice(work, W);
    RoundnessCertificate sliced{Ellipsoid::unit_ball(D), q, 0.0, 0.0, 0, false, rng.seed()};
    const auto again = round_to_semiround(work, sliced, cfg.witness_samples, rng.split(4));
    if (again.target == Parity::Dual) {
      work = polar(work);
      frame.apply_polar("pass to the polar after pre-slice");
    }
    auto renorm = normalize_to_witness(work, again.E);
    frame.apply_map(renorm.map, "normalize pre-slice witness");
    work = renorm.body;
    ratio = again.measured_ratio;
    witness = again.E;
  }
  const double rk = level_bound(k);
  if (ratio.value > rk * (1.0 + 1e-12) + 3.0 * ratio.std_error)
    throw WitnessViolated("corollary witness ratio " + fmt(ratio.value) + " exceeds " + fmt(rk));

  auto cert = run_pipeline(body, work, std::move(frame), k, m, cfg, rng.split(5));
  cert.input_witness = john;
  cert.input_ratio = ratio;
  cert.corollary = Json{{"N", N},
                        {"q", q},
                        {"sqrt_q", std::sqrt(q)},
                        {"k", k},
                        {"m", m},
                        {"slice_dim", D},
                        {"first_parity", std::string(to_string(first.target))},
                        {"level_bound", rk}};
  return cert;
}

VerificationReport verify_certificate(const Body& original, const TheoremCertificate& cert, long probes,
                                      const RngStream& rng) {
  VerificationReport rep;
  rep.probes = probes;
  try {
    cert.frame.check();
    const Body rebuilt = cert.frame.reconstruct(original);
    if (rebuilt.dim() != cert.E_final.dim()) throw DimensionMismatch("final ellipsoid dimension");
    const auto m = measure_roundness(rebuilt, cert.E_final, probes, rng);
    rep.inner_max = m.inner_max;
    rep.outer_max = m.outer_max;
    rep.outer_violation = m.outer_max / cert.s_final;
    if (cert.final_body) rep.frame_mismatch = frame_gap(*cert.final_body, rebuilt, 1000, rng.split(1));
    rep.pass = m.inner_max <= 1.0 + kContainmentTol && m.outer_max <= cert.s_final * (1.0 + kContainmentTol) &&
               cert.s_final <= cert.bound && rep.frame_mismatch <= kFrameTol;
  } catch (const Error&) {
    rep.pass = false;
  }
  return rep;
}

Json to_json(const VerificationReport& r) {
  return Json{{"pass", r.pass},
              {"inner_max", r.inner_max},
              {"outer_max", r.outer_max},
              {"outer_violation", r.outer_violation},
              {"frame_mismatch", r.frame_mismatch},
              {"probes", r.probes},
              {"tolerance", kContainmentTol}};
}

}  // namespace sq
