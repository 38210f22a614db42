#pragma once

// Subquotient extraction.
//
// The working body always lives in coordinates in which its semiround
// witness is the Euclidean unit ball. One claim step takes a 2n-dimensional
// r-semiround body to an n-dimensional slice K'' such that K'' or its polar
// is (2r)^{2/3}-semiround; k claim steps followed by the base step turn a
// 2^{k+1} n dimensional (2^{(3/2)^k} 4)-semiround body into a 256-round
// n-dimensional subquotient. A SubquotientFrame records how the working
// body sits inside the original so the result can be rebuilt from the
// original body alone.

#include <optional>
#include <string>
#include <vector>

#include "sq/bodies.hpp"
#include "sq/fitting.hpp"
#include "sq/measure.hpp"

namespace sq {

inline constexpr double kRoundnessBound = 256.0;

// 2^{(3/2)^k} * 4, the semiroundness admitted at induction level k.
double level_bound(int k);

struct PipelineConfig {
  double slack = 1.0;           // good-subspace acceptance: estimate <= (1 + slack) r^{2n}
  long search_samples = 10000;  // sphere samples per candidate subspace
  int max_tries = 50;
  long probes = 0;              // 0: default_probe_count(dim)
  long witness_samples = 100000;
  double slack_s = 0.0;  // base step accepts s <= 256 (1 + slack_s)
  long verify_probes = 1000;
  double eps = 1e-6;
};

// A subquotient of the original body K ⊂ R^N: with G ⊇ F and U an
// orthonormal basis of G ⊖ F, S = orthogonal projection of K ∩ G onto
// span(U), in U-coordinates. The working body is L S (Primal) or L S°
// (Dual).
struct SubquotientFrame {
  int original_dim = 0;
  Matrix G;
  Matrix F;
  Matrix U;
  Matrix L;
  Parity parity = Parity::Primal;
  std::vector<std::string> steps;

  static SubquotientFrame identity(int n);
  int dim() const { return static_cast<int>(U.cols()); }

  // Working body B becomes T B.
  void apply_map(const Matrix& T, const std::string& note);
  // Working body B becomes B ∩ span(P) in P-coordinates (P orthonormal).
  void apply_slice(const Matrix& P, const std::string& note);
  // Working body B becomes B°.
  void apply_polar(const std::string& note);

  // Rebuilds the working body from the original body and the frame alone.
  Body reconstruct(const Body& original) const;
  // Throws FrameMismatch if F ⊄ G, U ⊄ G, or U is not orthogonal to F.
  void check() const;
};

Json to_json(const SubquotientFrame& f);
SubquotientFrame frame_from_json(const Json& j);

struct SubspaceSearch {
  Subspace subspace;
  McEstimate estimate;  // sphere mean of gauge^{-2n} over the subspace
  int tries = 0;
};

// First Haar-random (n+1)-dimensional subspace whose estimated sphere
// integral of gauge^{-2n} is within (1 + slack) r^{2n} at the one-sigma
// level. Throws SearchExhausted with the best estimate after max_tries.
SubspaceSearch find_good_subspace(const Body& body, double r, double slack, long samples, int max_tries,
                                  const RngStream& rng);

struct FarthestPoint {
  Vector p;
  double s = 1.0;
  bool exact = false;
};

// Boundary point of maximal Euclidean norm (exact for polytopes with an
// enumerable vertex set).
FarthestPoint farthest_point(const Body& body, long probes, const RngStream& rng);

struct ClaimOutcome {
  Body K2;                   // n-dimensional slice K'' in slice_basis coordinates
  SemiroundWitness witness;  // for K2, or for its polar when parity_flip
  bool parity_flip = false;
  double s = 1.0;
  double r = 1.0;
  Subspace subspace_V1;  // the (n+1)-dimensional V'
  Vector p;              // farthest point, in V' coordinates
  McEstimate search_estimate;
  int tries = 0;
  Matrix slice_basis;  // basis of V'' in the input coordinates
  bool round_branch = false;
};

ClaimOutcome claim_step(const Body& body, double r, const PipelineConfig& cfg, const RngStream& rng);

struct VerificationReport {
  bool pass = false;
  double inner_max = 0.0;          // max gauge of the body on the boundary of E_final
  double outer_max = 0.0;          // measured roundness of the rebuilt body
  double outer_violation = 0.0;    // outer_max / s_final
  double frame_mismatch = 0.0;     // max relative gauge gap, rebuilt vs pipeline body
  long probes = 0;
};

Json to_json(const VerificationReport& r);

struct TheoremCertificate {
  int k = 0;
  int n = 0;
  SubquotientFrame frame;
  std::optional<Body> final_body;
  Ellipsoid E_final;
  double s_final = 1.0;
  double s_farthest = 1.0;
  double bound = kRoundnessBound;
  bool verified = false;
  std::vector<ClaimOutcome> trace;
  Ellipsoid input_witness;
  McEstimate input_ratio;
  VerificationReport report;
  Json corollary;  // null unless produced by run_corollary
};

// Base step (r = 8): steps (1)-(3) of the claim, then certifies K''.
// Throws BoundViolated if the farthest-point norm exceeds 256 (1 + slack_s).
TheoremCertificate k0_step(const Body& body, const PipelineConfig& cfg, const RngStream& rng);

TheoremCertificate run_theorem(const Body& body, int k, int n, const PipelineConfig& cfg, const RngStream& rng,
                               const std::optional<Ellipsoid>& witness = std::nullopt);

TheoremCertificate run_corollary(const Body& body, const PipelineConfig& cfg, const RngStream& rng);

VerificationReport verify_certificate(const Body& original, const TheoremCertificate& cert, long probes,
                                      const RngStream& rng);

Json to_json(const TheoremCertificate& cert);
TheoremCertificate certificate_from_json(const Json& j);

}  // namespace sq
