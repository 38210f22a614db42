#pragma once

// Ellipsoid fitting and roundness certificates.

#include <cstdint>

#include "sq/bodies.hpp"
#include "sq/measure.hpp"

namespace sq {

enum class Parity { Primal, Dual };

inline Parity flipped(Parity p) { return p == Parity::Primal ? Parity::Dual : Parity::Primal; }
std::string_view to_string(Parity p);
Parity parity_from_string(const std::string& s);

inline constexpr double kContainmentTol = 1e-6;

// E ⊆ K ⊆ s E, checked on probe directions (or exactly, see `exact`).
struct RoundnessCertificate {
  Ellipsoid E;
  double s = 1.0;
  double inner_check = 0.0;  // max of gauge_K over the boundary of E
  double outer_check = 0.0;  // max of gauge_E / gauge_K, i.e. the certified s
  long probes = 0;
  bool exact = false;
  std::uint64_t seed = 0;
};

// E ⊆ K (or E ⊆ K° when target is Dual) with (Vol/Vol E)^{1/n} <= ratio_bound.
struct SemiroundWitness {
  Parity target = Parity::Primal;
  Ellipsoid E;
  double ratio_bound = 1.0;
  McEstimate measured_ratio;
};

Json to_json(const RoundnessCertificate& c);
Json to_json(const SemiroundWitness& w);

inline long default_probe_count(int dim) { return std::max(10000L, 200L * dim); }

// Minimum-volume centered ellipsoid containing +-p for every row p, with
// volume within a factor (1 + eps) of optimal. Throws Degenerate if the
// points do not span.
Ellipsoid mvee(const Matrix& points, double eps = 1e-6);

// Maximum-volume inscribed ellipsoid (within (1 + eps)), as the polar of
// the minimum enclosing ellipsoid of the polar body's generators. Supports
// polytopes, ellipsoids, l_p balls and linear images of those.
Ellipsoid john_inscribed(const Body& body, double eps = 1e-6);

// Raw roundness measurement; never throws on containment failure.
struct RoundnessMeasurement {
  double inner_max = 0.0;
  double outer_max = 0.0;
  Vector farthest;  // boundary point of K attaining outer_max (original coordinates)
  bool inner_exact = false;
  bool outer_exact = false;
  long probes = 0;
};
RoundnessMeasurement measure_roundness(const Body& body, const Ellipsoid& E, long probes, const RngStream& rng);

// Throws InnerContainmentFailed if some probe on the boundary of E lies
// outside the body by more than kContainmentTol.
RoundnessCertificate roundness(const Body& body, const Ellipsoid& E, long probes, const RngStream& rng);

// ((Vol K)/(Vol E))^{1/n}, with the error propagated from the volume
// estimate.
McEstimate semiround_ratio(const Body& body, const Ellipsoid& E, long samples, const RngStream& rng);

// If K is q-round (q = cert.s) then K or its polar is sqrt(q)-semiround.
// Primal is chosen when (Vol K/Vol E)^{1/n} <= sqrt(q); otherwise the dual
// witness E°/q ⊆ K° is returned. Throws WitnessViolated if the measured
// ratio exceeds its bound by more than three standard errors.
SemiroundWitness round_to_semiround(const Body& body, const RoundnessCertificate& cert, long samples,
                                    const RngStream& rng);

}  // namespace sq
