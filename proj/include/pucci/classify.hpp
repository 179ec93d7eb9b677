#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pucci/flow.hpp"
#include "pucci/params.hpp"
#include "pucci/radial.hpp"

namespace pucci {

// Fate classes of the regular orbit: C hits the wall (Dirichlet ball
// solution), F decays fast (to A0), P approaches a cycle, S decays slow
// (to M0).
enum class PLabel { C, F, P, S };

const char* p_label_name(PLabel l);

struct PClass {
  PLabel label = PLabel::C;
  OrbitFate evidence;
  std::optional<double> wall_radius;  // e^{t2} for class C
};

struct CriticalResult {
  double p_star = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double tol = 0.0;
  int iterations = 0;
  // strict two-sided bounds on p_star (lower/upper reference exponents
  // depend on the operator); equality-degenerate when lambda == Lambda
  double lower_reference = 0.0, upper_reference = 0.0;
  bool lower_bound_strict = false, upper_bound_strict = false;
};

struct CatalogEntry {
  OriginClass origin = OriginClass::Unspecified;   // behaviour at r -> 0
  RadialClass decay = RadialClass::Undetermined;   // behaviour at large r
  bool whole_space = false;                        // defined on all of (0, infinity)
  std::string cardinality;                         // "unique up to scaling" / "infinitely many"
  std::string note;
  std::vector<PhasePoint> seeds;                   // representative phase seeds
};

struct SingularCatalog {
  double p = 0.0;
  std::vector<CatalogEntry> entries;
  std::string regime_note;
};

enum class ExteriorVerdict { Nonexistence, OutOfScope };

const char* exterior_verdict_name(ExteriorVerdict v);

struct ExteriorCheck {
  ExteriorVerdict verdict = ExteriorVerdict::OutOfScope;
  PLabel orbit_class = PLabel::C;
  std::vector<PhasePoint> barrier;  // closed separating polygon, empty for OutOfScope
  bool a0_enclosed = false;
  bool m0_enclosed = false;
  bool cycle_enclosed = false;
  std::string note;
};

// Seeds on the local invariant directions. delta_scale multiplies
// (1 + |location|) to give the offset along the eigenvector.
PhasePoint gamma_seed(double p, const ProblemParams& params, double delta_scale = 1e-6);
PhasePoint upsilon_seed(double p, const ProblemParams& params, double delta_scale = 1e-6);

// The orbit leaving N0 into the open quadrant, integrated forward until
// its fate resolves.
Trajectory gamma_orbit(double p, const ProblemParams& params, const FlowOptions& opts = {});

// The orbit arriving at A0 along its stable direction, integrated
// backward; needs A0 to be a saddle (p above the Serrin-type exponent).
Trajectory upsilon_orbit(double p, const ProblemParams& params, const FlowOptions& opts = {});

// Class of the exponent p from the forward fate of the regular orbit.
PClass classify_p(double p, const ProblemParams& params, const FlowOptions& opts = {});

// Bisection for the supremum of the wall-blow-up class.
CriticalResult critical_exponent(const ProblemParams& params, double tol = 1e-6,
                                 const FlowOptions& opts = {});

// Catalog of singular radial solutions at this p, assembled from the
// computed orbit fates.
SingularCatalog singular_catalog(double p, const ProblemParams& params,
                                 const FlowOptions& opts = {});

// Nonexistence verdict for exterior-domain solutions when the regular
// orbit (plus wall and axes) walls off every admissible limit set.
ExteriorCheck exterior_nonexistence_check(double p, const ProblemParams& params,
                                          const FlowOptions& opts = {});

// Ray-casting test; points within tol of an edge count as inside.
bool point_in_polygon(const PhasePoint& pt, std::span<const PhasePoint> polygon,
                      double tol = 1e-9);

}  // namespace pucci
