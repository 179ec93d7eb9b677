#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pucci/errors.hpp"
#include "pucci/flow.hpp"
#include "pucci/params.hpp"

namespace pucci {

// One point of a radial profile u(r).
struct RadialSample {
  double r = 0.0;
  double u = 0.0;
  double du = 0.0;   // u'
  double ddu = 0.0;  // u'' from the governing piecewise equation
};

// Behaviour of u as r grows.
enum class RadialClass {
  Undetermined,
  VanishesAtFiniteRadius,
  FastDecay,        // u ~ c r^{-(ntilde-2)}
  SlowDecay,        // u ~ C r^{-alpha}
  PseudoSlowDecay,  // r^alpha u oscillates between two positive constants
};

// Behaviour of u as r -> 0.
enum class OriginClass {
  Unspecified,
  RegularAtOrigin,       // u(0) = gamma finite, u'(0) = 0
  DimensionLikeBlowUp,   // u ~ c r^{-(ntilde-2)}
  AlphaBlowUp,           // u ~ c r^{-alpha}
  PseudoBlowUp,          // r^alpha u oscillates as r -> 0
};

const char* radial_class_name(RadialClass c);
const char* origin_class_name(OriginClass c);

struct DecayConstants {
  std::optional<double> c_fast;  // lim u r^{ntilde-2}
  std::optional<double> c_slow;  // lim u r^alpha
  std::optional<double> c1;      // liminf r^alpha u (oscillating decay)
  std::optional<double> c2;      // limsup r^alpha u
};

struct RadialSolution {
  std::vector<RadialSample> samples;  // r strictly increasing, u > 0, u' < 0
  double p = 0.0;
  std::optional<double> gamma;        // u(0) when the solution is regular
  std::optional<double> wall_radius;  // R with u(R) = 0 when u vanishes
  RadialClass classification = RadialClass::Undetermined;
  OriginClass origin = OriginClass::Unspecified;
  std::vector<double> concavity_radii;  // radii where u'' changes sign
  DecayConstants constants;
};

struct EnergyValue {
  double value = 0.0;
  bool region_valid = false;
};

// u'' as dictated by the extremal equation at (r, u, u'). Valid in any
// quadrant; the operator branch is selected by the signs of u' and u''.
double radial_second_derivative(double r, double u, double du, double p,
                                const ProblemParams& params);

// Rebuilds u(r) from a first-quadrant trajectory through
// u = r^{-alpha} (XZ)^{1/(p-1)}, u' = -X u / r. Samples whose X or Z sit at
// the integrator's absolute-tolerance floor are dropped; they carry no
// relative precision. The optional anchor (t0, u0) is a consistency check
// against the canonical profile.
RadialSolution reconstruct_u(const Trajectory& traj, double p, const ProblemParams& params,
                             std::optional<std::pair<double, double>> anchor = {});

// Maps a radial profile back to the phase plane through
// X = -r u'/u, Z = -r^{1+a} u^p / u'.
Trajectory to_phase(const RadialSolution& sol, const ProblemParams& params);

struct ShootOptions {
  double rtol = 1e-10;
  double atol_scale = 1e-16;  // absolute tolerance = atol_scale * gamma
  bool early_halt = true;     // stop once the decay class is confidently resolved
  std::size_t max_steps = 2'000'000;
};

// Integrates the second-order radial equation from u(0)=gamma, u'(0)=0
// using a series start at a tiny radius. Stops at u=0 (wall), r_max, or
// once the decay classification stabilises.
RadialSolution shoot_regular(double gamma, double p, const ProblemParams& params, double r_max,
                             const ShootOptions& opts = {});

// Decay/blow-up constants for a resolved profile or orbit.
DecayConstants decay_constants(const RadialSolution& sol, const ProblemParams& params);
DecayConstants decay_constants(const Trajectory& traj, const OrbitFate& fate, double p,
                               const ProblemParams& params);
DecayConstants decay_constants(const PeriodicOrbit& orbit, double p, const ProblemParams& params);

// Energy along orbits, valid below the concavity interface (u'' >= 0).
// Phase form at problem time t; radial form at a profile sample.
EnergyValue energy(double t, const PhasePoint& pt, double p, const ProblemParams& params);
EnergyValue energy(const RadialSample& s, double p, const ProblemParams& params);

// Level function (ntilde + a - p X) X^p, constant along the z-nullcline
// crossings of a closed orbit at the pseudo-critical exponent.
double level_h(double X, double p, const ProblemParams& params);

// Worst consistency defect of a stored profile against the governing
// piecewise equation: pointwise u'' defect plus pairwise re-integration.
double max_relative_residual(const RadialSolution& sol, const ProblemParams& params);

}  // namespace pucci
