#pragma once

#include <span>
#include <string>
#include <vector>

#include "pucci/params.hpp"

namespace pucci {

struct PhasePoint {
  double X = 0.0;
  double Z = 0.0;
};

enum class Region { RPlus, RMinus, OnConcavityLine, ThirdQuadrant, OnAxis, Outside };

const char* region_name(Region r);

// relative tolerance used when deciding "on the concavity line"
inline constexpr double kLineTol = 1e-12;

// (dim, divisor) pair of the piecewise quadratic system in one region:
//   Xdot = X * (X - (dim-2) + Z/divisor)
//   Zdot = Z * (dim + a - p X - Z/divisor)
struct RegionCoeffs {
  double dim = 0.0;
  double divisor = 1.0;
};

RegionCoeffs coeffs_upper(const ProblemParams& params);  // above the concavity line
RegionCoeffs coeffs_lower(const ProblemParams& params);  // below it
RegionCoeffs coeffs_third(const ProblemParams& params);  // third quadrant

// Extremal slope applied to the second-derivative argument w: w/kappa with the
// kappa picked by the sign of w and the operator.  Continuous, zero at w = 0.
double extremal_slope(double w, const ProblemParams& params);

Region region_of(const PhasePoint& pt, const ProblemParams& params);

struct Velocity {
  double xdot = 0.0;
  double zdot = 0.0;
};

// First-quadrant and third-quadrant field; throws OutsideDomain elsewhere.
Velocity vector_field(const PhasePoint& pt, double p, const ProblemParams& params);

// Segment endpoints of the structural lines inside the closed first quadrant.
struct LinePiece {
  PhasePoint from, to;
};

struct LineSet {
  double concavity_level = 0.0;   // Z level of the interface
  double wall_x = 0.0;            // X = ntilde - 2
  LinePiece x_nullcline;          // Xdot = 0 off the axes (lies below the interface)
  LinePiece z_nullcline_upper;    // Zdot = 0 piece in the closed upper region
  LinePiece z_nullcline_lower;    // Zdot = 0 piece in the closed lower region
  PhasePoint junction;            // where the two nullcline pieces meet on the interface
};

LineSet line_set(double p, const ProblemParams& params);

// Signed Z-distance to the Zdot=0 nullcline, using the formula of the region
// the point lies in (upper/lower decided by side of the interface).
double z_nullcline_gap(const PhasePoint& pt, double p, const ProblemParams& params);
// Same for the off-axis Xdot=0 line (single formula, lies below the interface).
double x_nullcline_gap(const PhasePoint& pt, double p, const ProblemParams& params);

// Sign rules of the field on the structural lines, each verified by sampling.
struct DirectionRule {
  std::string line;       // "ell", "ell1", "ell2", "Xaxis", "Zaxis"
  std::string statement;  // human-readable rule
  double threshold = 0.0; // switching abscissa/ordinate, NaN if none
  int samples_checked = 0;
  bool verified = false;
};

struct LineDirectionReport {
  std::vector<DirectionRule> rules;
  bool all_verified = false;
};

LineDirectionReport field_directions_on_lines(double p, const ProblemParams& params);

// Weighted divergence of the field with weight X^mu Z^nu, mu = 2/(p-1),
// nu = (3-p)/(p-1).  Closed form, piecewise constant sign per region:
//   Phi = weight * [ (dim+2+2a) - p (dim-2) ] / (p-1).
// Throws OnInterface within kLineTol of the concavity line and OutsideDomain
// off the open first quadrant.
double dulac_weight(const PhasePoint& pt, double p);
double dulac_phi(const PhasePoint& pt, double p, const ProblemParams& params);

// Line integral of weight*(f dZ - g dX) along a closed polyline; by Green's
// identity this equals the integral of dulac_phi over the enclosed region when
// the polyline is positively oriented.  Throws OpenCurve / SelfIntersection.
double dulac_line_integral(std::span<const PhasePoint> polyline, double p,
                           const ProblemParams& params);

}  // namespace pucci
