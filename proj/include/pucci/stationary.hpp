#pragma once

#include <array>
#include <complex>
#include <vector>

#include "pucci/field.hpp"

namespace pucci {

enum class SPLabel { O, N0, A0, M0 };
enum class SPClass { Source, Sink, Saddle, Center, NonHyperbolic };

const char* sp_label_name(SPLabel l);
const char* sp_class_name(SPClass c);

using Mat2 = std::array<std::array<double, 2>, 2>;

struct TangentDirection {
  double x = 0.0, z = 0.0;  // unit vector, X component >= 0
  bool stable = false;
};

struct StationaryPoint {
  SPLabel label = SPLabel::O;
  PhasePoint location;
  Mat2 jacobian{};
  std::complex<double> sigma1, sigma2;  // ordered by real part, descending
  SPClass cls = SPClass::Saddle;
  std::vector<TangentDirection> tangents;
  bool in_first_quadrant = true;  // M0 sits in the open quadrant only for p > p_serrin
};

PhasePoint stationary_location(SPLabel label, double p, const ProblemParams& params);

// Jacobian of the piecewise field at an arbitrary admissible point.  Throws
// OnInterface within tolerance of the concavity line (the derivative jumps).
Mat2 jacobian_at(const PhasePoint& pt, double p, const ProblemParams& params);

// Closed-form eigenvalues of a 2x2 matrix (quadratic formula).
std::pair<std::complex<double>, std::complex<double>> eigenvalues_of(const Mat2& J);

// Full record for one stationary point; M0 with p <= p_serrin throws MNotInQuadrant.
StationaryPoint classify_stationary(SPLabel label, double p, const ProblemParams& params);

// All four points; M0 is included with in_first_quadrant = false when p <= p_serrin.
std::vector<StationaryPoint> stationary_points(double p, const ProblemParams& params);

}  // namespace pucci
