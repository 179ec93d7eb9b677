#pragma once

#include "pucci/errors.hpp"

namespace pucci {

// Which extremal operator the problem uses.
enum class Operator { MPlus, MMinus };

const char* operator_name(Operator op);

// Validated problem data for  M(D^2 u) + |x|^a u^p = 0  restricted to radial u.
//
// lambda/Lambda are the ellipticity constants (0 < lambda <= Lambda), N >= 3 the
// space dimension, a > -1 the weight exponent.  The dimension-like numbers
//   ntilde_plus  = (lambda/Lambda)(N-1) + 1
//   ntilde_minus = (Lambda/lambda)(N-1) + 1
// replace N in the radial analysis; ntilde_plus must stay above 2 for MPlus.
struct ProblemParams {
  double lambda = 1.0;
  double Lambda = 1.0;
  Operator op = Operator::MPlus;
  int N = 3;
  double a = 0.0;
  double ntilde_plus = 0.0;
  double ntilde_minus = 0.0;

  // dimension-like number of the selected operator
  double ntilde() const { return op == Operator::MPlus ? ntilde_plus : ntilde_minus; }
  // the other one; it governs the third-quadrant dynamics
  double ntilde_other() const { return op == Operator::MPlus ? ntilde_minus : ntilde_plus; }

  // coefficient attached to the region above the concavity line (u'' <= 0 there)
  double kappa_upper() const { return op == Operator::MPlus ? lambda : Lambda; }
  // and below it (u'' >= 0)
  double kappa_lower() const { return op == Operator::MPlus ? Lambda : lambda; }

  // height of the concavity interface Z = kappa_upper * (N-1)
  double concavity_level() const { return kappa_upper() * (N - 1); }
  // abscissa of the wall X = ntilde - 2 shared by A0 and the blow-up analysis
  double wall_x() const { return ntilde() - 2.0; }
};

// Validates and fills the derived fields.  Throws pucci::error with codes
// NonPositiveEllipticity, LambdaOrder, DimensionTooSmall, WeightTooNegative or
// DegenerateDimensionLike.
ProblemParams make_params(double lambda, double Lambda, Operator op, int N, double a);

// Critical exponents attached to (params, p).
struct ExponentSet {
  double n_tilde_plus = 0.0;
  double n_tilde_minus = 0.0;
  double n_tilde = 0.0;    // the applicable one
  double alpha = 0.0;      // (2+a)/(p-1)
  double p_serrin = 0.0;   // (ntilde + a)/(ntilde - 2)
  double p_pseudo = 0.0;   // (ntilde + 2a + 2)/(ntilde - 2)
  double p_sobolev = 0.0;  // (N + 2 + 2a)/(N - 2)
};

// Throws PBelowOne for p <= 1.
ExponentSet exponents(const ProblemParams& params, double p);

double alpha_of(const ProblemParams& params, double p);
double p_serrin(const ProblemParams& params);
double p_pseudo(const ProblemParams& params);
double p_sobolev(const ProblemParams& params);

}  // namespace pucci
