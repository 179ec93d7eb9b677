#include "pucci/params.hpp"

#include <cmath>
#include <sstream>

namespace pucci {

const char* operator_name(Operator op) { return op == Operator::MPlus ? "MPlus" : "MMinus"; }

ProblemParams make_params(double lambda, double Lambda, Operator op, int N, double a) {
  if (!(lambda > 0.0) || !std::isfinite(lambda) || !std::isfinite(Lambda))
    raise(errc::non_positive_ellipticity, "need 0 < lambda and finite ellipticity constants");
  if (!(lambda <= Lambda)) raise(errc::lambda_order, "need lambda <= Lambda");
  if (N < 3) raise(errc::dimension_too_small, "need N >= 3");
  if (!(a > -1.0) || !std::isfinite(a)) raise(errc::weight_too_negative, "need a > -1");

  ProblemParams pp;
  pp.lambda = lambda;
  pp.Lambda = Lambda;
  pp.op = op;
  pp.N = N;
  pp.a = a;
  pp.ntilde_plus = (lambda / Lambda) * (N - 1) + 1.0;
  pp.ntilde_minus = (Lambda / lambda) * (N - 1) + 1.0;
  if (op == Operator::MPlus && !(pp.ntilde_plus > 2.0)) {
    std::ostringstream os;
    os << "ntilde_plus = " << pp.ntilde_plus << " <= 2, MPlus problem is degenerate";
    raise(errc::degenerate_dimension_like, os.str());
  }
  return pp;
}

double alpha_of(const ProblemParams& params, double p) {
  if (!(p > 1.0)) raise(errc::p_below_one, "need p > 1");
  return (2.0 + params.a) / (p - 1.0);
}

double p_serrin(const ProblemParams& params) {
  return (params.ntilde() + params.a) / (params.ntilde() - 2.0);
}

double p_pseudo(const ProblemParams& params) {
  return (params.ntilde() + 2.0 * params.a + 2.0) / (params.ntilde() - 2.0);
}

double p_sobolev(const ProblemParams& params) {
  return (params.N + 2.0 + 2.0 * params.a) / (params.N - 2.0);
}

ExponentSet exponents(const ProblemParams& params, double p) {
  ExponentSet e;
  e.n_tilde_plus = params.ntilde_plus;
  e.n_tilde_minus = params.ntilde_minus;
  e.n_tilde = params.ntilde();
  e.alpha = alpha_of(params, p);
  e.p_serrin = p_serrin(params);
  e.p_pseudo = p_pseudo(params);
  e.p_sobolev = p_sobolev(params);
  return e;
}

}  // namespace pucci
