#include "pucci/errors.hpp"

namespace pucci {

const char* errc_name(errc code) {
  switch (code) {
    case errc::non_positive_ellipticity: return "NonPositiveEllipticity";
    case errc::lambda_order: return "LambdaOrder";
    case errc::dimension_too_small: return "DimensionTooSmall";
    case errc::weight_too_negative: return "WeightTooNegative";
    case errc::degenerate_dimension_like: return "DegenerateDimensionLike";
    case errc::p_below_one: return "PBelowOne";
    case errc::outside_domain: return "OutsideDomain";
    case errc::on_interface: return "OnInterface";
    case errc::open_curve: return "OpenCurve";
    case errc::self_intersection: return "SelfIntersection";
    case errc::m_not_in_quadrant: return "MNotInQuadrant";
    case errc::step_size_underflow: return "StepSizeUnderflow";
    case errc::saddle_unavailable: return "SaddleUnavailable";
    case errc::no_return: return "NoReturn";
    case errc::empty_trajectory: return "EmptyTrajectory";
    case errc::non_positive_xz: return "NonPositiveXZ";
    case errc::vanishing_derivative: return "VanishingDerivative";
    case errc::unresolved_fate: return "UnresolvedFate";
    case errc::wrong_region: return "WrongRegion";
    case errc::bracket_failure: return "BracketFailure";
    case errc::unresolved: return "Unresolved";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace pucci
