#include "pucci/stationary.hpp"

#include <algorithm>
#include <cmath>

namespace pucci {

namespace {

constexpr double kReTol = 1e-10;  // |Re sigma| below kReTol*(1+|sigma|) counts as zero

RegionCoeffs coeffs_for_jacobian(const PhasePoint& pt, const ProblemParams& params) {
  if (pt.X >= 0.0 && pt.Z >= 0.0) {
    double level = params.concavity_level();
    if (std::fabs(pt.Z - level) <= kLineTol * std::max(1.0, level))
      raise(errc::on_interface, "Jacobian jumps across the concavity line");
    return pt.Z > level ? coeffs_upper(params) : coeffs_lower(params);
  }
  if (pt.X <= 0.0 && pt.Z <= 0.0) return coeffs_third(params);
  raise(errc::outside_domain, "Jacobian undefined outside the first and third quadrants");
}

Mat2 jacobian_with(const RegionCoeffs& c, const PhasePoint& pt, double p,
                   const ProblemParams& params) {
  double X = pt.X, Z = pt.Z;
  return {{{2.0 * X - (c.dim - 2.0) + Z / c.divisor, X / c.divisor},
           {-p * Z, c.dim + params.a - p * X - 2.0 * Z / c.divisor}}};
}

SPClass classify_from_eigen(std::complex<double> s1, std::complex<double> s2) {
  double t1 = kReTol * (1.0 + std::abs(s1));
  double t2 = kReTol * (1.0 + std::abs(s2));
  bool z1 = std::fabs(s1.real()) <= t1;
  bool z2 = std::fabs(s2.real()) <= t2;
  if (z1 && z2) {
    if (s1.imag() != 0.0 || s2.imag() != 0.0) return SPClass::Center;
    return SPClass::NonHyperbolic;
  }
  if (z1 || z2) return SPClass::NonHyperbolic;
  if (s1.real() > 0.0 && s2.real() > 0.0) return SPClass::Source;
  if (s1.real() < 0.0 && s2.real() < 0.0) return SPClass::Sink;
  return SPClass::Saddle;
}

std::vector<TangentDirection> eigen_directions(const Mat2& J, std::complex<double> s1,
                                               std::complex<double> s2) {
  std::vector<TangentDirection> dirs;
  if (s1.imag() != 0.0 || s2.imag() != 0.0) return dirs;  // complex pair: no real directions
  auto push = [&](double sigma, bool stable) {
    // eigenvector from a nonzero row of J - sigma I
    double vx1 = J[0][1], vz1 = sigma - J[0][0];
    double vx2 = sigma - J[1][1], vz2 = J[1][0];
    double n1 = std::hypot(vx1, vz1), n2 = std::hypot(vx2, vz2);
    double vx, vz, n;
    if (n1 >= n2) {
      vx = vx1; vz = vz1; n = n1;
    } else {
      vx = vx2; vz = vz2; n = n2;
    }
    if (n < 1e-13) {  // J is sigma*I: any direction; report the axes
      dirs.push_back({1.0, 0.0, stable});
      dirs.push_back({0.0, 1.0, stable});
      return;
    }
    vx /= n; vz /= n;
    if (vx < 0.0 || (std::fabs(vx) < 1e-14 && vz < 0.0)) { vx = -vx; vz = -vz; }
    if (std::fabs(vx) < 1e-14) vx = 0.0;
    for (const auto& d : dirs)
      if (std::fabs(d.x - vx) < 1e-12 && std::fabs(d.z - vz) < 1e-12) return;
    dirs.push_back({vx, vz, stable});
  };
  push(s1.real(), s1.real() < 0.0);
  push(s2.real(), s2.real() < 0.0);
  return dirs;
}

StationaryPoint build(SPLabel label, const RegionCoeffs& c, double p,
                      const ProblemParams& params) {
  StationaryPoint sp;
  sp.label = label;
  sp.location = stationary_location(label, p, params);
  sp.jacobian = jacobian_with(c, sp.location, p, params);
  auto [s1, s2] = eigenvalues_of(sp.jacobian);
  sp.sigma1 = s1;
  sp.sigma2 = s2;
  sp.cls = classify_from_eigen(s1, s2);
  sp.tangents = eigen_directions(sp.jacobian, s1, s2);
  if (label == SPLabel::M0) sp.in_first_quadrant = p > p_serrin(params);
  return sp;
}

}  // namespace

const char* sp_label_name(SPLabel l) {
  switch (l) {
    case SPLabel::O: return "O";
    case SPLabel::N0: return "N0";
    case SPLabel::A0: return "A0";
    case SPLabel::M0: return "M0";
  }
  return "?";
}

const char* sp_class_name(SPClass c) {
  switch (c) {
    case SPClass::Source: return "Source";
    case SPClass::Sink: return "Sink";
    case SPClass::Saddle: return "Saddle";
    case SPClass::Center: return "Center";
    case SPClass::NonHyperbolic: return "NonHyperbolic";
  }
  return "?";
}

PhasePoint stationary_location(SPLabel label, double p, const ProblemParams& params) {
  switch (label) {
    case SPLabel::O: return {0.0, 0.0};
    case SPLabel::N0: return {0.0, params.kappa_upper() * (params.N + params.a)};
    case SPLabel::A0: return {params.wall_x(), 0.0};
    case SPLabel::M0: {
      double alpha = alpha_of(params, p);
      return {alpha, params.kappa_lower() * (params.wall_x() - alpha)};
    }
  }
  raise(errc::invalid_argument, "unknown stationary label");
}

Mat2 jacobian_at(const PhasePoint& pt, double p, const ProblemParams& params) {
  if (!(p > 1.0)) raise(errc::p_below_one, "need p > 1");
  return jacobian_with(coeffs_for_jacobian(pt, params), pt, p, params);
}

std::pair<std::complex<double>, std::complex<double>> eigenvalues_of(const Mat2& J) {
  double tr = J[0][0] + J[1][1];
  double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  double disc = tr * tr - 4.0 * det;
  std::complex<double> s1, s2;
  if (disc >= 0.0) {
    double root = std::sqrt(disc);
    // avoid cancellation: compute the larger-magnitude root first
    double q = tr >= 0.0 ? 0.5 * (tr + root) : 0.5 * (tr - root);
    double r1, r2;
    if (q == 0.0) {
      r1 = r2 = 0.0;
    } else {
      r1 = q;
      r2 = det / q;
    }
    if (r1 < r2) std::swap(r1, r2);
    s1 = r1;
    s2 = r2;
  } else {
    double im = 0.5 * std::sqrt(-disc);
    s1 = {0.5 * tr, im};
    s2 = {0.5 * tr, -im};
  }
  return {s1, s2};
}

StationaryPoint classify_stationary(SPLabel label, double p, const ProblemParams& params) {
  if (!(p > 1.0)) raise(errc::p_below_one, "need p > 1");
  switch (label) {
    case SPLabel::O: return build(label, coeffs_lower(params), p, params);
    case SPLabel::N0: return build(label, coeffs_upper(params), p, params);
    case SPLabel::A0: return build(label, coeffs_lower(params), p, params);
    case SPLabel::M0:
      if (!(p > p_serrin(params)))
        raise(errc::m_not_in_quadrant, "M0 enters the open quadrant only for p > p_serrin");
      return build(label, coeffs_lower(params), p, params);
  }
  raise(errc::invalid_argument, "unknown stationary label");
}

std::vector<StationaryPoint> stationary_points(double p, const ProblemParams& params) {
  if (!(p > 1.0)) raise(errc::p_below_one, "need p > 1");
  std::vector<StationaryPoint> pts;
  pts.push_back(build(SPLabel::O, coeffs_lower(params), p, params));
  pts.push_back(build(SPLabel::N0, coeffs_upper(params), p, params));
  pts.push_back(build(SPLabel::A0, coeffs_lower(params), p, params));
  pts.push_back(build(SPLabel::M0, coeffs_lower(params), p, params));
  return pts;
}

}  // namespace pucci
