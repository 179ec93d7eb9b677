#include "pucci/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pucci {

namespace {

double line_tol(const ProblemParams& params) {
  return kLineTol * std::max(1.0, params.concavity_level());
}

}  // namespace

double extremal_slope(double w, const ProblemParams& params) {
  if (params.op == Operator::MPlus) return w <= 0.0 ? w / params.lambda : w / params.Lambda;
  return w <= 0.0 ? w / params.Lambda : w / params.lambda;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::RPlus: return "RPlus";
    case Region::RMinus: return "RMinus";
    case Region::OnConcavityLine: return "OnConcavityLine";
    case Region::ThirdQuadrant: return "ThirdQuadrant";
    case Region::OnAxis: return "OnAxis";
    case Region::Outside: return "Outside";
  }
  return "Outside";
}

RegionCoeffs coeffs_upper(const ProblemParams& params) {
  return {static_cast<double>(params.N), params.kappa_upper()};
}

RegionCoeffs coeffs_lower(const ProblemParams& params) {
  return {params.ntilde(), params.kappa_lower()};
}

RegionCoeffs coeffs_third(const ProblemParams& params) {
  return {params.ntilde_other(), params.kappa_upper()};
}

Region region_of(const PhasePoint& pt, const ProblemParams& params) {
  if (pt.X >= 0.0 && pt.Z >= 0.0) {
    if (pt.X == 0.0 || pt.Z == 0.0) return Region::OnAxis;
    double level = params.concavity_level();
    if (std::fabs(pt.Z - level) <= line_tol(params)) return Region::OnConcavityLine;
    return pt.Z > level ? Region::RPlus : Region::RMinus;
  }
  if (pt.X <= 0.0 && pt.Z <= 0.0) return Region::ThirdQuadrant;
  return Region::Outside;
}

Velocity vector_field(const PhasePoint& pt, double p, const ProblemParams& params) {
  if (pt.X >= 0.0 && pt.Z >= 0.0) {
    // compact form, continuous across the interface by construction
    double m = extremal_slope(params.concavity_level() - pt.Z, params);
    return {pt.X * (pt.X + 1.0 - m), pt.Z * (1.0 + params.a - p * pt.X + m)};
  }
  if (pt.X <= 0.0 && pt.Z <= 0.0) {
    RegionCoeffs c = coeffs_third(params);
    return {pt.X * (pt.X - (c.dim - 2.0) + pt.Z / c.divisor),
            pt.Z * (c.dim + params.a - p * pt.X - pt.Z / c.divisor)};
  }
  std::ostringstream os;
  os << "field undefined at (" << pt.X << ", " << pt.Z << ")";
  raise(errc::outside_domain, os.str());
}

LineSet line_set(double p, const ProblemParams& params) {
  if (!(p > 1.0)) raise(errc::p_below_one, "need p > 1");
  LineSet ls;
  ls.concavity_level = params.concavity_level();
  ls.wall_x = params.wall_x();
  double klo = params.kappa_lower();
  double kup = params.kappa_upper();
  double nt = params.ntilde();
  ls.x_nullcline = {{0.0, klo * ls.wall_x}, {ls.wall_x, 0.0}};
  double xj = (1.0 + params.a) / p;
  ls.junction = {xj, ls.concavity_level};
  ls.z_nullcline_upper = {{0.0, kup * (params.N + params.a)}, ls.junction};
  ls.z_nullcline_lower = {ls.junction, {(nt + params.a) / p, 0.0}};
  return ls;
}

double z_nullcline_gap(const PhasePoint& pt, double p, const ProblemParams& params) {
  RegionCoeffs c = pt.Z >= params.concavity_level() ? coeffs_upper(params) : coeffs_lower(params);
  return pt.Z - c.divisor * (c.dim + params.a - p * pt.X);
}

double x_nullcline_gap(const PhasePoint& pt, double p, const ProblemParams& params) {
  (void)p;
  return pt.Z - params.kappa_lower() * (params.wall_x() - pt.X);
}

LineDirectionReport field_directions_on_lines(double p, const ProblemParams& params) {
  if (!(p > 1.0)) raise(errc::p_below_one, "need p > 1");
  LineDirectionReport rep;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double level = params.concavity_level();
  double wall = params.wall_x();
  double alpha = alpha_of(params, p);
  double a = params.a;
  const int ns = 48;

  {
    DirectionRule r;
    r.line = "ell";
    r.statement = "on the interface Xdot > 0 and Zdot < 0 iff X > (1+a)/p";
    r.threshold = (1.0 + a) / p;
    bool ok = true;
    double xmax = std::max({wall, 2.0 * r.threshold, 1.0}) * 1.5;
    for (int i = 1; i <= ns; ++i) {
      double x = xmax * i / (ns + 1.0);
      if (std::fabs(x - r.threshold) < 1e-9) continue;
      Velocity v = vector_field({x, level}, p, params);
      ok = ok && v.xdot > 0.0;
      ok = ok && ((x > r.threshold) ? (v.zdot < 0.0) : (v.zdot > 0.0));
      ++r.samples_checked;
    }
    r.verified = ok;
    rep.rules.push_back(r);
  }
  {
    DirectionRule r;
    r.line = "ell1";
    r.statement = "on the Xdot nullcline crossings are vertical; Zdot > 0 iff X < alpha";
    r.threshold = alpha;
    bool ok = true;
    for (int i = 1; i <= ns; ++i) {
      double x = wall * i / (ns + 1.0);
      if (std::fabs(x - alpha) < 1e-9) continue;
      double z = params.kappa_lower() * (wall - x);
      if (z <= 0.0) continue;
      Velocity v = vector_field({x, z}, p, params);
      ok = ok && std::fabs(v.xdot) <= 1e-11 * (1.0 + std::fabs(x));
      ok = ok && ((x < alpha) ? (v.zdot > 0.0) : (v.zdot < 0.0));
      ++r.samples_checked;
    }
    r.verified = ok;
    rep.rules.push_back(r);
  }
  {
    DirectionRule r;
    r.line = "ell2";
    r.statement = "on the Zdot nullcline crossings are horizontal; Xdot > 0 iff X < alpha";
    r.threshold = alpha;
    bool ok = true;
    LineSet ls = line_set(p, params);
    double xend = ls.z_nullcline_lower.to.X;
    for (int i = 1; i <= ns; ++i) {
      double x = xend * i / (ns + 1.0);
      if (std::fabs(x - alpha) < 1e-9) continue;
      RegionCoeffs c = x <= ls.junction.X ? coeffs_upper(params) : coeffs_lower(params);
      double z = c.divisor * (c.dim + a - p * x);
      if (z <= 0.0) continue;
      Velocity v = vector_field({x, z}, p, params);
      ok = ok && std::fabs(v.zdot) <= 1e-11 * (1.0 + std::fabs(z));
      ok = ok && ((x < alpha) ? (v.xdot > 0.0) : (v.xdot < 0.0));
      ++r.samples_checked;
    }
    r.verified = ok;
    rep.rules.push_back(r);
  }
  {
    DirectionRule r;
    r.line = "Xaxis";
    r.statement = "on the X axis Xdot < 0 iff 0 < X < ntilde-2";
    r.threshold = wall;
    bool ok = true;
    for (int i = 1; i <= ns; ++i) {
      double x = 2.0 * wall * i / (ns + 1.0);
      if (std::fabs(x - wall) < 1e-9) continue;
      Velocity v = vector_field({x, 0.0}, p, params);
      ok = ok && ((x < wall) ? (v.xdot < 0.0) : (v.xdot > 0.0));
      ok = ok && v.zdot == 0.0;
      ++r.samples_checked;
    }
    r.verified = ok;
    rep.rules.push_back(r);
  }
  {
    DirectionRule r;
    r.line = "Zaxis";
    r.statement = "on the Z axis Zdot > 0 iff 0 < Z < kappa_upper (N+a)";
    r.threshold = params.kappa_upper() * (params.N + a);
    bool ok = true;
    for (int i = 1; i <= ns; ++i) {
      double z = 2.0 * r.threshold * i / (ns + 1.0);
      if (std::fabs(z - r.threshold) < 1e-9) continue;
      Velocity v = vector_field({0.0, z}, p, params);
      ok = ok && ((z < r.threshold) ? (v.zdot > 0.0) : (v.zdot < 0.0));
      ok = ok && v.xdot == 0.0;
      ++r.samples_checked;
    }
    r.verified = ok;
    rep.rules.push_back(r);
  }
  (void)nan;
  rep.all_verified = true;
  for (const auto& r : rep.rules) rep.all_verified = rep.all_verified && r.verified;
  return rep;
}

double dulac_weight(const PhasePoint& pt, double p) {
  double mu = 2.0 / (p - 1.0);
  double nu = (3.0 - p) / (p - 1.0);
  return std::pow(pt.X, mu) * std::pow(pt.Z, nu);
}

double dulac_phi(const PhasePoint& pt, double p, const ProblemParams& params) {
  if (!(p > 1.0)) raise(errc::p_below_one, "need p > 1");
  if (!(pt.X > 0.0 && pt.Z > 0.0))
    raise(errc::outside_domain, "weighted divergence defined in the open first quadrant only");
  double level = params.concavity_level();
  if (std::fabs(pt.Z - level) <= line_tol(params))
    raise(errc::on_interface, "point lies on the concavity interface");
  RegionCoeffs c = pt.Z > level ? coeffs_upper(params) : coeffs_lower(params);
  double bracket = (c.dim + 2.0 + 2.0 * params.a) - p * (c.dim - 2.0);
  return dulac_weight(pt, p) * bracket / (p - 1.0);
}

namespace {

// strict segment-crossing test; shared endpoints and touching do not count
bool segments_cross(const PhasePoint& a, const PhasePoint& b, const PhasePoint& c,
                    const PhasePoint& d) {
  auto orient = [](const PhasePoint& p0, const PhasePoint& p1, const PhasePoint& p2) {
    return (p1.X - p0.X) * (p2.Z - p0.Z) - (p1.Z - p0.Z) * (p2.X - p0.X);
  };
  double o1 = orient(a, b, c), o2 = orient(a, b, d);
  double o3 = orient(c, d, a), o4 = orient(c, d, b);
  double scale = std::max({std::fabs(o1), std::fabs(o2), std::fabs(o3), std::fabs(o4), 1e-300});
  double eps = -1e-13 * scale;
  return (o1 * o2 < eps) && (o3 * o4 < eps);
}

}  // namespace

double dulac_line_integral(std::span<const PhasePoint> polyline, double p,
                           const ProblemParams& params) {
  if (polyline.size() < 4) raise(errc::open_curve, "need a closed polyline with at least 4 points");
  double scale = 0.0;
  for (const auto& q : polyline) scale = std::max(scale, std::fabs(q.X) + std::fabs(q.Z));
  const PhasePoint& first = polyline.front();
  const PhasePoint& last = polyline.back();
  double gap = std::hypot(first.X - last.X, first.Z - last.Z);
  if (gap > 1e-6 * (1.0 + scale)) raise(errc::open_curve, "polyline endpoints do not match");

  std::size_t n = polyline.size() - 1;  // closing point repeats the first
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closure
      if (segments_cross(polyline[i], polyline[i + 1], polyline[j], polyline[j + 1]))
        raise(errc::self_intersection, "polyline crosses itself");
    }
  }

  double level = params.concavity_level();
  // 5-point Gauss-Legendre nodes/weights on [0,1]
  static const double gx[5] = {0.046910077030668, 0.230765344947158, 0.5, 0.769234655052841,
                               0.953089922969332};
  static const double gw[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                               0.239314335249683, 0.118463442528095};
  auto piece = [&](const PhasePoint& A, const PhasePoint& B, double s0, double s1) {
    double dX = B.X - A.X, dZ = B.Z - A.Z;
    double acc = 0.0;
    for (int q = 0; q < 5; ++q) {
      double s = s0 + (s1 - s0) * gx[q];
      PhasePoint pt{A.X + s * dX, A.Z + s * dZ};
      if (!(pt.X > 0.0 && pt.Z > 0.0))
        raise(errc::outside_domain, "polyline leaves the open first quadrant");
      Velocity v = vector_field(pt, p, params);
      double w = dulac_weight(pt, p);
      acc += gw[q] * w * (v.xdot * dZ - v.zdot * dX);
    }
    return acc * (s1 - s0);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PhasePoint& A = polyline[i];
    const PhasePoint& B = polyline[i + 1];
    // split where the segment crosses the interface: the field has a kink there
    double za = A.Z - level, zb = B.Z - level;
    if (za * zb < 0.0) {
      double s = za / (za - zb);
      total += piece(A, B, 0.0, s) + piece(A, B, s, 1.0);
    } else {
      total += piece(A, B, 0.0, 1.0);
    }
  }
  return total;
}

}  // namespace pucci
