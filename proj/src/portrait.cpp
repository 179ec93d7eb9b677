#include "pucci/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <vector>

#include "pucci/classify.hpp"
#include "pucci/field.hpp"
#include "pucci/flow.hpp"
#include "pucci/stationary.hpp"

namespace pucci {

namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string num6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Mapper {
  double xmin, xmax, zmin, zmax, w, h;
  double sx(double x) const { return (x - xmin) / (xmax - xmin) * w; }
  double sy(double z) const { return h - (z - zmin) / (zmax - zmin) * h; }
};

// Liang-Barsky clip of the segment a-b to the view rectangle, in world coords.
bool clip_segment(const Mapper& m, PhasePoint& a, PhasePoint& b) {
  double t0 = 0.0, t1 = 1.0;
  double dx = b.X - a.X, dz = b.Z - a.Z;
  double p[4] = {-dx, dx, -dz, dz};
  double q[4] = {a.X - m.xmin, m.xmax - a.X, a.Z - m.zmin, m.zmax - a.Z};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      double r = q[i] / p[i];
      if (p[i] < 0.0) {
        if (r > t1) return false;
        if (r > t0) t0 = r;
      } else {
        if (r < t0) return false;
        if (r < t1) t1 = r;
      }
    }
  }
  PhasePoint na{a.X + t0 * dx, a.Z + t0 * dz};
  PhasePoint nb{a.X + t1 * dx, a.Z + t1 * dz};
  a = na;
  b = nb;
  return true;
}

class Svg {
 public:
  Svg(const Mapper& m) : m_(m) {}

  void line(double x1, double z1, double x2, double z2, const std::string& style) {
    PhasePoint a{x1, z1}, b{x2, z2};
    if (!clip_segment(m_, a, b)) return;
    os_ << "<line x1=\"" << px(m_.sx(a.X)) << "\" y1=\"" << px(m_.sy(a.Z)) << "\" x2=\""
        << px(m_.sx(b.X)) << "\" y2=\"" << px(m_.sy(b.Z)) << "\" " << style << "/>\n";
  }

  void arrow_px(double cx, double cy, double ux, double uy, double len) {
    double x1 = cx - ux * len / 2, y1 = cy - uy * len / 2;
    double x2 = cx + ux * len / 2, y2 = cy + uy * len / 2;
    os_ << "<line x1=\"" << px(x1) << "\" y1=\"" << px(y1) << "\" x2=\"" << px(x2) << "\" y2=\""
        << px(y2) << "\" marker-end=\"url(#ah)\"/>\n";
  }

  // polyline through world points, split into visible pieces
  void polyline(const std::vector<PhasePoint>& pts, const std::string& style) {
    std::vector<std::string> runs;
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) runs.push_back(cur);
      cur.clear();
    };
    PhasePoint last_out{};
    bool have_last = false;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      PhasePoint a = pts[i], b = pts[i + 1];
      if (!clip_segment(m_, a, b)) {
        flush();
        have_last = false;
        continue;
      }
      bool fresh = !have_last || std::fabs(a.X - last_out.X) + std::fabs(a.Z - last_out.Z) >
                                     1e-12 * (1.0 + std::fabs(a.X) + std::fabs(a.Z));
      if (fresh) {
        flush();
        cur = px(m_.sx(a.X)) + "," + px(m_.sy(a.Z));
      }
      cur += " " + px(m_.sx(b.X)) + "," + px(m_.sy(b.Z));
      last_out = b;
      have_last = true;
    }
    flush();
    for (const auto& r : runs)
      os_ << "<polyline fill=\"none\" points=\"" << r << "\" " << style << "/>\n";
  }

  void circle(double x, double z, double r_px, const std::string& style) {
    os_ << "<circle cx=\"" << px(m_.sx(x)) << "\" cy=\"" << px(m_.sy(z)) << "\" r=\"" << px(r_px)
        << "\" " << style << "/>\n";
  }

  void diamond(double x, double z, double r_px, const std::string& style) {
    double cx = m_.sx(x), cy = m_.sy(z);
    os_ << "<path d=\"M" << px(cx) << "," << px(cy - r_px) << " L" << px(cx + r_px) << "," << px(cy)
        << " L" << px(cx) << "," << px(cy + r_px) << " L" << px(cx - r_px) << "," << px(cy)
        << " Z\" " << style << "/>\n";
  }

  void square(double x, double z, double r_px, const std::string& style) {
    double cx = m_.sx(x), cy = m_.sy(z);
    os_ << "<rect x=\"" << px(cx - r_px) << "\" y=\"" << px(cy - r_px) << "\" width=\""
        << px(2 * r_px) << "\" height=\"" << px(2 * r_px) << "\" " << style << "/>\n";
  }

  void text(double x, double z, double dx_px, double dy_px, const std::string& s,
            const std::string& style = "") {
    os_ << "<text x=\"" << px(m_.sx(x) + dx_px) << "\" y=\"" << px(m_.sy(z) + dy_px) << "\" "
        << style << ">" << s << "</text>\n";
  }

  void text_px(double xp, double yp, const std::string& s, const std::string& style = "") {
    os_ << "<text x=\"" << px(xp) << "\" y=\"" << px(yp) << "\" " << style << ">" << s
        << "</text>\n";
  }

  void raw(const std::string& s) { os_ << s; }
  std::string str() const { return os_.str(); }

 private:
  const Mapper& m_;
  std::ostringstream os_;
};

std::vector<PhasePoint> thinned(const std::vector<TrajectorySample>& samples, std::size_t cap) {
  std::vector<PhasePoint> pts;
  std::size_t n = samples.size();
  if (n == 0) return pts;
  std::size_t stride = n > cap ? n / cap + 1 : 1;
  for (std::size_t i = 0; i < n; i += stride) pts.push_back(samples[i].point);
  if ((n - 1) % stride != 0) pts.push_back(samples[n - 1].point);
  return pts;
}

void draw_stationary(Svg& svg, const StationaryPoint& sp) {
  const std::string solid = "fill=\"#111\" stroke=\"none\"";
  const std::string open = "fill=\"#fff\" stroke=\"#111\" stroke-width=\"1.5\"";
  switch (sp.cls) {
    case SPClass::Source: svg.circle(sp.location.X, sp.location.Z, 5.0, open); break;
    case SPClass::Sink: svg.circle(sp.location.X, sp.location.Z, 5.0, solid); break;
    case SPClass::Saddle: svg.diamond(sp.location.X, sp.location.Z, 6.0, open); break;
    case SPClass::Center:
      svg.circle(sp.location.X, sp.location.Z, 5.0, open);
      svg.circle(sp.location.X, sp.location.Z, 1.8, solid);
      break;
    case SPClass::NonHyperbolic: svg.square(sp.location.X, sp.location.Z, 4.5, open); break;
  }
  svg.text(sp.location.X, sp.location.Z, 8.0, -8.0, sp_label_name(sp.label));
}

}  // namespace

std::string render_portrait(double p, const ProblemParams& params, const PortraitOptions& opts) {
  exponents(params, p);  // validates p > 1 up front

  double wall = params.wall_x();
  double top = params.kappa_upper() * (params.N + params.a);
  double mx = opts.margin_frac * wall, mz = opts.margin_frac * top;
  Mapper m{-mx, wall + mx, -mz, top + mz, opts.width, opts.height};
  Svg svg(m);

  std::ostringstream head;
  head << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << px(opts.width) << " "
       << px(opts.height) << "\" font-family=\"sans-serif\" font-size=\"13\">\n"
       << "<defs><marker id=\"ah\" viewBox=\"0 0 10 10\" refX=\"8\" refY=\"5\" markerWidth=\"5\" "
          "markerHeight=\"5\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" "
          "fill=\"#8899aa\"/></marker></defs>\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg.raw(head.str());

  // vector-field arrows on a uniform grid over the invariant box
  svg.raw("<g stroke=\"#8899aa\" stroke-width=\"1\">\n");
  double cell = std::min(opts.width / opts.grid_w, opts.height / opts.grid_h);
  for (int i = 0; i < opts.grid_w; ++i) {
    for (int j = 0; j < opts.grid_h; ++j) {
      double x = (i + 0.5) * wall / opts.grid_w;
      double z = (j + 0.5) * top / opts.grid_h;
      Velocity v = vector_field({x, z}, p, params);
      double n = std::hypot(v.xdot, v.zdot);
      if (n < 1e-14) continue;
      // pixel-space direction: z points up, pixels point down
      svg.arrow_px(m.sx(x), m.sy(z), v.xdot / n, -v.zdot / n, cell * 0.55);
    }
  }
  svg.raw("</g>\n");

  // quadrant axes
  const std::string axis = "stroke=\"#111\" stroke-width=\"1.2\"";
  svg.line(m.xmin, 0.0, m.xmax, 0.0, axis);
  svg.line(0.0, m.zmin, 0.0, m.zmax, axis);
  svg.text(m.xmax, 0.0, -14.0, -6.0, "X");
  svg.text(0.0, m.zmax, 6.0, 14.0, "Z");

  // structural lines
  LineSet ls = line_set(p, params);
  const std::string ell_style = "stroke=\"#555\" stroke-width=\"1.2\" stroke-dasharray=\"7,4\"";
  const std::string null_style = "stroke=\"#b8860b\" stroke-width=\"1.4\"";
  const std::string wall_style = "stroke=\"#555\" stroke-width=\"1.2\" stroke-dasharray=\"2,3\"";
  svg.line(m.xmin, ls.concavity_level, m.xmax, ls.concavity_level, ell_style);
  svg.line(ls.wall_x, m.zmin, ls.wall_x, m.zmax, wall_style);
  svg.line(ls.x_nullcline.from.X, ls.x_nullcline.from.Z, ls.x_nullcline.to.X,
           ls.x_nullcline.to.Z, null_style);
  svg.line(ls.z_nullcline_upper.from.X, ls.z_nullcline_upper.from.Z, ls.z_nullcline_upper.to.X,
           ls.z_nullcline_upper.to.Z, null_style);
  svg.line(ls.z_nullcline_lower.from.X, ls.z_nullcline_lower.from.Z, ls.z_nullcline_lower.to.X,
           ls.z_nullcline_lower.to.Z, null_style);
  svg.text(m.xmax, ls.concavity_level, -18.0, -5.0, "ℓ");
  svg.text(ls.wall_x, m.zmax, 5.0, 16.0, "wall");
  {
    PhasePoint mid1{0.5 * (ls.x_nullcline.from.X + ls.x_nullcline.to.X),
                    0.5 * (ls.x_nullcline.from.Z + ls.x_nullcline.to.Z)};
    svg.text(mid1.X, mid1.Z, 6.0, 14.0, "ℓ" "1");
    svg.text(ls.z_nullcline_upper.from.X, ls.z_nullcline_upper.from.Z, 6.0, -6.0, "ℓ" "2");
  }

  // orbits
  FlowOptions fo;
  if (opts.draw_gamma) {
    Trajectory gamma = gamma_orbit(p, params, fo);
    auto pts = thinned(gamma.samples, 2500);
    svg.raw("<g stroke=\"#1f77b4\" stroke-width=\"1.7\">\n");
    svg.polyline(pts, "");
    svg.raw("</g>\n");
    if (!pts.empty())
      svg.text(pts.front().X, pts.front().Z, -16.0, 4.0, "Γ",
               "fill=\"#1f77b4\" font-weight=\"bold\"");
  }
  if (opts.draw_upsilon && p > p_serrin(params)) {
    try {
      Trajectory ups = upsilon_orbit(p, params, fo);
      auto pts = thinned(ups.samples, 2500);
      svg.raw("<g stroke=\"#d62728\" stroke-width=\"1.7\">\n");
      svg.polyline(pts, "");
      svg.raw("</g>\n");
      if (!pts.empty())
        svg.text(pts.front().X, pts.front().Z, 8.0, -6.0, "Υ",
                 "fill=\"#d62728\" font-weight=\"bold\"");
    } catch (const error&) {
      // no fast-decay connection available at this p
    }
  }

  // closed orbits, only attempted inside the window where cycles can exist
  double pp = p_pseudo(params), pd = p_sobolev(params);
  double wlo = std::min(pp, pd), whi = std::max(pp, pd);
  if (opts.draw_cycles && p > p_serrin(params) && p >= wlo - 1e-9 && p <= whi + 1e-9) {
    try {
      CycleSearchResult cs = find_periodic_orbit(p, params, std::nullopt, fo);
      if (cs.orbit) {
        svg.raw("<g stroke=\"#2ca02c\" stroke-width=\"1.7\">\n");
        svg.polyline(cs.orbit->points, "");
        // at a nest of closed orbits the return map is the identity, so inner
        // seeds close up as well and are worth drawing
        PhasePoint m0 = stationary_location(SPLabel::M0, p, params);
        PoincareSection sec{m0.X, m0.Z};
        double zstar = cs.orbit->section_anchor.Z;
        for (double f : {0.45, 0.7}) {
          double z = m0.Z + f * (zstar - m0.Z);
          try {
            PoincareReturn pr = poincare_map(sec, {sec.x0, z}, p, params, fo);
            if (std::fabs(pr.point.Z - z) > 1e-6 * (1.0 + z)) continue;
            FlowOptions lo = fo;
            lo.horizon = pr.return_time;
            Trajectory loop = integrate({sec.x0, z}, p, params, Direction::Forward, lo);
            svg.polyline(thinned(loop.samples, 1500), "");
          } catch (const error&) {
            // inner seed escaped or failed to return, skip it
          }
        }
        svg.raw("</g>\n");
      }
    } catch (const error&) {
      // cycle search unavailable, portrait stays without closed orbits
    }
  }

  // stationary points on top of everything else
  for (const auto& sp : stationary_points(p, params))
    if (sp.in_first_quadrant) draw_stationary(svg, sp);

  std::ostringstream title;
  title << operator_name(params.op) << " phase plane, p = " << num6(p);
  svg.text_px(10.0, 20.0, title.str(), "font-weight=\"bold\"");
  std::ostringstream sub;
  sub << "lambda=" << num6(params.lambda) << " Lambda=" << num6(params.Lambda)
      << " N=" << params.N << " a=" << num6(params.a) << "  p_serrin=" << num6(p_serrin(params))
      << " p_pseudo=" << num6(pp) << " p_sobolev=" << num6(pd);
  svg.text_px(10.0, 38.0, sub.str(), "font-size=\"11\" fill=\"#333\"");

  svg.raw("</svg>\n");
  return svg.str();
}

}  // namespace pucci
