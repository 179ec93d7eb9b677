#include "pucci/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pucci/field.hpp"
#include "pucci/ode.hpp"
#include "pucci/stationary.hpp"

namespace pucci {

namespace {

using V2 = StateVec<2>;

// odd power keeps the right-hand side usable when a root search pokes past u=0
double odd_pow(double u, double p) {
  return u >= 0.0 ? std::pow(u, p) : -std::pow(-u, p);
}

double wall_floor(double gamma) { return 1e-12 * gamma; }

struct Window {
  std::vector<double> lr, lu, w;  // log r, log u, r^alpha u
};

Window window_of(const std::vector<RadialSample>& samples, double r_lo, double r_hi,
                 double alpha) {
  Window win;
  for (const auto& s : samples) {
    if (s.r < r_lo || s.r > r_hi || !(s.u > 0.0)) continue;
    win.lr.push_back(std::log(s.r));
    win.lu.push_back(std::log(s.u));
    win.w.push_back(std::pow(s.r, alpha) * s.u);
  }
  return win;
}

std::optional<double> fit_slope(const Window& win) {
  std::size_t n = win.lr.size();
  if (n < 5) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += win.lr[i];
    my += win.lu[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (win.lr[i] - mx) * (win.lr[i] - mx);
    sxy += (win.lr[i] - mx) * (win.lu[i] - my);
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

struct ExtremaTrack {
  std::vector<double> values;  // alternating local extrema of r^alpha u, in order
  int recent = 0;              // extrema inside the last two decades of r
};

// zigzag scan with a relative prominence filter so solver-level wiggles are
// not mistaken for oscillation; an extremum attained at the very first
// sample is the startup boundary, not a turning point, and is skipped
ExtremaTrack extrema_of(const std::vector<RadialSample>& samples, double alpha) {
  ExtremaTrack tr;
  std::vector<double> w, r;
  double wmax_all = 0.0;
  for (const auto& s : samples) {
    if (!(s.u > 0.0)) continue;
    double v = std::pow(s.r, alpha) * s.u;
    w.push_back(v);
    r.push_back(s.r);
    wmax_all = std::max(wmax_all, v);
  }
  if (w.size() < 3) return tr;
  double prom = 1e-7 * wmax_all;
  double r_recent = samples.back().r / 100.0;
  double hi = w[0], lo = w[0];
  std::size_t ihi = 0, ilo = 0;
  int mode = 0;  // -1 hunting a minimum next, +1 hunting a maximum, 0 either
  for (std::size_t i = 1; i < w.size(); ++i) {
    double v = w[i];
    if (v > hi) { hi = v; ihi = i; }
    if (v < lo) { lo = v; ilo = i; }
    if (mode >= 0 && hi - v > prom) {
      if (ihi > 0) {
        tr.values.push_back(hi);
        if (r[ihi] >= r_recent) ++tr.recent;
      }
      mode = -1;
      lo = v;
      ilo = i;
    } else if (mode <= 0 && v - lo > prom) {
      if (ilo > 0) {
        tr.values.push_back(lo);
        if (r[ilo] >= r_recent) ++tr.recent;
      }
      mode = 1;
      hi = v;
      ihi = i;
    }
  }
  return tr;
}

// Tail taxonomy.  An oscillating r^alpha u is judged by the contraction of
// its swing amplitudes one period apart: a limit cycle keeps them (ratio
// near 1) while a spiral sink shrinks them geometrically.  Monotone tails
// are split by the log-log slope, near -(ntilde-2) for fast decay and near
// -alpha for slow decay.  `oscillatory` reports which route decided, so
// the caller can refuse to halt early on a still-developing oscillation.
RadialClass classify_tail(const std::vector<RadialSample>& samples, double p,
                          const ProblemParams& params, bool* oscillatory = nullptr) {
  if (oscillatory) *oscillatory = false;
  if (samples.size() < 8) return RadialClass::Undetermined;
  double r_end = samples.back().r;
  double alpha = alpha_of(params, p);
  ExtremaTrack tr = extrema_of(samples, alpha);
  const std::vector<double>& e = tr.values;
  if (e.size() >= 4) {
    if (oscillatory) *oscillatory = true;
    std::vector<double> s;  // half-swing amplitudes
    for (std::size_t i = 1; i < e.size(); ++i) s.push_back(std::fabs(e[i] - e[i - 1]));
    double mid = 0.5 * (e[e.size() - 1] + e[e.size() - 2]);
    if (!(mid > 0.0)) return RadialClass::Undetermined;
    if (s.back() < 1e-3 * mid) return RadialClass::SlowDecay;
    // swings one full period apart share parity: compare s[k+2] with s[k]
    double q = s[s.size() - 1] / s[s.size() - 3];
    return q >= 0.93 ? RadialClass::PseudoSlowDecay : RadialClass::SlowDecay;
  }
  auto slope = fit_slope(window_of(samples, r_end / 10.0, r_end, alpha));
  if (!slope) return RadialClass::Undetermined;
  double d_fast = std::fabs(*slope - (-(params.ntilde() - 2.0)));
  double d_slow = std::fabs(*slope + alpha);
  if (std::min(d_fast, d_slow) > 0.05) return RadialClass::Undetermined;
  // a tail that is still turning is unresolved, not slow; a settled
  // overshoot no longer counts as recent
  if (d_slow <= d_fast && tr.recent >= 2) return RadialClass::Undetermined;
  return d_fast < d_slow ? RadialClass::FastDecay : RadialClass::SlowDecay;
}

}  // namespace

const char* radial_class_name(RadialClass c) {
  switch (c) {
    case RadialClass::Undetermined: return "Undetermined";
    case RadialClass::VanishesAtFiniteRadius: return "VanishesAtFiniteRadius";
    case RadialClass::FastDecay: return "FastDecay";
    case RadialClass::SlowDecay: return "SlowDecay";
    case RadialClass::PseudoSlowDecay: return "PseudoSlowDecay";
  }
  return "?";
}

const char* origin_class_name(OriginClass c) {
  switch (c) {
    case OriginClass::Unspecified: return "Unspecified";
    case OriginClass::RegularAtOrigin: return "RegularAtOrigin";
    case OriginClass::DimensionLikeBlowUp: return "DimensionLikeBlowUp";
    case OriginClass::AlphaBlowUp: return "AlphaBlowUp";
    case OriginClass::PseudoBlowUp: return "PseudoBlowUp";
  }
  return "?";
}

double radial_second_derivative(double r, double u, double du, double p,
                                const ProblemParams& params) {
  if (!(r > 0.0)) raise(errc::invalid_argument, "radius must be positive");
  double kv = du <= 0.0 ? params.kappa_upper() : params.kappa_lower();
  double w = -(kv * (params.N - 1) * du / r + std::pow(r, params.a) * odd_pow(u, p));
  return extremal_slope(w, params);
}

RadialSolution reconstruct_u(const Trajectory& traj, double p, const ProblemParams& params,
                             std::optional<std::pair<double, double>> anchor) {
  if (traj.samples.empty()) raise(errc::empty_trajectory, "trajectory holds no samples");
  double alpha = alpha_of(params, p);

  std::vector<TrajectorySample> ordered = traj.samples;
  std::sort(ordered.begin(), ordered.end(),
            [](const TrajectorySample& a, const TrajectorySample& b) { return a.t < b.t; });

  // samples with X or Z at the integrator's absolute-tolerance scale carry no
  // relative precision, and (XZ)^{1/(p-1)} inherits that noise; they are
  // dropped so the emitted profile meets the residual contract
  constexpr double kConditionFloor = 1e-5;

  RadialSolution sol;
  sol.p = p;
  double last_t = -std::numeric_limits<double>::infinity();
  for (const auto& s : ordered) {
    if (s.t - last_t <= 1e-15 * std::max(1.0, std::fabs(s.t))) continue;
    double xz = s.point.X * s.point.Z;
    if (!(s.point.X > 0.0) || !(s.point.Z > 0.0)) {
      std::ostringstream os;
      os << "sample at t=" << s.t << " has XZ=" << xz << " outside (0,inf)";
      raise(errc::non_positive_xz, os.str());
    }
    if (std::min(s.point.X, s.point.Z) < kConditionFloor) continue;
    last_t = s.t;
    RadialSample rs;
    rs.r = std::exp(s.t);
    rs.u = std::exp(-alpha * s.t) * std::pow(xz, 1.0 / (p - 1.0));
    rs.du = -s.point.X * rs.u / rs.r;
    rs.ddu = radial_second_derivative(rs.r, rs.u, rs.du, p, params);
    sol.samples.push_back(rs);
  }

  if (anchor) {
    auto [t0, u0] = *anchor;
    if (!(u0 > 0.0)) raise(errc::invalid_argument, "anchor value must be positive");
    if (t0 < ordered.front().t || t0 > ordered.back().t)
      raise(errc::invalid_argument, "anchor time outside the trajectory range");
    // canonical profile at t0 via log-linear interpolation of XZ
    double lxz = 0.0;
    for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
      double ta = ordered[i].t, tb = ordered[i + 1].t;
      if (t0 < ta || t0 > tb) continue;
      double la = std::log(ordered[i].point.X * ordered[i].point.Z);
      double lb = std::log(ordered[i + 1].point.X * ordered[i + 1].point.Z);
      double f = tb > ta ? (t0 - ta) / (tb - ta) : 0.0;
      lxz = la + f * (lb - la);
      break;
    }
    double u_canon = std::exp(-alpha * t0 + lxz / (p - 1.0));
    if (std::fabs(u0 - u_canon) > 1e-6 * std::max(u0, u_canon)) {
      std::ostringstream os;
      os << "anchor u0=" << u0 << " disagrees with the canonical profile " << u_canon
         << " at t0=" << t0;
      raise(errc::invalid_argument, os.str());
    }
  }

  for (const auto& e : traj.events) {
    if (e.kind == EventKind::ConcavityCross) sol.concavity_radii.push_back(std::exp(e.t));
    if (e.kind == EventKind::BlowUpX) {
      auto t2 = blowup_time_estimate(e.point, e.t, traj.direction, EventKind::BlowUpX, params);
      sol.wall_radius = std::exp(t2 ? *t2 : e.t);
      if (traj.direction == Direction::Forward)
        sol.classification = RadialClass::VanishesAtFiniteRadius;
    }
  }
  std::sort(sol.concavity_radii.begin(), sol.concavity_radii.end());
  if (sol.samples.empty())
    raise(errc::empty_trajectory, "no well-conditioned samples to reconstruct from");
  return sol;
}

Trajectory to_phase(const RadialSolution& sol, const ProblemParams& params) {
  Trajectory traj;
  traj.direction = Direction::Forward;
  double p = sol.p;
  for (const auto& s : sol.samples) {
    if (!(s.u > 0.0)) raise(errc::invalid_argument, "profile sample with u <= 0");
    if (s.du == 0.0) {
      std::ostringstream os;
      os << "u' vanishes at r=" << s.r << ", phase map undefined";
      raise(errc::vanishing_derivative, os.str());
    }
    PhasePoint pt{-s.r * s.du / s.u, -std::pow(s.r, 1.0 + params.a) * std::pow(s.u, p) / s.du};
    traj.samples.push_back({std::log(s.r), pt, region_of(pt, params)});
  }
  return traj;
}

RadialSolution shoot_regular(double gamma, double p, const ProblemParams& params, double r_max,
                             const ShootOptions& opts) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    raise(errc::invalid_argument, "need a positive finite gamma");
  alpha_of(params, p);  // validates p > 1
  double kappa = params.kappa_upper();
  double r0 = 1e-6 * std::pow(gamma, -(p - 1.0) / (2.0 + params.a));
  if (!(r_max > 100.0 * r0)) {
    std::ostringstream os;
    os << "r_max=" << r_max << " must exceed 100x the startup radius " << r0;
    raise(errc::invalid_argument, os.str());
  }

  double c0 = std::pow(gamma, p) / (kappa * (params.N + params.a));
  double u0 = gamma - c0 * std::pow(r0, 2.0 + params.a) / (2.0 + params.a);
  double v0 = -c0 * std::pow(r0, 1.0 + params.a);

  RadialSolution sol;
  sol.p = p;
  sol.gamma = gamma;
  sol.origin = OriginClass::RegularAtOrigin;

  // integrate in s = ln r for uniform resolution over many decades
  auto rhs = [&](double s, const V2& y, V2& dy) {
    double r = std::exp(s);
    dy[0] = r * y[1];
    dy[1] = r * radial_second_derivative(r, y[0], y[1], p, params);
  };
  auto stepper = make_dopri5<2>(rhs, opts.rtol, opts.atol_scale * gamma);
  stepper.set_max_step(0.25);
  double s0 = std::log(r0);
  double s_end = std::log(r_max);
  stepper.init(s0, V2{u0, v0});

  auto push = [&](double s, double u, double v) {
    RadialSample rs;
    rs.r = std::exp(s);
    rs.u = u;
    rs.du = v;
    rs.ddu = radial_second_derivative(rs.r, u, v, p, params);
    sol.samples.push_back(rs);
  };
  push(s0, u0, v0);

  double floor_u = wall_floor(gamma);
  auto conc_gap = [&](double s, const V2& y) {
    double r = std::exp(s);
    double kv = y[1] <= 0.0 ? params.kappa_upper() : params.kappa_lower();
    return -(kv * (params.N - 1) * y[1] / r + std::pow(r, params.a) * odd_pow(y[0], p));
  };

  RadialClass streak_class = RadialClass::Undetermined;
  int streak = 0;
  double next_check = s0 + 2.0 * std::log(10.0);  // first check after two decades

  std::size_t nsteps = 0;
  while (nsteps < opts.max_steps) {
    DenseStep<2> ds;
    stepper.step(ds);
    ++nsteps;
    double sa = ds.t0;
    double sb = ds.t0 + ds.h;
    bool clipped = false;
    if (sb >= s_end) {
      sb = s_end;
      clipped = true;
    }

    // locate a crossing of `f` inside [lo,hi] given a sign change
    auto bisect = [&](auto&& f, double lo, double hi) {
      double flo = f(lo);
      for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    };

    constexpr int kScan = 4;
    double sv[kScan + 1];
    V2 yv[kScan + 1];
    for (int i = 0; i <= kScan; ++i) {
      sv[i] = sa + (sb - sa) * i / kScan;
      yv[i] = ds.eval(sv[i]);
    }

    bool resumed = false;
    for (int i = 0; i < kScan && !resumed; ++i) {
      // wall: u crosses the floor; land on the far side so the recorded
      // profile ends at or just below it
      if ((yv[i][0] - floor_u) * (yv[i + 1][0] - floor_u) < 0.0) {
        double lo_s = sv[i], hi_s = sv[i + 1];
        for (int k = 0; k < 90 && hi_s - lo_s > 1e-15 * std::max(1.0, std::fabs(hi_s)); ++k) {
          double mid = 0.5 * (lo_s + hi_s);
          (ds.eval(mid)[0] > floor_u ? lo_s : hi_s) = mid;
        }
        double sc = hi_s;
        V2 yc = ds.eval(sc);
        double rc = std::exp(sc);
        push(sc, yc[0], yc[1]);
        double reach = yc[1] < 0.0 ? yc[0] / -yc[1] : std::numeric_limits<double>::infinity();
        if (reach < 0.05 * rc) {
          // transversal zero just ahead: a genuine wall
          sol.wall_radius = rc + reach;
          sol.classification = RadialClass::VanishesAtFiniteRadius;
        } else {
          // u slid under the floor by decay, not by a zero crossing
          sol.classification = classify_tail(sol.samples, p, params);
        }
        return sol;
      }
      // concavity switch: u'' changes sign
      double ga = conc_gap(sv[i], yv[i]);
      double gb = conc_gap(sv[i + 1], yv[i + 1]);
      if (ga * gb < 0.0) {
        double sc = bisect([&](double s) { return conc_gap(s, ds.eval(s)); }, sv[i], sv[i + 1]);
        V2 yc = ds.eval(sc);
        push(sc, yc[0], yc[1]);
        sol.concavity_radii.push_back(std::exp(sc));
        double resume = std::min(sc + 1e-12 * std::max(1.0, std::fabs(sc)), sb);
        stepper.reset(resume, ds.eval(resume));
        resumed = true;
      }
    }
    if (resumed) continue;

    push(sb, yv[kScan][0], yv[kScan][1]);
    if (clipped) break;

    if (opts.early_halt && sb >= next_check) {
      next_check += std::log(10.0);
      bool oscillatory = false;
      RadialClass cls = classify_tail(sol.samples, p, params, &oscillatory);
      // oscillatory verdicts keep sharpening as swings accumulate, so they
      // are never grounds for an early stop; monotone ones are stable
      if (oscillatory || cls == RadialClass::Undetermined) {
        streak = 0;
        streak_class = RadialClass::Undetermined;
      } else {
        streak = cls == streak_class ? streak + 1 : 1;
        streak_class = cls;
        int need = cls == RadialClass::FastDecay ? 2 : 3;
        if (streak >= need) {
          sol.classification = cls;
          return sol;
        }
      }
    }
  }

  sol.classification = classify_tail(sol.samples, p, params);
  return sol;
}

DecayConstants decay_constants(const RadialSolution& sol, const ProblemParams& params) {
  DecayConstants out;
  if (sol.samples.empty() || sol.classification == RadialClass::Undetermined)
    raise(errc::unresolved_fate, "profile classification is not resolved");
  double alpha = alpha_of(params, sol.p);
  const RadialSample& last = sol.samples.back();
  switch (sol.classification) {
    case RadialClass::VanishesAtFiniteRadius: break;  // no decay constants at a wall
    case RadialClass::FastDecay:
      out.c_fast = last.u * std::pow(last.r, params.ntilde() - 2.0);
      break;
    case RadialClass::SlowDecay:
      out.c_slow = last.u * std::pow(last.r, alpha);
      break;
    case RadialClass::PseudoSlowDecay: {
      // the most recent committed swing brackets the limiting oscillation
      // band; a fixed trailing window can be shorter than one period
      ExtremaTrack tr = extrema_of(sol.samples, alpha);
      if (tr.values.size() >= 2) {
        double e1 = tr.values[tr.values.size() - 2];
        double e2 = tr.values[tr.values.size() - 1];
        out.c1 = std::min(e1, e2);
        out.c2 = std::max(e1, e2);
      }
      break;
    }
    default: break;
  }
  return out;
}

DecayConstants decay_constants(const Trajectory& traj, const OrbitFate& fate, double p,
                               const ProblemParams& params) {
  DecayConstants out;
  double alpha = alpha_of(params, p);
  switch (fate.kind) {
    case FateKind::ToStationary: {
      if (!fate.stationary) raise(errc::unresolved_fate, "capture label missing");
      if (*fate.stationary == SPLabel::A0) {
        if (traj.samples.empty()) raise(errc::unresolved_fate, "no samples to evaluate");
        const TrajectorySample& s = traj.samples.back();
        out.c_fast = std::exp(s.t * (params.ntilde() - 2.0 - alpha)) *
                     std::pow(s.point.X * s.point.Z, 1.0 / (p - 1.0));
      } else if (*fate.stationary == SPLabel::M0) {
        PhasePoint m0 = stationary_location(SPLabel::M0, p, params);
        out.c_slow = std::pow(m0.X * m0.Z, 1.0 / (p - 1.0));
      }
      break;
    }
    case FateKind::ToPeriodicOrbit: {
      if (traj.samples.empty()) raise(errc::unresolved_fate, "no samples to evaluate");
      double xz_min = std::numeric_limits<double>::infinity();
      double xz_max = -xz_min;
      std::size_t from = traj.samples.size() - traj.samples.size() / 4 - 1;
      for (std::size_t i = from; i < traj.samples.size(); ++i) {
        double xz = traj.samples[i].point.X * traj.samples[i].point.Z;
        xz_min = std::min(xz_min, xz);
        xz_max = std::max(xz_max, xz);
      }
      out.c1 = std::pow(xz_min, 1.0 / (p - 1.0));
      out.c2 = std::pow(xz_max, 1.0 / (p - 1.0));
      break;
    }
    case FateKind::BlowUpX:
    case FateKind::BlowUpZ: break;
    case FateKind::Undetermined: raise(errc::unresolved_fate, "orbit fate is undetermined");
  }
  return out;
}

DecayConstants decay_constants(const PeriodicOrbit& orbit, double p, const ProblemParams&) {
  DecayConstants out;
  out.c1 = std::pow(orbit.xz_min, 1.0 / (p - 1.0));
  out.c2 = std::pow(orbit.xz_max, 1.0 / (p - 1.0));
  return out;
}

EnergyValue energy(double t, const PhasePoint& pt, double p, const ProblemParams& params) {
  double alpha = alpha_of(params, p);
  double level = params.concavity_level();
  if (!(pt.X > 0.0) || !(pt.Z > 0.0) || pt.Z - level > kLineTol * std::max(1.0, level)) {
    std::ostringstream os;
    os << "energy needs a point below the concavity interface, got (" << pt.X << ", " << pt.Z
       << ")";
    raise(errc::wrong_region, os.str());
  }
  double nt = params.ntilde();
  double klo = params.kappa_lower();
  EnergyValue ev;
  ev.region_valid = true;
  ev.value = std::exp(t * (nt - 2.0 - 2.0 * alpha)) *
             std::pow(pt.X * pt.Z, 2.0 / (p - 1.0)) * pt.X *
             (pt.X / 2.0 + pt.Z / (klo * (p + 1.0)) - (nt + params.a) / (p + 1.0));
  return ev;
}

EnergyValue energy(const RadialSample& s, double p, const ProblemParams& params) {
  if (s.ddu < 0.0) {
    std::ostringstream os;
    os << "radial energy needs u'' >= 0, got " << s.ddu << " at r=" << s.r;
    raise(errc::wrong_region, os.str());
  }
  double nt = params.ntilde();
  double klo = params.kappa_lower();
  EnergyValue ev;
  ev.region_valid = true;
  ev.value = std::pow(s.r, nt) *
                 (s.du * s.du / 2.0 +
                  std::pow(s.r, params.a) * std::pow(s.u, p + 1.0) / (klo * (p + 1.0))) +
             (nt + params.a) / (p + 1.0) * s.u * s.du * std::pow(s.r, nt - 1.0);
  return ev;
}

double level_h(double X, double p, const ProblemParams& params) {
  return (params.ntilde() + params.a - p * X) * std::pow(X, p);
}

double max_relative_residual(const RadialSolution& sol, const ProblemParams& params) {
  double worst = 0.0;
  double p = sol.p;
  for (const auto& s : sol.samples) {
    double formula = radial_second_derivative(s.r, s.u, s.du, p, params);
    double scale = std::fabs(formula) + std::fabs(s.du) / s.r +
                   std::pow(s.r, params.a) * std::pow(std::fabs(s.u), p) + 1e-300;
    worst = std::max(worst, std::fabs(s.ddu - formula) / scale);
  }
  // step from each sample to the next and compare against the stored state
  auto rhs = [&](double t, const V2& y, V2& dy) {
    double r = std::exp(t);
    dy[0] = r * y[1];
    dy[1] = r * radial_second_derivative(r, y[0], y[1], p, params);
  };
  double uscale = 0.0;
  for (const auto& s : sol.samples) uscale = std::max(uscale, std::fabs(s.u));
  for (std::size_t i = 0; i + 1 < sol.samples.size(); ++i) {
    const RadialSample& a = sol.samples[i];
    const RadialSample& b = sol.samples[i + 1];
    double sa = std::log(a.r), sb = std::log(b.r);
    if (sb - sa <= 1e-13) continue;
    auto st = make_dopri5<2>(rhs, 1e-12, 1e-18 * uscale);
    st.set_max_step(sb - sa);
    st.init(sa, V2{a.u, a.du});
    while (st.t() < sb) {
      DenseStep<2> ds;
      st.step(ds);
      if (st.t() >= sb) {
        V2 yb = ds.eval(sb);
        double du_scale = std::fabs(b.du) + std::fabs(b.u) / b.r + 1e-300;
        // near a wall u itself vanishes, so measure the defect against the
        // distance u travels over the step instead of the endpoint value
        double u_scale = std::fabs(b.u) + std::fabs(b.du) * (b.r - a.r) + 1e-300;
        worst = std::max(worst, std::fabs(yb[0] - b.u) / u_scale);
        worst = std::max(worst, std::fabs(yb[1] - b.du) / du_scale);
        break;
      }
    }
  }
  return worst;
}

}  // namespace pucci
