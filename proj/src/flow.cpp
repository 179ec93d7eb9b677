#include "pucci/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "pucci/ode.hpp"

namespace pucci {

namespace {

using V2 = StateVec<2>;

constexpr double kImmediateCaptureTol = 1e-12;
constexpr double kMaxStepSize = 0.5;  // keeps loops resolved for the event scan

double dist(const PhasePoint& a, const PhasePoint& b) { return std::hypot(a.X - b.X, a.Z - b.Z); }

struct CaptureTarget {
  SPLabel label;
  PhasePoint loc;
  double eps = 0.0;
  bool inside = false;
  double enter_tau = 0.0;
  double enter_d = 0.0;
};

enum class HaltReason { Horizon, Steps, Capture, HitBlowUpX, HitBlowUpZ, SectionStop };

struct CoreOutcome {
  HaltReason halt = HaltReason::Horizon;
  double tau_end = 0.0;
  PhasePoint end;
  std::size_t steps = 0;
  std::optional<SPLabel> captured;
  double capture_distance = 0.0;
  std::optional<double> blowup_t;
};

// return false to stop the run after a section crossing
using SectionCb = std::function<bool(double z, double tau)>;

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

std::optional<double> blowup_asymptote(bool first_q, EventKind kind, const PhasePoint& pt,
                                       double t_halt, double sgn, const ProblemParams& params) {
  // local closed-form tail estimate of the finite blow-up time
  if (first_q) {
    if (kind == EventKind::BlowUpX) {
      double c = (pt.Z > params.concavity_level() ? params.N : params.ntilde()) - 2.0;
      if (c > 0.0 && pt.X > c) return t_halt + sgn * std::log(pt.X / (pt.X - c)) / c;
    } else {
      double ct = params.N + params.a;
      double k = params.kappa_upper();
      if (pt.Z > k * ct) return t_halt + sgn * std::log(pt.Z / (pt.Z - k * ct)) / ct;
    }
  } else {
    RegionCoeffs c3 = coeffs_third(params);
    if (kind == EventKind::BlowUpX) {
      double c = c3.dim - 2.0;
      double ax = -pt.X;
      if (ax > 0.0 && ax + c > 0.0)
        return t_halt + sgn * (c != 0.0 ? std::log((ax + c) / ax) / c : 1.0 / ax);
    } else {
      double ct = c3.dim + params.a;
      double az = -pt.Z;
      if (az > 0.0 && ct > 0.0) return t_halt + sgn * std::log((az + c3.divisor * ct) / az) / ct;
    }
  }
  return std::nullopt;
}

struct Core {
  const PhasePoint start;
  const double p;
  const ProblemParams& params;
  const Direction dir;
  const FlowOptions& opts;
  Trajectory* rec;
  SectionCb section_cb;

  double sgn = 1.0;
  bool first_q = true;
  double level = 0.0, wall = 0.0, box_top = 0.0, x_cap = 0.0, z_cap = 0.0;
  std::vector<CaptureTarget> targets;

  struct Indicator {
    EventKind kind;
    std::function<double(const PhasePoint&)> g;
    bool halting = false;
    bool needs_check = false;  // verify |g| small at the located point (piecewise g)
  };
  std::vector<Indicator> inds;

  CoreOutcome out;

  explicit Core(const PhasePoint& s, double p_, const ProblemParams& pp, Direction d,
                const FlowOptions& o, Trajectory* r, SectionCb cb)
      : start(s), p(p_), params(pp), dir(d), opts(o), rec(r), section_cb(std::move(cb)) {}

  void record(double tau, const PhasePoint& pt) {
    if (rec) rec->samples.push_back({sgn * tau, pt, region_of(pt, params)});
  }

  void push_event(EventKind k, double tau, const PhasePoint& pt, int orient, std::string detail,
                  std::optional<SPLabel> cap = {}) {
    if (rec) rec->events.push_back({k, sgn * tau, pt, orient, cap, std::move(detail)});
  }

  Velocity flow_at(const PhasePoint& pt) const {
    if (first_q) {
      double m = extremal_slope(level - pt.Z, params);
      return {pt.X * (pt.X + 1.0 - m), pt.Z * (1.0 + params.a - p * pt.X + m)};
    }
    RegionCoeffs c3 = coeffs_third(params);
    return {pt.X * (pt.X - (c3.dim - 2.0) + pt.Z / c3.divisor),
            pt.Z * (c3.dim + params.a - p * pt.X - pt.Z / c3.divisor)};
  }

  std::string concavity_detail(const PhasePoint& pt, int orient, bool departure) const {
    std::ostringstream os;
    if (departure)
      os << "departure";
    else
      os << (orient > 0 ? "to R+" : (orient < 0 ? "to R-" : "tangent"));
    if (std::fabs(pt.X - (1.0 + params.a) / p) <= 1e-7 * (1.0 + std::fabs(pt.X))) os << " at P";
    return os.str();
  }

  void setup() {
    first_q = start.X >= 0.0 && start.Z >= 0.0;
    if (!first_q && !(start.X <= 0.0 && start.Z <= 0.0))
      raise(errc::outside_domain, "start must lie in the closed first or third quadrant");
    sgn = dir == Direction::Forward ? 1.0 : -1.0;
    level = params.concavity_level();
    wall = params.wall_x();
    box_top = params.kappa_upper() * (params.N + params.a);
    x_cap = first_q ? 1.5 * wall : 1.5 * std::max(params.ntilde_other() - 2.0, 1.0);
    z_cap = 10.0 * (level + box_top);

    if (first_q && opts.detect_capture) {
      for (SPLabel l : {SPLabel::O, SPLabel::N0, SPLabel::A0}) {
        PhasePoint loc = stationary_location(l, p, params);
        targets.push_back({l, loc, capture_radius(loc)});
      }
      if (p > p_serrin(params)) {
        PhasePoint loc = stationary_location(SPLabel::M0, p, params);
        targets.push_back({SPLabel::M0, loc, capture_radius(loc)});
      }
    }

    if (first_q) {
      inds.push_back({EventKind::ConcavityCross,
                      [this](const PhasePoint& q) { return q.Z - level; }, false, false});
      inds.push_back({EventKind::XNullclineCross,
                      [this](const PhasePoint& q) { return x_nullcline_gap(q, p, params); }, false,
                      false});
      inds.push_back({EventKind::ZNullclineCross,
                      [this](const PhasePoint& q) { return z_nullcline_gap(q, p, params); }, false,
                      true});
      inds.push_back({EventKind::WallCross,
                      [this](const PhasePoint& q) { return q.X - wall; }, false, false});
      if (opts.section)
        inds.push_back({EventKind::SectionCross,
                        [this](const PhasePoint& q) { return q.X - opts.section->x0; }, false,
                        false});
      if (opts.detect_blowup) {
        inds.push_back({EventKind::BlowUpX,
                        [this](const PhasePoint& q) { return q.X - x_cap; }, true, false});
        inds.push_back({EventKind::BlowUpZ,
                        [this](const PhasePoint& q) { return q.Z - z_cap; }, true, false});
      }
    } else if (opts.detect_blowup) {
      inds.push_back({EventKind::BlowUpX,
                      [this](const PhasePoint& q) { return -q.X - x_cap; }, true, false});
      inds.push_back({EventKind::BlowUpZ,
                      [this](const PhasePoint& q) { return -q.Z - z_cap; }, true, false});
    }
  }

  // events for a start lying exactly on one of the structural lines
  void departure_events() {
    if (!first_q) return;
    Velocity v = flow_at(start);
    double tol = 1e-12 * std::max(1.0, level);
    auto emit = [&](EventKind k, double g, double gdot) {
      if (std::fabs(g) > tol) return;
      int orient = sign_of(sgn * gdot);
      std::string detail;
      if (k == EventKind::ConcavityCross) {
        detail = concavity_detail(start, orient, true);
      } else {
        detail = "departure";
        if (k == EventKind::ZNullclineCross &&
            std::fabs(start.X - (1.0 + params.a) / p) <= 1e-7 * (1.0 + std::fabs(start.X)))
          detail += " at P";
      }
      push_event(k, 0.0, start, orient, detail);
    };
    if (start.X > 0.0 && start.Z > 0.0) {
      emit(EventKind::ConcavityCross, start.Z - level, v.zdot);
      emit(EventKind::XNullclineCross, x_nullcline_gap(start, p, params),
           v.zdot + params.kappa_lower() * v.xdot);
      emit(EventKind::ZNullclineCross, z_nullcline_gap(start, p, params), v.zdot);
      emit(EventKind::WallCross, start.X - wall, v.xdot);
    }
  }

  bool capture_check(double tau, const PhasePoint& pt) {
    for (auto& tg : targets) {
      double d = dist(pt, tg.loc);
      if (d < tg.eps) {
        if (!tg.inside) {
          tg.inside = true;
          tg.enter_tau = tau;
          tg.enter_d = d;
        } else if (tau - tg.enter_tau >= kCaptureDt && d < kCaptureFrac * tg.eps &&
                   d < tg.enter_d) {
          record(tau, pt);
          push_event(EventKind::StationaryCapture, tau, pt, 0, "sustained approach", tg.label);
          out.halt = HaltReason::Capture;
          out.captured = tg.label;
          out.capture_distance = d;
          out.tau_end = tau;
          out.end = pt;
          return true;
        }
      } else {
        tg.inside = false;
      }
    }
    return false;
  }

  CoreOutcome run() {
    setup();
    record(0.0, start);

    // a start sitting on a stationary point is already converged
    for (auto& tg : targets) {
      if (dist(start, tg.loc) <= kImmediateCaptureTol * (1.0 + std::hypot(tg.loc.X, tg.loc.Z))) {
        push_event(EventKind::StationaryCapture, 0.0, start, 0, "start at stationary point",
                   tg.label);
        out.halt = HaltReason::Capture;
        out.captured = tg.label;
        out.capture_distance = dist(start, tg.loc);
        out.end = start;
        return out;
      }
    }
    departure_events();

    auto rhs = [this](double, const V2& y, V2& dy) {
      Velocity v = flow_at({y[0], y[1]});
      dy[0] = sgn * v.xdot;
      dy[1] = sgn * v.zdot;
    };
    auto stepper = make_dopri5<2>(rhs, opts.rtol, opts.atol);
    stepper.set_max_step(kMaxStepSize);
    stepper.init(0.0, V2{start.X, start.Z});

    std::size_t nsteps = 0;
    while (true) {
      if (nsteps >= opts.max_steps) {
        out.halt = HaltReason::Steps;
        out.tau_end = stepper.t();
        out.end = {stepper.y()[0], stepper.y()[1]};
        out.steps = nsteps;
        return out;
      }
      DenseStep<2> ds;
      stepper.step(ds);
      ++nsteps;
      double tau0 = ds.t0;
      double tau1 = ds.t0 + ds.h;
      bool clipped = false;
      if (tau1 >= opts.horizon) {
        tau1 = opts.horizon;
        clipped = true;
      }

      // scan the dense output for indicator sign changes
      constexpr int kScan = 4;
      double taus[kScan + 1];
      PhasePoint pts[kScan + 1];
      for (int i = 0; i <= kScan; ++i) {
        taus[i] = tau0 + (tau1 - tau0) * i / kScan;
        V2 y = ds.eval(taus[i]);
        pts[i] = {y[0], y[1]};
      }
      struct Candidate {
        double tau;
        std::size_t ind;
      };
      std::vector<Candidate> cands;
      for (std::size_t j = 0; j < inds.size(); ++j) {
        for (int i = 0; i < kScan; ++i) {
          double ga = inds[j].g(pts[i]);
          double gb = inds[j].g(pts[i + 1]);
          if (sign_of(ga) * sign_of(gb) < 0) {
            // bisect the dense output for the crossing time
            double a = taus[i], b = taus[i + 1], va = ga;
            for (int it = 0; it < 90 && (b - a) > kEventTol * std::max(1.0, std::fabs(b)); ++it) {
              double m = 0.5 * (a + b);
              V2 ym = ds.eval(m);
              double gm = inds[j].g({ym[0], ym[1]});
              if (sign_of(gm) == sign_of(va) || gm == 0.0) {
                a = m;
                va = gm;
              } else {
                b = m;
              }
            }
            cands.push_back({0.5 * (a + b), j});
          }
        }
      }
      std::sort(cands.begin(), cands.end(),
                [](const Candidate& x, const Candidate& y) { return x.tau < y.tau; });

      bool resumed = false;
      for (const auto& c : cands) {
        const Indicator& ind = inds[c.ind];
        V2 ye = ds.eval(c.tau);
        PhasePoint pe{ye[0], ye[1]};
        Velocity ve = flow_at(pe);

        if (ind.halting) {
          // orientation: the coordinate must still be growing past the threshold
          double gdot = ind.kind == EventKind::BlowUpX ? sgn * ve.xdot : sgn * ve.zdot;
          if (!first_q) gdot = -gdot;
          if (gdot <= 0.0) continue;
          record(c.tau, pe);
          push_event(ind.kind, c.tau, pe, 1, "threshold");
          out.halt = ind.kind == EventKind::BlowUpX ? HaltReason::HitBlowUpX : HaltReason::HitBlowUpZ;
          out.tau_end = c.tau;
          out.end = pe;
          out.steps = nsteps;
          out.blowup_t = blowup_asymptote(first_q, ind.kind, pe, sgn * c.tau, sgn, params);
          return out;
        }

        if (ind.kind == EventKind::SectionCross) {
          if (sgn * ve.xdot <= 0.0) continue;  // crossings with X increasing only
          if (pe.Z <= opts.section->zmin) continue;
          push_event(ind.kind, c.tau, pe, 1, "section");
          record(c.tau, pe);
          if (section_cb && !section_cb(pe.Z, c.tau)) {
            out.halt = HaltReason::SectionStop;
            out.tau_end = c.tau;
            out.end = pe;
            out.steps = nsteps;
            return out;
          }
          continue;
        }

        if (ind.needs_check &&
            std::fabs(ind.g(pe)) > 1e-6 * std::max(1.0, level))
          continue;  // jump of the piecewise indicator, not a real crossing

        int orient = 0;
        switch (ind.kind) {
          case EventKind::ConcavityCross: orient = sign_of(sgn * ve.zdot); break;
          case EventKind::XNullclineCross:
            orient = sign_of(sgn * (ve.zdot + params.kappa_lower() * ve.xdot));
            break;
          case EventKind::ZNullclineCross: {
            RegionCoeffs cc = pe.Z >= level ? coeffs_upper(params) : coeffs_lower(params);
            orient = sign_of(sgn * (ve.zdot + cc.divisor * p * ve.xdot));
            break;
          }
          case EventKind::WallCross: orient = sign_of(sgn * ve.xdot); break;
          default: break;
        }
        if (ind.kind == EventKind::XNullclineCross || ind.kind == EventKind::ZNullclineCross) {
          if (!(pe.X > 0.0 && pe.Z > 0.0)) continue;
        }
        if (ind.kind == EventKind::WallCross && !(pe.Z > 0.0)) continue;

        record(c.tau, pe);
        push_event(ind.kind, c.tau, pe, orient,
                   ind.kind == EventKind::ConcavityCross ? concavity_detail(pe, orient, false)
                                                         : "");

        if (ind.kind == EventKind::ConcavityCross) {
          // split the step here: the field has a derivative jump on the line
          double resume = std::min(c.tau + kEventTol * std::max(1.0, std::fabs(c.tau)), tau1);
          V2 yr = ds.eval(resume);
          stepper.reset(resume, yr);
          if (capture_check(resume, {yr[0], yr[1]})) return out;
          resumed = true;
          break;
        }
      }
      if (resumed) continue;

      PhasePoint pend = pts[kScan];
      if (clipped) {
        record(opts.horizon, pend);
        out.halt = HaltReason::Horizon;
        out.tau_end = opts.horizon;
        out.end = pend;
        out.steps = nsteps;
        return out;
      }
      record(tau1, pend);
      if (capture_check(tau1, pend)) {
        out.steps = nsteps;
        return out;
      }
    }
  }
};

CoreOutcome run_core(const PhasePoint& start, double p, const ProblemParams& params, Direction dir,
                     const FlowOptions& opts, Trajectory* rec, SectionCb cb) {
  if (!(p > 1.0)) raise(errc::p_below_one, "need p > 1");
  Core core(start, p, params, dir, opts, rec, std::move(cb));
  CoreOutcome out = core.run();
  return out;
}

// watches the section crossings and decides between periodic-orbit
// convergence and a geometric spiral into the interior stationary point
struct PeriodicMonitor {
  double z0 = 0.0;     // section base (M0 height)
  double eps = 0.0;    // capture radius around M0
  std::vector<double> zs;
  bool decided = false;
  bool spiral_inward = false;  // limit sits at the section base itself
  double limit = 0.0;

  bool push(double z) {
    zs.push_back(z);
    std::size_t n = zs.size();
    if (n < 6) return true;
    double d1 = zs[n - 1] - zs[n - 2];
    double d2 = zs[n - 2] - zs[n - 3];
    double d3 = zs[n - 3] - zs[n - 4];
    bool contracting =
        std::fabs(d1) <= std::fabs(d2) * 1.001 && std::fabs(d2) <= std::fabs(d3) * 1.001;
    if (!contracting) return true;
    double dist_m0 = std::fabs(zs[n - 1] - z0);
    double den = d1 - d2;
    limit = std::fabs(den) > 1e-300 ? zs[n - 1] - d1 * d1 / den : zs[n - 1];
    // verified one-sided geometric approach whose extrapolated limit is the
    // section base: the orbit spirals into the stationary point, no need to
    // wait for the slow linear contraction to finish
    double q = std::fabs(d2) > 1e-300 ? d1 / d2 : 0.0;
    if (n >= 8 && q > 0.0 && q < 0.9999 &&
        std::fabs(limit - z0) <= std::max(eps, 0.02 * dist_m0)) {
      decided = true;
      spiral_inward = true;
      return false;
    }
    bool small = std::fabs(d1) <= std::max(1e-4 * dist_m0, 1e-9 * (1.0 + std::fabs(zs[n - 1])));
    if (small && dist_m0 > eps && std::fabs(limit - z0) > eps) {
      decided = true;
      return false;
    }
    return true;
  }
};

OrbitFate fate_from(const CoreOutcome& co, const PeriodicMonitor* mon) {
  OrbitFate f;
  f.horizon_used = co.tau_end;
  f.steps_used = co.steps;
  switch (co.halt) {
    case HaltReason::Capture:
      f.kind = FateKind::ToStationary;
      f.stationary = co.captured;
      f.final_distance = co.capture_distance;
      break;
    case HaltReason::HitBlowUpX:
      f.kind = FateKind::BlowUpX;
      f.blowup_time = co.blowup_t;
      break;
    case HaltReason::HitBlowUpZ:
      f.kind = FateKind::BlowUpZ;
      f.blowup_time = co.blowup_t;
      break;
    case HaltReason::SectionStop:
      if (mon && mon->spiral_inward) {
        f.kind = FateKind::ToStationary;
        f.stationary = SPLabel::M0;
        f.final_distance = std::fabs(mon->zs.back() - mon->z0);
        f.note = "geometric spiral, limit extrapolated at the section";
      } else {
        f.kind = FateKind::ToPeriodicOrbit;
        if (mon) f.section_coordinate = mon->limit;
      }
      break;
    case HaltReason::Horizon:
      f.kind = FateKind::Undetermined;
      f.note = "horizon exhausted";
      break;
    case HaltReason::Steps:
      f.kind = FateKind::Undetermined;
      f.note = "step budget exhausted";
      break;
  }
  return f;
}

std::pair<Trajectory, OrbitFate> fate_run(const PhasePoint& start, double p,
                                          const ProblemParams& params, Direction dir,
                                          const FlowOptions& opts, bool want_traj) {
  FlowOptions o = opts;
  PeriodicMonitor mon;
  bool monitor = false;
  if (start.X >= 0.0 && start.Z >= 0.0 && p > p_serrin(params) && !o.section) {
    PhasePoint m0 = stationary_location(SPLabel::M0, p, params);
    // crossings are counted where X grows through the ray in integration
    // time: above M0 for forward runs, below it for backward ones
    o.section = PoincareSection{m0.X, dir == Direction::Forward ? m0.Z : 0.0};
    mon.z0 = m0.Z;
    mon.eps = capture_radius(m0);
    monitor = true;
  }
  Trajectory traj;
  traj.direction = dir;
  o.record_samples = want_traj;
  SectionCb cb;
  if (monitor) cb = [&mon](double z, double) { return mon.push(z); };
  CoreOutcome co = run_core(start, p, params, dir, o, want_traj ? &traj : nullptr, cb);
  OrbitFate fate = fate_from(co, monitor ? &mon : nullptr);
  return {std::move(traj), fate};
}

}  // namespace

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::ConcavityCross: return "ConcavityCross";
    case EventKind::XNullclineCross: return "XNullclineCross";
    case EventKind::ZNullclineCross: return "ZNullclineCross";
    case EventKind::WallCross: return "WallCross";
    case EventKind::StationaryCapture: return "StationaryCapture";
    case EventKind::SectionCross: return "SectionCross";
    case EventKind::BlowUpX: return "BlowUpX";
    case EventKind::BlowUpZ: return "BlowUpZ";
  }
  return "?";
}

const char* fate_kind_name(FateKind k) {
  switch (k) {
    case FateKind::ToStationary: return "ToStationary";
    case FateKind::ToPeriodicOrbit: return "ToPeriodicOrbit";
    case FateKind::BlowUpX: return "BlowUpX";
    case FateKind::BlowUpZ: return "BlowUpZ";
    case FateKind::Undetermined: return "Undetermined";
  }
  return "?";
}

double capture_radius(const PhasePoint& location) {
  return 1e-6 * (1.0 + std::hypot(location.X, location.Z));
}

Trajectory integrate(const PhasePoint& start, double p, const ProblemParams& params, Direction dir,
                     const FlowOptions& opts) {
  Trajectory traj;
  traj.direction = dir;
  FlowOptions o = opts;
  o.record_samples = true;
  run_core(start, p, params, dir, o, &traj, nullptr);
  return traj;
}

OrbitFate detect_fate(const PhasePoint& start, double p, const ProblemParams& params,
                      Direction dir, const FlowOptions& opts) {
  return fate_run(start, p, params, dir, opts, false).second;
}

std::pair<Trajectory, OrbitFate> integrate_with_fate(const PhasePoint& start, double p,
                                                     const ProblemParams& params, Direction dir,
                                                     const FlowOptions& opts) {
  return fate_run(start, p, params, dir, opts, true);
}

PoincareReturn poincare_map(const PoincareSection& section, const PhasePoint& start, double p,
                            const ProblemParams& params, const FlowOptions& opts) {
  if (std::fabs(start.X - section.x0) > 1e-9 * (1.0 + std::fabs(section.x0)) ||
      !(start.Z > section.zmin))
    raise(errc::invalid_argument, "start must lie on the section ray");
  if (p > p_serrin(params)) {
    PhasePoint m0 = stationary_location(SPLabel::M0, p, params);
    if (dist(start, m0) < capture_radius(m0))
      raise(errc::invalid_argument, "start coincides with the interior stationary point");
  }
  FlowOptions o = opts;
  o.section = section;
  o.record_samples = false;
  struct {
    bool hit = false;
    double z = 0.0, tau = 0.0;
  } first;
  CoreOutcome co = run_core(start, p, params, Direction::Forward, o, nullptr,
                            [&first](double z, double tau) {
                              first.hit = true;
                              first.z = z;
                              first.tau = tau;
                              return false;
                            });
  if (!first.hit) {
    std::ostringstream os;
    os << "orbit did not return to the section (halt: ";
    switch (co.halt) {
      case HaltReason::Capture: os << "captured at " << sp_label_name(*co.captured); break;
      case HaltReason::HitBlowUpX: os << "BlowUpX"; break;
      case HaltReason::HitBlowUpZ: os << "BlowUpZ"; break;
      case HaltReason::Steps: os << "step budget"; break;
      default: os << "horizon"; break;
    }
    os << ")";
    raise(errc::no_return, os.str());
  }
  return {{section.x0, first.z}, first.tau};
}

std::optional<double> blowup_time_estimate(const PhasePoint& tail, double t_tail, Direction dir,
                                           EventKind kind, const ProblemParams& params) {
  if (kind != EventKind::BlowUpX && kind != EventKind::BlowUpZ) return std::nullopt;
  bool first_q = tail.X >= 0.0 && tail.Z >= 0.0;
  double sgn = dir == Direction::Forward ? 1.0 : -1.0;
  return blowup_asymptote(first_q, kind, tail, t_tail, sgn, params);
}

bool box_certificate(const Trajectory& traj, const ProblemParams& params) {
  double top = params.kappa_upper() * (params.N + params.a);
  double wall = params.wall_x();
  for (const auto& s : traj.samples) {
    if (!(s.point.X > 0.0 && s.point.X < wall && s.point.Z > 0.0 && s.point.Z < top)) return false;
  }
  return !traj.samples.empty();
}

CycleSearchResult find_periodic_orbit(double p, const ProblemParams& params,
                                      std::optional<double> seed_hint, const FlowOptions& opts) {
  if (!(p > p_serrin(params)))
    raise(errc::m_not_in_quadrant, "periodic orbits require M0 inside the quadrant (p > p_serrin)");
  PhasePoint m0 = stationary_location(SPLabel::M0, p, params);
  PoincareSection sec{m0.X, m0.Z};
  FlowOptions o = opts;
  o.record_samples = false;

  auto ret_gap = [&](double z) -> std::optional<double> {
    try {
      PoincareReturn r = poincare_map(sec, {sec.x0, z}, p, params, o);
      return r.point.Z - z;
    } catch (const error& e) {
      if (e.code() == errc::no_return) return std::nullopt;
      throw;
    }
  };

  double top = params.kappa_upper() * (params.N + params.a);
  double span = top - m0.Z;
  CycleSearchResult res;

  std::vector<double> rungs;
  if (seed_hint && *seed_hint > m0.Z) rungs.push_back(*seed_hint);
  for (int i = 1; i <= 24; ++i) rungs.push_back(m0.Z + span * (i / 25.0));
  std::sort(rungs.begin(), rungs.end());

  std::vector<std::pair<double, double>> vals;  // (z, gap), NoReturn treated as +inf
  for (double z : rungs) {
    auto g = ret_gap(z);
    vals.push_back({z, g ? *g : std::numeric_limits<double>::infinity()});
  }

  auto polish = [&](double lo, double glo, double hi, double ghi) -> std::optional<double> {
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    for (int it = 0; it < 80; ++it) {
      if (hi - lo <= 1e-12 * (1.0 + hi)) break;
      double mid;
      if (std::isfinite(glo) && std::isfinite(ghi) && ghi != glo) {
        mid = lo - glo * (hi - lo) / (ghi - glo);  // secant, clamped
        double margin = 0.1 * (hi - lo);
        mid = std::min(std::max(mid, lo + margin), hi - margin);
      } else {
        mid = 0.5 * (lo + hi);
      }
      auto gm = ret_gap(mid);
      double g = gm ? *gm : std::numeric_limits<double>::infinity();
      if (std::fabs(g) <= 1e-11 * (1.0 + mid)) return mid;
      if ((g > 0.0) == (ghi > 0.0)) {
        hi = mid;
        ghi = g;
      } else {
        lo = mid;
        glo = g;
      }
      res.bracket_lo = lo;
      res.bracket_hi = hi;
    }
    double mid = 0.5 * (lo + hi);
    auto gm = ret_gap(mid);
    if (gm && std::fabs(*gm) <= kOrbitTol * (1.0 + mid)) return mid;
    return std::nullopt;
  };

  std::optional<double> zstar;
  for (std::size_t i = 0; i + 1 < vals.size() && !zstar; ++i) {
    double g1 = vals[i].second, g2 = vals[i + 1].second;
    if (!(std::fabs(g1) < std::numeric_limits<double>::infinity())) continue;
    bool sign_change = std::isfinite(g2) ? (g1 > 0.0) != (g2 > 0.0) : g1 < 0.0;
    if (sign_change) zstar = polish(vals[i].first, g1, vals[i + 1].first, g2);
  }

  if (!zstar) {
    // a nest of closed orbits: the return map is the identity there
    double best_z = 0.0, best_g = std::numeric_limits<double>::infinity();
    for (auto& [z, g] : vals) {
      if (std::isfinite(g) && std::fabs(g) < std::fabs(best_g)) {
        best_g = g;
        best_z = z;
      }
    }
    if (seed_hint) {
      for (auto& [z, g] : vals)
        if (z == *seed_hint && std::isfinite(g) && std::fabs(g) <= kOrbitTol * (1.0 + z)) {
          best_g = g;
          best_z = z;
        }
    }
    if (std::isfinite(best_g) && std::fabs(best_g) <= kOrbitTol * (1.0 + best_z)) {
      double dz = 1e-5 * (1.0 + best_z);
      auto g2 = ret_gap(best_z + dz);
      if (g2) {
        double deriv = (*g2 - best_g + dz) / dz;  // finite-difference multiplier of the return map
        if (std::fabs(deriv - 1.0) <= 1e-4) zstar = best_z;
      }
    }
  }

  if (!zstar) {
    res.note = "no return-map fixed point located";
    return res;
  }

  // one recorded loop through the fixed point
  Trajectory loop;
  loop.direction = Direction::Forward;
  FlowOptions lo = opts;
  lo.section = sec;
  lo.record_samples = true;
  run_core({sec.x0, *zstar}, p, params, Direction::Forward, lo, &loop,
           [](double, double) { return false; });

  PeriodicOrbit orbit;
  orbit.section_anchor = {sec.x0, *zstar};
  if (loop.samples.empty()) {
    res.note = "degenerate loop";
    return res;
  }
  orbit.period = loop.samples.back().t - loop.samples.front().t;
  orbit.xz_min = std::numeric_limits<double>::infinity();
  orbit.xz_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : loop.samples) {
    orbit.points.push_back(s.point);
    double xz = s.point.X * s.point.Z;
    orbit.xz_min = std::min(orbit.xz_min, xz);
    orbit.xz_max = std::max(orbit.xz_max, xz);
  }
  orbit.points.push_back(orbit.points.front());  // closure within kOrbitTol by construction
  for (const auto& e : loop.events)
    if (e.kind == EventKind::ConcavityCross) orbit.crosses_concavity = true;
  res.orbit = std::move(orbit);
  return res;
}

}  // namespace pucci
