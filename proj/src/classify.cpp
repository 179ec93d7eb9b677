#include "pucci/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pucci/field.hpp"
#include "pucci/ode.hpp"
#include "pucci/stationary.hpp"

namespace pucci {

namespace {

using V2 = StateVec<2>;

double norm2(double x, double z) { return std::hypot(x, z); }

bool nearly(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); }

PLabel label_from_fate(const OrbitFate& fate) {
  switch (fate.kind) {
    case FateKind::BlowUpX: return PLabel::C;
    case FateKind::ToPeriodicOrbit: return PLabel::P;
    case FateKind::ToStationary:
      if (fate.stationary && *fate.stationary == SPLabel::A0) return PLabel::F;
      if (fate.stationary && *fate.stationary == SPLabel::M0) return PLabel::S;
      raise(errc::unresolved, "orbit converged to an unexpected stationary point");
    case FateKind::BlowUpZ:
      raise(errc::unresolved, "unexpected forward Z blow-up for the regular orbit");
    case FateKind::Undetermined: break;
  }
  std::ostringstream os;
  os << "fate undetermined (" << fate.note << ")";
  raise(errc::unresolved, os.str());
}

// Continue a wall-bound orbit far past the wall, then read off the finite
// blow-up time from the dominant X' = X(X - c) tail.
double refine_wall_time(const PhasePoint& from, double t_from, double p,
                        const ProblemParams& params) {
  auto rhs = [&](double, const V2& y, V2& dy) {
    double m = extremal_slope(params.concavity_level() - y[1], params);
    dy[0] = y[0] * (y[0] + 1.0 - m);
    dy[1] = y[1] * (1.0 + params.a - p * y[0] + m);
  };
  auto st = make_dopri5<2>(rhs, 1e-12, 1e-14);
  st.init(t_from, V2{from.X, from.Z});
  double x_big = std::max(50.0, 10.0 * (params.ntilde() - 2.0));
  while (st.y()[0] < x_big && st.t() < t_from + 100.0) {
    DenseStep<2> ds;
    st.step(ds);
  }
  double X = st.y()[0];
  double Z = st.y()[1];
  double c = (Z > params.concavity_level() ? params.N : params.ntilde()) - 2.0;
  return st.t() + std::log(X / (X - c)) / c;
}

void add_entry(SingularCatalog& cat, OriginClass origin, RadialClass decay, bool whole_space,
               const std::string& cardinality, const std::string& note, const PhasePoint& seed) {
  for (auto& e : cat.entries) {
    if (e.origin == origin && e.decay == decay && e.whole_space == whole_space) {
      e.seeds.push_back(seed);
      return;
    }
  }
  CatalogEntry e;
  e.origin = origin;
  e.decay = decay;
  e.whole_space = whole_space;
  e.cardinality = cardinality;
  e.note = note;
  e.seeds.push_back(seed);
  cat.entries.push_back(std::move(e));
}

std::optional<RadialClass> decay_from_fate(const OrbitFate& fate) {
  switch (fate.kind) {
    case FateKind::BlowUpX: return RadialClass::VanishesAtFiniteRadius;
    case FateKind::ToPeriodicOrbit: return RadialClass::PseudoSlowDecay;
    case FateKind::ToStationary:
      if (fate.stationary && *fate.stationary == SPLabel::A0) return RadialClass::FastDecay;
      if (fate.stationary && *fate.stationary == SPLabel::M0) return RadialClass::SlowDecay;
      return std::nullopt;
    default: return std::nullopt;
  }
}

std::optional<OriginClass> origin_from_backward_fate(const OrbitFate& fate) {
  switch (fate.kind) {
    case FateKind::ToPeriodicOrbit: return OriginClass::PseudoBlowUp;
    case FateKind::ToStationary:
      if (fate.stationary && *fate.stationary == SPLabel::M0) return OriginClass::AlphaBlowUp;
      if (fate.stationary && *fate.stationary == SPLabel::A0)
        return OriginClass::DimensionLikeBlowUp;
      return std::nullopt;  // N0 means a regular solution, not singular
    default: return std::nullopt;  // backward blow-up: no singularity at the origin
  }
}

bool in_cycle_window(double p, const ProblemParams& params) {
  double lo = std::min(p_sobolev(params), p_pseudo(params));
  double hi = std::max(p_sobolev(params), p_pseudo(params));
  double slack = 1e-9 * std::max(1.0, hi);
  return p > p_serrin(params) && p >= lo - slack && p <= hi + slack;
}

}  // namespace

const char* p_label_name(PLabel l) {
  switch (l) {
    case PLabel::C: return "C";
    case PLabel::F: return "F";
    case PLabel::P: return "P";
    case PLabel::S: return "S";
  }
  return "?";
}

const char* exterior_verdict_name(ExteriorVerdict v) {
  return v == ExteriorVerdict::Nonexistence ? "Nonexistence" : "OutOfScope";
}

PhasePoint gamma_seed(double p, const ProblemParams& params, double delta_scale) {
  StationaryPoint n0 = classify_stationary(SPLabel::N0, p, params);
  const TangentDirection* unstable = nullptr;
  for (const auto& t : n0.tangents)
    if (!t.stable) unstable = &t;
  if (!unstable) raise(errc::unresolved, "no unstable direction at N0");
  double delta = delta_scale * (1.0 + norm2(n0.location.X, n0.location.Z));
  double vx = unstable->x, vz = unstable->z;
  if (vx < 0.0) {
    vx = -vx;
    vz = -vz;
  }
  return {n0.location.X + delta * vx, n0.location.Z + delta * vz};
}

PhasePoint upsilon_seed(double p, const ProblemParams& params, double delta_scale) {
  if (!(p > p_serrin(params)))
    raise(errc::saddle_unavailable,
          "A0 has no stable direction into the quadrant at this exponent");
  StationaryPoint a0 = classify_stationary(SPLabel::A0, p, params);
  const TangentDirection* stable = nullptr;
  for (const auto& t : a0.tangents)
    if (t.stable) stable = &t;
  if (!stable) raise(errc::saddle_unavailable, "stable direction at A0 unavailable");
  double delta = delta_scale * (1.0 + norm2(a0.location.X, a0.location.Z));
  double vx = stable->x, vz = stable->z;
  if (vz < 0.0) {
    vx = -vx;
    vz = -vz;
  }
  return {a0.location.X + delta * vx, a0.location.Z + delta * vz};
}

Trajectory gamma_orbit(double p, const ProblemParams& params, const FlowOptions& opts) {
  return integrate_with_fate(gamma_seed(p, params), p, params, Direction::Forward, opts).first;
}

Trajectory upsilon_orbit(double p, const ProblemParams& params, const FlowOptions& opts) {
  return integrate_with_fate(upsilon_seed(p, params), p, params, Direction::Backward, opts).first;
}

PClass classify_p(double p, const ProblemParams& params, const FlowOptions& opts) {
  auto [traj, fate] = integrate_with_fate(gamma_seed(p, params), p, params, Direction::Forward,
                                          opts);
  PClass out;
  out.label = label_from_fate(fate);
  out.evidence = fate;
  if (out.label == PLabel::C && !traj.samples.empty()) {
    const TrajectorySample& halt = traj.samples.back();
    out.wall_radius = std::exp(refine_wall_time(halt.point, halt.t, p, params));
  }
  return out;
}

CriticalResult critical_exponent(const ProblemParams& params, double tol, const FlowOptions& opts) {
  if (!(tol > 0.0)) raise(errc::invalid_argument, "tolerance must be positive");
  bool plus = params.op == Operator::MPlus;
  double lower_ref = plus ? std::max(p_serrin(params), p_sobolev(params)) : p_pseudo(params);
  double upper_ref = plus ? p_pseudo(params) : p_sobolev(params);

  // the wall-hitting class covers (1, p_star) with p_star strictly between
  // the references, so the references themselves bracket it; when the two
  // collapse (lambda == Lambda) pad a small window around the common value
  double lo = lower_ref, hi = upper_ref;
  if (hi - lo <= 4.0 * tol) {
    double pad = std::max(0.02, 4.0 * tol);
    lo = std::max(0.5 * (1.0 + lower_ref), lower_ref - pad);
    hi = upper_ref + pad;
  }

  auto classify_retry = [&](double p) -> PLabel {
    FlowOptions fo = opts;
    for (int attempt = 0;; ++attempt) {
      try {
        return classify_p(p, params, fo).label;
      } catch (const error& e) {
        if (e.code() != errc::unresolved || attempt >= 2) throw;
        fo.horizon *= 10.0;
        fo.max_steps *= 10;
      }
    }
  };

  PLabel cl_lo = classify_retry(lo);
  if (cl_lo != PLabel::C) {
    std::ostringstream os;
    os << "lower endpoint p=" << lo << " classified " << p_label_name(cl_lo) << ", expected C";
    raise(errc::bracket_failure, os.str());
  }
  PLabel cl_hi = classify_retry(hi);
  if (cl_hi != PLabel::P && cl_hi != PLabel::S && cl_hi != PLabel::F) {
    std::ostringstream os;
    os << "upper endpoint p=" << hi << " classified " << p_label_name(cl_hi)
       << ", expected F, P or S";
    raise(errc::bracket_failure, os.str());
  }

  CriticalResult res;
  res.tol = tol;
  res.lower_reference = lower_ref;
  res.upper_reference = upper_ref;
  double best_c = lo;       // largest exponent observed in the wall class
  double best_not_c = hi;   // smallest observed outside it
  int it = 0;
  for (; it < 80 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (classify_retry(mid) == PLabel::C) {
      lo = mid;
      best_c = mid;
    } else {
      hi = mid;
      best_not_c = mid;
    }
  }
  res.iterations = it;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.p_star = 0.5 * (lo + hi);
  // strictness certified by observation, not by the estimate: the wall class
  // was seen above the lower reference, resp. lost below the upper one
  res.lower_bound_strict = best_c > lower_ref;
  res.upper_bound_strict = best_not_c < upper_ref;
  return res;
}

SingularCatalog singular_catalog(double p, const ProblemParams& params, const FlowOptions& opts) {
  if (!(p > 1.0)) raise(errc::p_below_one, "need p > 1");
  SingularCatalog cat;
  cat.p = p;
  double ps = p_serrin(params);
  double pp = p_pseudo(params);
  bool at_serrin = nearly(p, ps);

  if (p < ps || at_serrin) {
    // orbits issued from A0, which is a source (or degenerate at p = ps)
    PhasePoint a0 = stationary_location(SPLabel::A0, p, params);
    double delta = 1e-4 * (1.0 + norm2(a0.X, a0.Z));
    std::vector<std::pair<double, double>> dirs;
    if (at_serrin) {
      // seed under the x-nullcline, where the degenerate point still expels
      double klo = params.kappa_lower();
      for (double f : {0.25, 0.5, 0.75}) {
        double nz = norm2(1.0, f * klo);
        dirs.push_back({-1.0 / nz, f * klo / nz});
      }
    } else {
      for (double deg : {45.0, 90.0, 135.0}) {
        double th = deg * std::numbers::pi / 180.0;
        dirs.push_back({std::cos(th), std::sin(th)});
      }
    }
    for (auto [dx, dz] : dirs) {
      PhasePoint seed{a0.X + delta * dx, a0.Z + delta * dz};
      OrbitFate f = detect_fate(seed, p, params, Direction::Forward, opts);
      if (f.kind == FateKind::BlowUpX)
        add_entry(cat, OriginClass::DimensionLikeBlowUp, RadialClass::VanishesAtFiniteRadius,
                  false, "infinitely many", "ball solutions issued from A0", seed);
    }
    cat.regime_note = at_serrin
                          ? "degenerate A0 = M0: ball solutions only"
                          : "below the Serrin-type exponent: ball solutions only, none in the "
                            "punctured whole space";
    return cat;
  }

  // trivial profile sitting at M0
  PhasePoint m0 = stationary_location(SPLabel::M0, p, params);
  add_entry(cat, OriginClass::AlphaBlowUp, RadialClass::SlowDecay, true, "one (trivial)",
            "the stationary profile C_p r^{-alpha}", m0);

  // the orbit arriving at A0, traced backward
  {
    auto [traj, fate] =
        integrate_with_fate(upsilon_seed(p, params), p, params, Direction::Backward, opts);
    (void)traj;
    auto origin = origin_from_backward_fate(fate);
    if (origin)
      add_entry(cat, *origin, RadialClass::FastDecay, true, "unique up to scaling",
                "fast-decay orbit into A0", upsilon_seed(p, params));
    else if (fate.kind == FateKind::BlowUpZ)
      cat.regime_note += "fast-decay orbit starts from an interior maximum, not singular; ";
  }

  if (p < pp && !nearly(p, pp)) {
    // M0 is a source: orbits issued from it
    double delta = 1e-3 * (1.0 + norm2(m0.X, m0.Z));
    for (double deg : {30.0, 100.0, 170.0, 240.0, 310.0}) {
      double th = deg * std::numbers::pi / 180.0;
      PhasePoint seed{m0.X + delta * std::cos(th), m0.Z + delta * std::sin(th)};
      if (!(seed.X > 0.0) || !(seed.Z > 0.0)) continue;
      OrbitFate f = detect_fate(seed, p, params, Direction::Forward, opts);
      auto decay = decay_from_fate(f);
      if (!decay || *decay == RadialClass::FastDecay) continue;  // the A0 orbit is owned above
      if (*decay == RadialClass::SlowDecay) continue;            // spiralling back in: trivial
      add_entry(cat, OriginClass::AlphaBlowUp, *decay, *decay != RadialClass::VanishesAtFiniteRadius,
                "infinitely many", "orbits issued from M0", seed);
    }
  }

  if (in_cycle_window(p, params)) {
    CycleSearchResult cy = find_periodic_orbit(p, params, {}, opts);
    if (cy.orbit) {
      bool at_center = nearly(p, pp);
      add_entry(cat, OriginClass::PseudoBlowUp, RadialClass::PseudoSlowDecay, true,
                at_center ? "infinitely many (nested family)" : "one per cycle",
                "closed orbit: oscillating at both ends", cy.orbit->section_anchor);
      double zc = cy.orbit->section_anchor.Z;
      double top = params.kappa_upper() * (params.N + params.a);
      auto neighbor_entry = [&](double z) -> bool {
        PhasePoint seed{m0.X, z};
        OrbitFate fwd = detect_fate(seed, p, params, Direction::Forward, opts);
        OrbitFate bwd = detect_fate(seed, p, params, Direction::Backward, opts);
        auto origin = origin_from_backward_fate(bwd);
        auto decay = decay_from_fate(fwd);
        if (!origin || !decay) return false;
        if (*origin == OriginClass::AlphaBlowUp && *decay == RadialClass::SlowDecay)
          return true;  // orbit between M0 and itself: nothing new
        add_entry(cat, *origin, *decay, *decay != RadialClass::VanishesAtFiniteRadius,
                  "infinitely many", "orbits accumulating on the cycle", seed);
        return true;
      };
      neighbor_entry(m0.Z + 0.9 * (zc - m0.Z));
      // the band between the cycle and the regular orbit can be thin, so
      // approach it geometrically from outside until an orbit sticks
      for (double f : {0.1, 0.01, 1e-3, 1e-4}) {
        double z = zc + f * (zc - m0.Z);
        if (z >= top) continue;
        if (neighbor_entry(z)) break;
      }
    }
  }

  if (cat.regime_note.empty()) {
    cat.regime_note = p >= pp ? "at or beyond the pseudo exponent: trivial profile dominates"
                              : "source regime of M0";
  }
  return cat;
}

ExteriorCheck exterior_nonexistence_check(double p, const ProblemParams& params,
                                          const FlowOptions& opts) {
  auto [traj, fate] =
      integrate_with_fate(gamma_seed(p, params), p, params, Direction::Forward, opts);
  ExteriorCheck chk;
  chk.orbit_class = label_from_fate(fate);
  if (chk.orbit_class == PLabel::P || chk.orbit_class == PLabel::S) {
    chk.verdict = ExteriorVerdict::OutOfScope;
    chk.note = "regular orbit no longer blows up: beyond the critical exponent";
    return chk;
  }

  PhasePoint n0 = stationary_location(SPLabel::N0, p, params);
  chk.barrier.push_back({0.0, 0.0});
  chk.barrier.push_back(n0);
  for (const auto& s : traj.samples) chk.barrier.push_back(s.point);
  if (chk.orbit_class == PLabel::C) {
    chk.barrier.push_back({traj.samples.back().point.X, 0.0});
  } else {
    chk.barrier.push_back(stationary_location(SPLabel::A0, p, params));
  }

  PhasePoint a0 = stationary_location(SPLabel::A0, p, params);
  chk.a0_enclosed = point_in_polygon(a0, chk.barrier, 1e-7);
  bool need_m0 = p > p_serrin(params);
  if (need_m0) {
    PhasePoint m0 = stationary_location(SPLabel::M0, p, params);
    chk.m0_enclosed = point_in_polygon(m0, chk.barrier, 1e-7);
  }
  bool need_cycle = in_cycle_window(p, params);
  bool cycle_found = false;
  if (need_cycle) {
    CycleSearchResult cy = find_periodic_orbit(p, params, {}, opts);
    if (cy.orbit) {
      cycle_found = true;
      chk.cycle_enclosed = true;
      std::size_t stride = std::max<std::size_t>(1, cy.orbit->points.size() / 10);
      for (std::size_t i = 0; i < cy.orbit->points.size(); i += stride)
        if (!point_in_polygon(cy.orbit->points[i], chk.barrier, 1e-7)) chk.cycle_enclosed = false;
    }
  }

  bool ok = chk.a0_enclosed && (!need_m0 || chk.m0_enclosed) && (!cycle_found || chk.cycle_enclosed);
  if (!ok) {
    std::ostringstream os;
    os << "barrier failed to enclose the admissible limit sets (A0:" << chk.a0_enclosed
       << " M0:" << chk.m0_enclosed << " cycle:" << chk.cycle_enclosed << ")";
    raise(errc::unresolved, os.str());
  }
  chk.verdict = ExteriorVerdict::Nonexistence;
  chk.note = chk.orbit_class == PLabel::C
                 ? "regular orbit, wall and axes enclose every admissible limit set"
                 : "regular orbit closes an invariant region through A0";
  return chk;
}

bool point_in_polygon(const PhasePoint& pt, std::span<const PhasePoint> polygon, double tol) {
  std::size_t n = polygon.size();
  if (n < 3) return false;
  // boundary proximity counts as inside
  for (std::size_t i = 0; i < n; ++i) {
    const PhasePoint& a = polygon[i];
    const PhasePoint& b = polygon[(i + 1) % n];
    double vx = b.X - a.X, vz = b.Z - a.Z;
    double wx = pt.X - a.X, wz = pt.Z - a.Z;
    double len2 = vx * vx + vz * vz;
    double t = len2 > 0.0 ? std::clamp((wx * vx + wz * vz) / len2, 0.0, 1.0) : 0.0;
    double dx = wx - t * vx, dz = wz - t * vz;
    double scale = std::max({1.0, norm2(pt.X, pt.Z), norm2(a.X, a.Z), norm2(b.X, b.Z)});
    if (norm2(dx, dz) <= tol * scale) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const PhasePoint& a = polygon[i];
    const PhasePoint& b = polygon[j];
    if ((a.Z > pt.Z) != (b.Z > pt.Z)) {
      double x_int = a.X + (pt.Z - a.Z) * (b.X - a.X) / (b.Z - a.Z);
      if (pt.X < x_int) inside = !inside;
    }
  }
  return inside;
}

}  // namespace pucci
