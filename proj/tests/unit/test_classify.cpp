#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pucci/classify.hpp"
#include "pucci/errors.hpp"
#include "pucci/field.hpp"
#include "pucci/flow.hpp"
#include "pucci/params.hpp"
#include "pucci/stationary.hpp"

using namespace pucci;

namespace {

ProblemParams unit_params() { return make_params(1.0, 1.0, Operator::MPlus, 3, 0.0); }
ProblemParams skew_plus() { return make_params(1.0, 2.0, Operator::MPlus, 4, 0.0); }
ProblemParams skew_minus() { return make_params(1.0, 2.0, Operator::MMinus, 3, 0.0); }

// Z value of the curve at abscissa x by linear interpolation over samples
// sorted by X; the regular orbit and the arriving orbit are graphs over X
// for the parameters used here.
double z_on_curve(const Trajectory& tr, double x) {
  std::vector<PhasePoint> pts;
  for (const auto& s : tr.samples) pts.push_back(s.point);
  std::sort(pts.begin(), pts.end(), [](const PhasePoint& a, const PhasePoint& b) { return a.X < b.X; });
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (x < pts[i].X || x > pts[i + 1].X) continue;
    double w = (x - pts[i].X) / (pts[i + 1].X - pts[i].X);
    return pts[i].Z + w * (pts[i + 1].Z - pts[i].Z);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

TEST_CASE("the regular orbit leaves the saddle into the upper region") {
  ProblemParams prm = skew_plus();
  Trajectory g = gamma_orbit(9.0, prm);
  REQUIRE(!g.samples.empty());
  const TrajectorySample& first = g.samples.front();
  CHECK(first.region == Region::RPlus);
  CHECK(first.point.X > 0.0);
  CHECK(first.point.X < 1e-4);
  CHECK(first.point.Z < prm.kappa_upper() * (prm.N + prm.a));
  CHECK(first.point.Z > prm.kappa_upper() * (prm.N + prm.a) - 0.01);
  Velocity v = vector_field(first.point, 9.0, prm);
  CHECK(v.xdot > 0.0);
  CHECK(v.zdot < 0.0);
}

TEST_CASE("the classification does not depend on the seeding offset") {
  ProblemParams prm = skew_plus();
  double sect[2];
  double scales[2] = {1e-6, 5e-7};
  for (int i = 0; i < 2; ++i) {
    PhasePoint q = gamma_seed(8.9, prm, scales[i]);
    OrbitFate f = detect_fate(q, 8.9, prm, Direction::Forward);
    REQUIRE(f.kind == FateKind::ToPeriodicOrbit);
    sect[i] = f.section_coordinate;
  }
  CHECK(std::fabs(sect[0] - sect[1]) < 1e-7);
}

TEST_CASE("exponent classes across the documented configurations") {
  struct Row {
    ProblemParams prm;
    double p;
    PLabel want;
  };
  const Row rows[] = {
      {unit_params(), 4.0, PLabel::C},  {unit_params(), 5.0, PLabel::F},
      {unit_params(), 7.0, PLabel::S},  {skew_plus(), 8.9, PLabel::P},
      {skew_plus(), 12.0, PLabel::S},   {skew_minus(), 2.2, PLabel::C},
      {skew_minus(), 3.0, PLabel::S},
  };
  for (const Row& r : rows) {
    PClass c = classify_p(r.p, r.prm);
    CHECK(c.label == r.want);
    switch (r.want) {
      case PLabel::C:
        CHECK(c.evidence.kind == FateKind::BlowUpX);
        REQUIRE(c.wall_radius.has_value());
        CHECK(*c.wall_radius > 0.0);
        break;
      case PLabel::F:
      case PLabel::S:
        CHECK(c.evidence.kind == FateKind::ToStationary);
        CHECK_FALSE(c.wall_radius.has_value());
        break;
      case PLabel::P:
        CHECK(c.evidence.kind == FateKind::ToPeriodicOrbit);
        break;
    }
  }
}

TEST_CASE("classes are ordered along the exponent axis") {
  // wall exponents form an interval: after the first non-wall class no
  // further wall class may appear
  ProblemParams prm = skew_plus();
  bool seen_other = false;
  int walls = 0;
  for (double p : {3.0, 5.5, 7.0, 8.5, 8.9, 9.0, 10.0, 12.0}) {
    FlowOptions opts;
    opts.record_samples = false;
    PLabel l = classify_p(p, prm, opts).label;
    if (l == PLabel::C) {
      CHECK_FALSE(seen_other);
      ++walls;
    } else {
      seen_other = true;
    }
  }
  CHECK(walls == 4);
}

TEST_CASE("the arriving orbit connects backward to the interior point or escapes") {
  ProblemParams prm = unit_params();
  Trajectory u4 = upsilon_orbit(4.0, prm);
  REQUIRE(!u4.samples.empty());
  // in the source window the backward run lands on M0
  const TrajectorySample& end =
      *std::min_element(u4.samples.begin(), u4.samples.end(),
                        [](const TrajectorySample& a, const TrajectorySample& b) { return a.t < b.t; });
  PhasePoint m0 = stationary_location(SPLabel::M0, 4.0, prm);
  CHECK(std::hypot(end.point.X - m0.X, end.point.Z - m0.Z) < 1e-3);

  // in the cycle window of the skewed operator it escapes upward instead
  Trajectory u89 = upsilon_orbit(8.9, skew_plus());
  bool blew = std::any_of(u89.events.begin(), u89.events.end(),
                          [](const Event& e) { return e.kind == EventKind::BlowUpZ; });
  CHECK(blew);
}

TEST_CASE("the arriving orbit needs a saddle to aim at") {
  try {
    upsilon_orbit(2.0, skew_plus());
    FAIL("expected saddle_unavailable");
  } catch (const error& e) {
    CHECK(e.code() == errc::saddle_unavailable);
  }
}

TEST_CASE("at the connection exponent the two distinguished orbits coincide") {
  // for lambda = Lambda = 1, N = 3 the critical exponent is 5 and the regular
  // orbit runs straight into the saddle the arriving orbit leaves from
  ProblemParams prm = unit_params();
  Trajectory g = gamma_orbit(5.0, prm);
  Trajectory u = upsilon_orbit(5.0, prm);
  double worst = 0.0;
  for (int k = 1; k < 90; ++k) {
    double x = 0.1 + 0.8 * k / 90.0;
    double zg = z_on_curve(g, x);
    double zu = z_on_curve(u, x);
    if (std::isnan(zg) || std::isnan(zu)) continue;
    worst = std::max(worst, std::fabs(zg - zu));
  }
  CHECK(worst < 1e-8);
  CHECK(classify_p(5.0, prm).label == PLabel::F);
}

TEST_CASE("critical exponent for the reduced operator pair") {
  ProblemParams prm = unit_params();
  CriticalResult cr = critical_exponent(prm, 1e-6);
  CHECK(cr.p_star == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(cr.bracket_hi - cr.bracket_lo <= cr.tol);
  CHECK(cr.bracket_lo <= cr.p_star);
  CHECK(cr.p_star <= cr.bracket_hi);
  CHECK(cr.tol == 1e-6);
  CHECK(cr.iterations >= 10);
  // with equal ellipticity constants the two reference exponents collapse
  CHECK(cr.lower_reference == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(cr.upper_reference == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_FALSE(cr.lower_bound_strict);
  CHECK_FALSE(cr.upper_bound_strict);
}

TEST_CASE("critical exponent of the skewed maximal operator") {
  ProblemParams prm = skew_plus();
  CriticalResult cr = critical_exponent(prm, 1e-6);
  CHECK(cr.p_star == doctest::Approx(8.75906229019165).epsilon(1e-9));
  CHECK(cr.bracket_hi - cr.bracket_lo <= 1e-6);
  CHECK(cr.lower_reference == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(cr.upper_reference == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(cr.lower_bound_strict);
  CHECK(cr.upper_bound_strict);
  CHECK(cr.p_star - cr.lower_reference > 0.01);
  CHECK(cr.upper_reference - cr.p_star > 0.01);

  // the bracket ends classify to wall on the left and cycle on the right;
  // just above the threshold the orbit needs a long horizon to settle
  CHECK(classify_p(cr.bracket_lo, prm).label == PLabel::C);
  FlowOptions opts;
  opts.horizon = 3000.0;
  opts.record_samples = false;
  CHECK(classify_p(cr.bracket_hi, prm, opts).label == PLabel::P);
}

TEST_CASE("critical exponent of the skewed minimal operator") {
  ProblemParams prm = skew_minus();
  CriticalResult cr = critical_exponent(prm, 1e-6);
  CHECK(cr.p_star == doctest::Approx(2.356429735819499).epsilon(1e-9));
  CHECK(cr.lower_reference == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  CHECK(cr.upper_reference == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(cr.lower_bound_strict);
  CHECK(cr.upper_bound_strict);
  CHECK(cr.p_star - cr.lower_reference > 0.01);
  CHECK(cr.upper_reference - cr.p_star > 0.01);
}

TEST_CASE("coarse and fine bisections agree within their tolerances") {
  ProblemParams prm = skew_plus();
  CriticalResult coarse = critical_exponent(prm, 1e-4);
  CriticalResult fine = critical_exponent(prm, 1e-6);
  CHECK(std::fabs(coarse.p_star - fine.p_star) < 1e-4 + 1e-6);
  CHECK(coarse.iterations < fine.iterations);
}

TEST_CASE("singular catalog below the Serrin-type exponent") {
  ProblemParams prm = skew_plus();
  SingularCatalog cat = singular_catalog(4.5, prm);
  CHECK(cat.p == 4.5);
  REQUIRE(cat.entries.size() == 1);
  const CatalogEntry& e = cat.entries.front();
  CHECK(e.origin == OriginClass::DimensionLikeBlowUp);
  CHECK(e.decay == RadialClass::VanishesAtFiniteRadius);
  CHECK_FALSE(e.whole_space);
  CHECK(e.cardinality == "infinitely many");
  CHECK(!e.seeds.empty());
  CHECK(!cat.regime_note.empty());
}

TEST_CASE("singular catalog in the source window") {
  ProblemParams prm = unit_params();
  SingularCatalog cat = singular_catalog(4.0, prm);
  REQUIRE(cat.entries.size() == 3);
  for (const CatalogEntry& e : cat.entries) {
    CHECK(e.origin == OriginClass::AlphaBlowUp);
    CHECK(!e.cardinality.empty());
    CHECK(!e.seeds.empty());
  }
  CHECK(cat.entries[0].decay == RadialClass::SlowDecay);        // stationary profile
  CHECK(cat.entries[1].decay == RadialClass::FastDecay);        // orbit into A0
  CHECK(cat.entries[2].decay == RadialClass::VanishesAtFiniteRadius);
  CHECK(cat.entries[0].whole_space);
  CHECK(cat.entries[1].whole_space);
  CHECK_FALSE(cat.entries[2].whole_space);
}

TEST_CASE("singular catalog in the cycle window of the minimal operator") {
  ProblemParams prm = skew_minus();
  SingularCatalog cat = singular_catalog(2.345, prm);
  REQUIRE(cat.entries.size() == 5);
  // the trivial profile keeps its algebraic origin; everything else
  // oscillates backward onto the cycle
  CHECK(cat.entries[0].origin == OriginClass::AlphaBlowUp);
  for (std::size_t i = 1; i < 5; ++i) CHECK(cat.entries[i].origin == OriginClass::PseudoBlowUp);
  int closed = 0;
  for (const CatalogEntry& e : cat.entries)
    if (e.decay == RadialClass::PseudoSlowDecay) ++closed;
  CHECK(closed == 1);
}

TEST_CASE("exterior nonexistence below the critical exponent") {
  ProblemParams prm = skew_plus();
  ExteriorCheck x = exterior_nonexistence_check(4.5, prm);
  CHECK(x.verdict == ExteriorVerdict::Nonexistence);
  CHECK(x.orbit_class == PLabel::C);
  REQUIRE(x.barrier.size() > 100);
  CHECK(x.barrier[0].X == 0.0);
  CHECK(x.barrier[0].Z == 0.0);
  CHECK(x.barrier[1].X == 0.0);
  CHECK(x.barrier[1].Z == doctest::Approx(prm.kappa_upper() * (prm.N + prm.a)).epsilon(1e-12));
  CHECK(x.barrier.back().Z == 0.0);
  CHECK(x.a0_enclosed);
  CHECK_FALSE(x.m0_enclosed);  // no interior stationary point below Serrin

  PhasePoint a0 = stationary_location(SPLabel::A0, 4.5, prm);
  CHECK(point_in_polygon(a0, x.barrier));
  CHECK_FALSE(point_in_polygon({2.0, 2.0}, x.barrier));
}

TEST_CASE("exterior barrier encloses the cycle near the minimal-operator threshold") {
  ProblemParams prm = skew_minus();
  ExteriorCheck x = exterior_nonexistence_check(2.35, prm);
  CHECK(x.verdict == ExteriorVerdict::Nonexistence);
  CHECK(x.m0_enclosed);
  CHECK(x.cycle_enclosed);
  PhasePoint m0 = stationary_location(SPLabel::M0, 2.35, prm);
  CHECK(point_in_polygon(m0, x.barrier));
}

TEST_CASE("exterior check declines beyond the critical exponent") {
  ProblemParams prm = skew_plus();
  ExteriorCheck x = exterior_nonexistence_check(12.0, prm);
  CHECK(x.verdict == ExteriorVerdict::OutOfScope);
  CHECK(x.orbit_class == PLabel::S);
  CHECK(x.barrier.empty());
  CHECK(!x.note.empty());
}

TEST_CASE("polygon membership counts near-edge points as inside") {
  std::vector<PhasePoint> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  CHECK(point_in_polygon({0.5, 0.5}, sq));
  CHECK_FALSE(point_in_polygon({1.5, 0.5}, sq));
  CHECK(point_in_polygon({1.0, 0.5}, sq));
  CHECK(point_in_polygon({0.5, 1.0 + 5e-10}, sq));
  CHECK_FALSE(point_in_polygon({0.5, 1.1}, sq));
}
