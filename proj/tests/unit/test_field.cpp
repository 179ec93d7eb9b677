#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pucci/field.hpp"
#include "pucci/stationary.hpp"

using namespace pucci;

namespace {

ProblemParams unit_params() { return make_params(1.0, 1.0, Operator::MPlus, 3, 0.0); }
ProblemParams skew_plus() { return make_params(1.0, 2.0, Operator::MPlus, 4, 0.0); }
ProblemParams skew_minus() { return make_params(1.0, 2.0, Operator::MMinus, 3, 0.0); }

// random parameter draw that always passes validation
ProblemParams random_params(std::mt19937& rng, Operator op) {
  std::uniform_real_distribution<double> lam(0.2, 2.0);
  std::uniform_real_distribution<double> ratio(1.0, 3.0);
  std::uniform_int_distribution<int> dim(3, 8);
  std::uniform_real_distribution<double> wt(-0.5, 2.0);
  for (;;) {
    double l = lam(rng);
    double L = l * ratio(rng);
    try {
      return make_params(l, L, op, dim(rng), wt(rng));
    } catch (const error&) {
      // dimension-like degeneracy; draw again
    }
  }
}

}  // namespace

TEST_CASE("region labels match the documented examples") {
  ProblemParams pm = unit_params();  // concavity level 2
  CHECK(region_of({1.0, 3.0}, pm) == Region::RPlus);
  CHECK(region_of({1.0, 2.0}, pm) == Region::OnConcavityLine);
  CHECK(region_of({1.0, 1.0}, pm) == Region::RMinus);
  CHECK(region_of({-1.0, -1.0}, pm) == Region::ThirdQuadrant);
  CHECK(region_of({0.0, 1.0}, pm) == Region::OnAxis);
  CHECK(region_of({1.0, 0.0}, pm) == Region::OnAxis);
  CHECK(region_of({-1.0, 1.0}, pm) == Region::Outside);
  CHECK(region_of({1.0, -1.0}, pm) == Region::Outside);
}

TEST_CASE("the field vanishes at the stationary points") {
  for (double p : {3.5, 5.0, 7.0}) {
    for (ProblemParams pm : {unit_params(), skew_plus(), skew_minus()}) {
      for (SPLabel lbl : {SPLabel::O, SPLabel::N0, SPLabel::A0}) {
        PhasePoint q = stationary_location(lbl, p, pm);
        Velocity v = vector_field(q, p, pm);
        CHECK(v.xdot == 0.0);
        CHECK(v.zdot == 0.0);
      }
      if (p > p_serrin(pm)) {
        PhasePoint m0 = stationary_location(SPLabel::M0, p, pm);
        Velocity v = vector_field(m0, p, pm);
        CHECK(std::fabs(v.xdot) < 1e-14);
        CHECK(std::fabs(v.zdot) < 1e-14);
      }
    }
  }
}

TEST_CASE("velocity at the nullcline junction is horizontal") {
  // on the concavity line at X = (1+a)/p the vertical component vanishes
  // and Xdot = X (X + 1) for these parameters
  ProblemParams pm = unit_params();
  double p = 5.0;
  PhasePoint junction{(1.0 + pm.a) / p, pm.concavity_level()};
  CHECK(junction.X == doctest::Approx(0.2));
  CHECK(junction.Z == doctest::Approx(2.0));
  Velocity v = vector_field(junction, p, pm);
  CHECK(v.xdot == doctest::Approx(0.24).epsilon(1e-14));
  CHECK(v.zdot == 0.0);
  CHECK(line_set(p, pm).junction.X == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("field limits agree from both sides of the concavity line") {
  std::mt19937 rng(7101);
  std::uniform_real_distribution<double> xs(0.05, 2.0);
  for (ProblemParams pm : {skew_plus(), skew_minus()}) {
    double level = pm.concavity_level();
    for (double p : {2.5, 6.0, 11.0}) {
      for (int i = 0; i < 50; ++i) {
        double x = xs(rng);
        double eps = 1e-9 * level;
        Velocity above = vector_field({x, level + eps}, p, pm);
        Velocity below = vector_field({x, level - eps}, p, pm);
        CHECK(above.xdot == doctest::Approx(below.xdot).epsilon(1e-6));
        CHECK(above.zdot - below.zdot == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("axes are invariant exactly") {
  std::mt19937 rng(7102);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (ProblemParams pm : {unit_params(), skew_plus(), skew_minus()}) {
    for (int i = 0; i < 100; ++i) {
      Velocity vx = vector_field({0.0, u(rng)}, 4.0, pm);
      CHECK(vx.xdot == 0.0);
      Velocity vz = vector_field({u(rng), 0.0}, 4.0, pm);
      CHECK(vz.zdot == 0.0);
    }
  }
}

TEST_CASE("the two operators coincide when lambda equals Lambda") {
  ProblemParams plus = make_params(1.3, 1.3, Operator::MPlus, 4, 0.5);
  ProblemParams minus = make_params(1.3, 1.3, Operator::MMinus, 4, 0.5);
  std::mt19937 rng(7103);
  std::uniform_real_distribution<double> xs(0.01, 3.0), zs(0.01, 8.0);
  for (int i = 0; i < 200; ++i) {
    PhasePoint q{xs(rng), zs(rng)};
    if (region_of(q, plus) == Region::OnConcavityLine) continue;
    Velocity a = vector_field(q, 3.0, plus);
    Velocity b = vector_field(q, 3.0, minus);
    CHECK(a.xdot == doctest::Approx(b.xdot).epsilon(1e-14));
    CHECK(a.zdot == doctest::Approx(b.zdot).epsilon(1e-14));
  }
}

TEST_CASE("second and fourth quadrant interiors are rejected") {
  ProblemParams pm = unit_params();
  CHECK_THROWS_AS(vector_field({-1.0, 1.0}, 3.0, pm), error);
  CHECK_THROWS_AS(vector_field({1.0, -1.0}, 3.0, pm), error);
  try {
    vector_field({-0.5, 0.5}, 3.0, pm);
  } catch (const error& e) {
    CHECK(e.code() == errc::outside_domain);
  }
}

TEST_CASE("third-quadrant field points right and down") {
  std::mt19937 rng(7104);
  std::uniform_real_distribution<double> neg(-6.0, -1e-3);
  for (ProblemParams pm : {unit_params(), skew_plus(), skew_minus()}) {
    for (double p : {2.0, 5.0, 9.0}) {
      for (int i = 0; i < 200; ++i) {
        Velocity v = vector_field({neg(rng), neg(rng)}, p, pm);
        CHECK(v.xdot > 0.0);
        CHECK(v.zdot < 0.0);
      }
    }
  }
}

TEST_CASE("line directions report verifies on random parameter draws") {
  std::mt19937 rng(7105);
  for (int i = 0; i < 1000; ++i) {
    Operator op = (i % 2 == 0) ? Operator::MPlus : Operator::MMinus;
    ProblemParams pm = random_params(rng, op);
    std::uniform_real_distribution<double> ps(1.2, 12.0);
    LineDirectionReport rep = field_directions_on_lines(ps(rng), pm);
    REQUIRE(rep.all_verified);
    CHECK(rep.rules.size() == 5);
    for (const DirectionRule& r : rep.rules) {
      CHECK(r.verified);
      CHECK(r.samples_checked > 0);
    }
  }
}

TEST_CASE("field signs on the structural lines match the stated rules") {
  // independent sampling, not via the report: the crossing through the
  // concavity line goes downward right of X=(1+a)/p; the Z component on
  // the x-nullcline and the X component on the z-nullcline both flip at
  // X=alpha; the axes flip at the wall and at the N0 height
  std::mt19937 rng(7106);
  for (int draw = 0; draw < 50; ++draw) {
    Operator op = (draw % 2 == 0) ? Operator::MPlus : Operator::MMinus;
    ProblemParams pm = random_params(rng, op);
    std::uniform_real_distribution<double> ps(1.5, 9.0);
    double p = ps(rng);
    double alpha = alpha_of(pm, p);
    double level = pm.concavity_level();
    LineSet ls = line_set(p, pm);

    std::uniform_real_distribution<double> xr(1e-3, std::max(2.0 * pm.wall_x(), 1.0));
    for (int i = 0; i < 40; ++i) {
      double x = xr(rng);
      Velocity on_ell = vector_field({x, level}, p, pm);
      double pivot = (1.0 + pm.a) / p;
      if (std::fabs(x - pivot) > 1e-9 * (1.0 + pivot)) {
        CHECK((on_ell.zdot < 0.0) == (x > pivot));
      }

      // x-axis: Xdot = X (X - (ntilde-2))
      Velocity on_x = vector_field({x, 0.0}, p, pm);
      if (std::fabs(x - pm.wall_x()) > 1e-9) {
        CHECK((on_x.xdot < 0.0) == (x < pm.wall_x()));
      }
    }

    std::uniform_real_distribution<double> zr(1e-3, 2.0 * pm.kappa_upper() * (pm.N + pm.a));
    for (int i = 0; i < 40; ++i) {
      double z = zr(rng);
      Velocity on_z = vector_field({0.0, z}, p, pm);
      double n0_height = pm.kappa_upper() * (pm.N + pm.a);
      if (std::fabs(z - n0_height) > 1e-9 * n0_height) {
        CHECK((on_z.zdot > 0.0) == (z < n0_height));
      }
    }

    // x-nullcline (Xdot = 0 off the axes): vertical motion flips at X=alpha
    double x_lo = std::min(ls.x_nullcline.from.X, ls.x_nullcline.to.X);
    double x_hi = std::max(ls.x_nullcline.from.X, ls.x_nullcline.to.X);
    std::uniform_real_distribution<double> xs(x_lo + 1e-6, x_hi - 1e-6);
    for (int i = 0; i < 20 && x_hi - x_lo > 1e-5; ++i) {
      double x = xs(rng);
      PhasePoint q{x, 0.0};
      // solve the line equation for Z at this X by interpolation
      double f = (x - ls.x_nullcline.from.X) / (ls.x_nullcline.to.X - ls.x_nullcline.from.X);
      q.Z = ls.x_nullcline.from.Z + f * (ls.x_nullcline.to.Z - ls.x_nullcline.from.Z);
      if (q.Z <= 1e-9 || std::fabs(x - alpha) < 1e-6) continue;
      Velocity v = vector_field(q, p, pm);
      CHECK(std::fabs(v.xdot) < 1e-9 * (1.0 + std::fabs(v.zdot)));
      CHECK((v.zdot > 0.0) == (x < alpha));
    }
  }
}

TEST_CASE("nullcline gap functions vanish on their lines") {
  ProblemParams pm = skew_plus();
  double p = 6.0;
  LineSet ls = line_set(p, pm);
  CHECK(z_nullcline_gap(ls.junction, p, pm) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(z_nullcline_gap(ls.z_nullcline_upper.from, p, pm) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(z_nullcline_gap(ls.z_nullcline_lower.to, p, pm) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  PhasePoint mid{0.5 * (ls.x_nullcline.from.X + ls.x_nullcline.to.X),
                 0.5 * (ls.x_nullcline.from.Z + ls.x_nullcline.to.Z)};
  CHECK(x_nullcline_gap(mid, p, pm) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  // the x-nullcline stays below the interface
  CHECK(ls.x_nullcline.from.Z <= ls.concavity_level + 1e-12);
  CHECK(ls.x_nullcline.to.Z <= ls.concavity_level + 1e-12);
}

TEST_CASE("weighted divergence has the stated sign per exponent range") {
  std::mt19937 rng(7107);
  ProblemParams pm = skew_plus();
  double pd = p_sobolev(pm);   // 3
  double ppse = p_pseudo(pm);  // 9
  std::uniform_real_distribution<double> xs(0.01, 2.0), zs(0.01, 8.0);

  int in_rplus = 0;
  for (int i = 0; i < 1000; ++i) {
    PhasePoint q{xs(rng), zs(rng)};
    Region reg = region_of(q, pm);
    if (reg == Region::OnConcavityLine) continue;
    CHECK(dulac_phi(q, 0.9 * pd, pm) > 0.0);
    CHECK(dulac_phi(q, 1.1 * ppse, pm) < 0.0);
    if (reg == Region::RPlus) {
      ++in_rplus;
      CHECK(std::fabs(dulac_phi(q, pd, pm)) <= 1e-12);
    }
  }
  CHECK(in_rplus > 100);

  // evaluation on the interface itself is refused
  try {
    dulac_phi({0.5, pm.concavity_level()}, 4.0, pm);
    FAIL("expected OnInterface");
  } catch (const error& e) {
    CHECK(e.code() == errc::on_interface);
  }
}

TEST_CASE("weighted divergence matches a numerical divergence of the weighted field") {
  // central differences of (w f, w g) at interior points, kept away from
  // the interface so no branch is crossed by the stencil
  std::mt19937 rng(7108);
  const double h = 1e-5;
  std::vector<std::pair<ProblemParams, double>> cases = {
      {skew_plus(), 2.4},
      {skew_plus(), 10.0},
      {skew_minus(), 3.0},
      {make_params(1.0, 2.0, Operator::MPlus, 5, 1.5), 4.0},
  };
  for (const auto& [pm, p] : cases) {
    std::uniform_real_distribution<double> xs(0.05, 1.5), zs(0.05, 6.0);
    int tested = 0;
    for (int i = 0; i < 400 && tested < 120; ++i) {
      PhasePoint q{xs(rng), zs(rng)};
      if (std::fabs(q.Z - pm.concavity_level()) < 10.0 * h) continue;
      if (region_of(q, pm) != Region::RPlus && region_of(q, pm) != Region::RMinus) continue;
      ++tested;
      auto wf = [&](double x, double z) {
        Velocity v = vector_field({x, z}, p, pm);
        double w = dulac_weight({x, z}, p);
        return std::array<double, 2>{w * v.xdot, w * v.zdot};
      };
      double div = (wf(q.X + h, q.Z)[0] - wf(q.X - h, q.Z)[0]) / (2.0 * h) +
                   (wf(q.X, q.Z + h)[1] - wf(q.X, q.Z - h)[1]) / (2.0 * h);
      double phi = dulac_phi(q, p, pm);
      CHECK(div == doctest::Approx(phi).epsilon(5e-5).scale(1.0 + std::fabs(phi)));
    }
    CHECK(tested == 120);
  }
}

TEST_CASE("line integral over a rectangle matches the area integral of the divergence") {
  // at p=3 the weight is plain X, so the area integral over an axis-aligned
  // rectangle in the lower region has the closed form
  //   c * (x2^2 - x1^2)/2 * (z2 - z1),  c = [(n+2+2a) - p(n-2)]/(p-1)
  ProblemParams pm = skew_plus();
  double p = 3.0;
  double n = pm.ntilde();  // lower-region dimension-like number
  double c = ((n + 2.0 + 2.0 * pm.a) - p * (n - 2.0)) / (p - 1.0);
  double x1 = 0.1, x2 = 0.4, z1 = 0.5, z2 = 1.5;
  double expected = c * 0.5 * (x2 * x2 - x1 * x1) * (z2 - z1);

  std::vector<PhasePoint> rect = {{x1, z1}, {x2, z1}, {x2, z2}, {x1, z2}, {x1, z1}};
  double got = dulac_line_integral(rect, p, pm);
  CHECK(got == doctest::Approx(expected).epsilon(1e-10));
  CHECK(expected > 0.0);  // p below the critical range keeps the sign positive
}

TEST_CASE("line integral around a small loop near M0 is positive below p_sobolev") {
  ProblemParams pm = unit_params();
  double p = 4.0;  // between the Serrin-type and Sobolev-type exponents
  PhasePoint m0 = stationary_location(SPLabel::M0, p, pm);
  std::vector<PhasePoint> circle;
  int n = 720;
  for (int i = 0; i <= n; ++i) {
    double th = 2.0 * M_PI * i / n;
    circle.push_back({m0.X + 0.1 * std::cos(th), m0.Z + 0.1 * std::sin(th)});
  }
  CHECK(dulac_line_integral(circle, p, pm) > 0.0);
}

TEST_CASE("degenerate and malformed polylines are handled") {
  ProblemParams pm = unit_params();
  // zero enclosed area: collinear closed polyline; the forward edges and the
  // closing edge are partitioned differently, so cancellation is only as good
  // as the quadrature
  std::vector<PhasePoint> flat = {{0.2, 1.0}, {0.4, 1.0}, {0.3, 1.0}, {0.2, 1.0}};
  CHECK(dulac_line_integral(flat, 4.0, pm) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));

  std::vector<PhasePoint> open = {{0.2, 1.0}, {0.4, 1.0}, {0.4, 1.5}};
  try {
    dulac_line_integral(open, 4.0, pm);
    FAIL("expected OpenCurve");
  } catch (const error& e) {
    CHECK(e.code() == errc::open_curve);
  }

  std::vector<PhasePoint> bowtie = {
      {0.2, 1.0}, {0.6, 1.4}, {0.6, 1.0}, {0.2, 1.4}, {0.2, 1.0}};
  try {
    dulac_line_integral(bowtie, 4.0, pm);
    FAIL("expected SelfIntersection");
  } catch (const error& e) {
    CHECK(e.code() == errc::self_intersection);
  }
}
