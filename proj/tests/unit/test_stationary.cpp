#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "pucci/field.hpp"
#include "pucci/stationary.hpp"

using namespace pucci;

namespace {

ProblemParams unit_params() { return make_params(1.0, 1.0, Operator::MPlus, 3, 0.0); }
ProblemParams skew_plus() { return make_params(1.0, 2.0, Operator::MPlus, 4, 0.0); }
ProblemParams skew_minus() { return make_params(1.0, 2.0, Operator::MMinus, 3, 0.0); }

ProblemParams random_params(std::mt19937& rng, Operator op) {
  std::uniform_real_distribution<double> lam(0.2, 2.0);
  std::uniform_real_distribution<double> ratio(1.0, 3.0);
  std::uniform_int_distribution<int> dim(3, 8);
  std::uniform_real_distribution<double> wt(-0.5, 2.0);
  for (;;) {
    double l = lam(rng);
    try {
      return make_params(l, l * ratio(rng), op, dim(rng), wt(rng));
    } catch (const error&) {
    }
  }
}

// reference eigenvalues through a general-purpose dense solver
std::pair<std::complex<double>, std::complex<double>> eigen_reference(const Mat2& J) {
  Eigen::Matrix2d m;
  m << J[0][0], J[0][1], J[1][0], J[1][1];
  Eigen::EigenSolver<Eigen::Matrix2d> es(m);
  std::complex<double> a = es.eigenvalues()[0];
  std::complex<double> b = es.eigenvalues()[1];
  if (a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag())) std::swap(a, b);
  return {a, b};
}

}  // namespace

TEST_CASE("stationary locations match the documented coordinates") {
  ProblemParams one = unit_params();
  PhasePoint m0 = stationary_location(SPLabel::M0, 5.0, one);
  CHECK(m0.X == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m0.Z == doctest::Approx(0.5).epsilon(1e-14));

  // A0 and M0 collide on the X axis exactly at the Serrin-type exponent
  ProblemParams sp = skew_plus();
  PhasePoint a0 = stationary_location(SPLabel::A0, 5.0, sp);
  PhasePoint m0s = stationary_location(SPLabel::M0, 5.0, sp);
  CHECK(a0.X == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(a0.Z == 0.0);
  CHECK(m0s.X == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m0s.Z == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  for (double p : {2.0, 5.0, 9.0}) {
    PhasePoint o = stationary_location(SPLabel::O, p, sp);
    CHECK(o.X == 0.0);
    CHECK(o.Z == 0.0);
    PhasePoint n0 = stationary_location(SPLabel::N0, p, sp);
    CHECK(n0.X == 0.0);
    CHECK(n0.Z == doctest::Approx(sp.kappa_upper() * (sp.N + sp.a)).epsilon(1e-14));
  }
}

TEST_CASE("every reported stationary point annihilates the field") {
  std::mt19937 rng(8101);
  std::uniform_real_distribution<double> ps(1.3, 11.0);
  for (int i = 0; i < 60; ++i) {
    Operator op = (i % 2 == 0) ? Operator::MPlus : Operator::MMinus;
    ProblemParams pm = random_params(rng, op);
    double p = ps(rng);
    for (const StationaryPoint& sp : stationary_points(p, pm)) {
      if (!sp.in_first_quadrant) continue;
      Velocity v = vector_field(sp.location, p, pm);
      CHECK(std::fabs(v.xdot) < 1e-10);
      CHECK(std::fabs(v.zdot) < 1e-10);
    }
  }
}

TEST_CASE("the N0 and A0 Jacobians have the documented entries") {
  ProblemParams pm = make_params(1.0, 2.0, Operator::MPlus, 4, 1.0);
  double p = 6.0;
  double nt = pm.ntilde();  // 2.5

  Mat2 n0 = jacobian_at(stationary_location(SPLabel::N0, p, pm), p, pm);
  CHECK(n0[0][0] == doctest::Approx(2.0 + pm.a).epsilon(1e-14));
  CHECK(n0[0][1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(n0[1][0] == doctest::Approx(-p * pm.lambda * (pm.N + pm.a)).epsilon(1e-14));
  CHECK(n0[1][1] == doctest::Approx(-(pm.N + pm.a)).epsilon(1e-14));

  Mat2 a0 = jacobian_at(stationary_location(SPLabel::A0, p, pm), p, pm);
  CHECK(a0[0][0] == doctest::Approx(nt - 2.0).epsilon(1e-14));
  CHECK(a0[0][1] == doctest::Approx((nt - 2.0) / pm.Lambda).epsilon(1e-14));
  CHECK(a0[1][0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(a0[1][1] == doctest::Approx(nt + pm.a - p * (nt - 2.0)).epsilon(1e-14));
}

TEST_CASE("jacobian evaluation on the concavity line is refused") {
  ProblemParams pm = skew_plus();
  try {
    jacobian_at({0.5, pm.concavity_level()}, 4.0, pm);
    FAIL("expected OnInterface");
  } catch (const error& e) {
    CHECK(e.code() == errc::on_interface);
  }
}

TEST_CASE("closed-form eigenvalues agree with a dense eigen-solver") {
  std::mt19937 rng(8102);
  std::uniform_real_distribution<double> ps(1.3, 11.0);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    Operator op = (i % 2 == 0) ? Operator::MPlus : Operator::MMinus;
    ProblemParams pm = random_params(rng, op);
    double p = ps(rng);
    for (const StationaryPoint& sp : stationary_points(p, pm)) {
      if (!sp.in_first_quadrant) continue;
      auto [r1, r2] = eigen_reference(sp.jacobian);
      double scale = 1.0 + std::max(std::abs(r1), std::abs(r2));
      CHECK(std::abs(sp.sigma1 - r1) <= 1e-12 * scale);
      CHECK(std::abs(sp.sigma2 - r2) <= 1e-12 * scale);
      ++checked;
    }
  }
  CHECK(checked >= 600);
}

TEST_CASE("M0 classification flips from source to center to sink at p_pseudo") {
  for (ProblemParams pm :
       {unit_params(), skew_plus(), make_params(1.0, 2.0, Operator::MMinus, 3, 1.0)}) {
    double pp = p_pseudo(pm);
    StationaryPoint below = classify_stationary(SPLabel::M0, pp - 1e-6, pm);
    StationaryPoint at = classify_stationary(SPLabel::M0, pp, pm);
    StationaryPoint above = classify_stationary(SPLabel::M0, pp + 1e-6, pm);
    CHECK(below.cls == SPClass::Source);
    CHECK(at.cls == SPClass::Center);
    CHECK(above.cls == SPClass::Sink);
    CHECK(at.jacobian[0][0] + at.jacobian[1][1] ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("A0 moves from source through non-hyperbolic to saddle at p_serrin") {
  for (ProblemParams pm : {unit_params(), skew_plus(), skew_minus()}) {
    double ps = p_serrin(pm);
    CHECK(classify_stationary(SPLabel::A0, ps - 0.2, pm).cls == SPClass::Source);
    CHECK(classify_stationary(SPLabel::A0, ps, pm).cls == SPClass::NonHyperbolic);
    CHECK(classify_stationary(SPLabel::A0, ps + 0.2, pm).cls == SPClass::Saddle);
    // the vanishing eigenvalue sits in the second slot at the threshold
    StationaryPoint at = classify_stationary(SPLabel::A0, ps, pm);
    CHECK(std::abs(at.sigma2) < 1e-12);
  }
}

TEST_CASE("M0 in the quadrant is never a saddle") {
  std::mt19937 rng(8103);
  for (int i = 0; i < 300; ++i) {
    Operator op = (i % 2 == 0) ? Operator::MPlus : Operator::MMinus;
    ProblemParams pm = random_params(rng, op);
    double ps = p_serrin(pm);
    std::uniform_real_distribution<double> pd(ps + 1e-3, ps + 8.0);
    double p = pd(rng);
    StationaryPoint m0 = classify_stationary(SPLabel::M0, p, pm);
    CHECK(m0.cls != SPClass::Saddle);
    // determinant of the linearization stays positive in the quadrant
    const Mat2& J = m0.jacobian;
    double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    CHECK(det > 0.0);
    // and the discriminant never reaches the square of the trace
    double tr = J[0][0] + J[1][1];
    double disc = tr * tr - 4.0 * det;
    CHECK(disc < tr * tr + 1e-15);
  }
}

TEST_CASE("requesting M0 below the Serrin-type exponent is an error") {
  ProblemParams pm = skew_plus();  // p_serrin = 5
  try {
    classify_stationary(SPLabel::M0, 4.0, pm);
    FAIL("expected MNotInQuadrant");
  } catch (const error& e) {
    CHECK(e.code() == errc::m_not_in_quadrant);
  }
  // the aggregate listing still includes it, flagged as outside
  auto pts = stationary_points(4.0, pm);
  auto it = std::find_if(pts.begin(), pts.end(),
                         [](const StationaryPoint& s) { return s.label == SPLabel::M0; });
  REQUIRE(it != pts.end());
  CHECK_FALSE(it->in_first_quadrant);
}

TEST_CASE("saddle tangent directions match the documented slopes") {
  SUBCASE("unstable direction leaving N0") {
    ProblemParams pm = make_params(1.0, 2.0, Operator::MPlus, 4, 1.0);
    double p = 6.0;
    StationaryPoint n0 = classify_stationary(SPLabel::N0, p, pm);
    double slope = -p * pm.lambda * (pm.N + pm.a) / (pm.N + 2.0 + 2.0 * pm.a);
    auto it = std::find_if(n0.tangents.begin(), n0.tangents.end(),
                           [](const TangentDirection& t) { return !t.stable; });
    REQUIRE(it != n0.tangents.end());
    CHECK(it->x >= 0.0);
    CHECK(it->z / it->x == doctest::Approx(slope).epsilon(1e-10));
  }
  SUBCASE("stable direction entering A0") {
    ProblemParams pm = skew_plus();
    double p = 7.0;  // above p_serrin = 5, A0 is a saddle
    double nt = pm.ntilde();
    StationaryPoint a0 = classify_stationary(SPLabel::A0, p, pm);
    double slope = pm.Lambda * (2.0 + pm.a - p * (nt - 2.0)) / (nt - 2.0);
    auto st = std::find_if(a0.tangents.begin(), a0.tangents.end(),
                           [](const TangentDirection& t) { return t.stable; });
    REQUIRE(st != a0.tangents.end());
    CHECK(st->z / st->x == doctest::Approx(slope).epsilon(1e-10));
    // the unstable direction lies along the X axis
    auto un = std::find_if(a0.tangents.begin(), a0.tangents.end(),
                           [](const TangentDirection& t) { return !t.stable; });
    REQUIRE(un != a0.tangents.end());
    CHECK(std::fabs(un->z) < 1e-12);
    CHECK(un->x == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("N0 eigenvalues generalize the classical pair with the weight") {
  for (double a : {0.0, 1.0, 2.5}) {
    ProblemParams pm = make_params(1.0, 1.0, Operator::MPlus, 3, a);
    StationaryPoint n0 = classify_stationary(SPLabel::N0, 4.0, pm);
    CHECK(n0.sigma1.real() == doctest::Approx(2.0 + a).epsilon(1e-13));
    CHECK(n0.sigma2.real() == doctest::Approx(-(pm.N + a)).epsilon(1e-13));
    CHECK(n0.sigma1.imag() == 0.0);
    CHECK(n0.cls == SPClass::Saddle);
  }
}
