#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include "pucci/errors.hpp"

namespace pucci {

// Embedded Dormand-Prince 5(4) pair with the standard quartic dense output.
// Kept header-only and dimension-templated so the phase-plane flow and the
// radial shooter share one core.

template <std::size_t K>
using StateVec = std::array<double, K>;

template <std::size_t K>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<StateVec<K>, 5> rcont{};

  StateVec<K> eval(double t) const {
    double theta = (t - t0) / h;
    double th1 = 1.0 - theta;
    StateVec<K> y;
    for (std::size_t i = 0; i < K; ++i) {
      y[i] = rcont[0][i] +
             theta * (rcont[1][i] +
                      th1 * (rcont[2][i] + theta * (rcont[3][i] + th1 * rcont[4][i])));
    }
    return y;
  }
};

template <std::size_t K, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, double rtol, double atol) : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

  void init(double t0, const StateVec<K>& y0) {
    t_ = t0;
    y_ = y0;
    rhs_(t_, y_, k1_);
    h_ = initial_step();
    have_k1_ = true;
  }

  double t() const { return t_; }
  const StateVec<K>& y() const { return y_; }
  const StateVec<K>& dydt() const { return k1_; }
  void set_max_step(double hmax) { hmax_ = hmax; }

  // Jump to (t, ynew), e.g. after truncating a step at an event.
  void reset(double t, const StateVec<K>& ynew) {
    t_ = t;
    y_ = ynew;
    rhs_(t_, y_, k1_);
    have_k1_ = true;
  }

  // Advance one accepted step; fills the dense interpolant for [t0, t0+h].
  // Throws StepSizeUnderflow if the controller collapses.
  void step(DenseStep<K>& out) {
    if (!have_k1_) rhs_(t_, y_, k1_);
    for (int attempt = 0; attempt < 64; ++attempt) {
      double h = std::min(h_, hmax_);
      if (h < 1e-14 * std::max(1.0, std::fabs(t_)))
        raise(errc::step_size_underflow, "adaptive step collapsed");
      StateVec<K> k2, k3, k4, k5, k6, k7, yt, y5;
      auto stage = [&](double c, const double* a, int na, StateVec<K>& out_k) {
        for (std::size_t i = 0; i < K; ++i) {
          double acc = 0.0;
          const StateVec<K>* ks[6] = {&k1_, &k2, &k3, &k4, &k5, &k6};
          for (int j = 0; j < na; ++j) acc += a[j] * (*ks[j])[i];
          yt[i] = y_[i] + h * acc;
        }
        rhs_(t_ + c * h, yt, out_k);
      };
      static const double a2[] = {0.2};
      static const double a3[] = {3.0 / 40.0, 9.0 / 40.0};
      static const double a4[] = {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
      static const double a5[] = {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0,
                                  -212.0 / 729.0};
      static const double a6[] = {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
                                  -5103.0 / 18656.0};
      static const double b[] = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
                                 -2187.0 / 6784.0, 11.0 / 84.0};
      static const double e[] = {71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                 -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0};
      stage(0.2, a2, 1, k2);
      stage(0.3, a3, 2, k3);
      stage(0.8, a4, 3, k4);
      stage(8.0 / 9.0, a5, 4, k5);
      stage(1.0, a6, 5, k6);
      for (std::size_t i = 0; i < K; ++i)
        y5[i] = y_[i] + h * (b[0] * k1_[i] + b[2] * k3[i] + b[3] * k4[i] + b[4] * k5[i] +
                             b[5] * k6[i]);
      rhs_(t_ + h, y5, k7);
      double errnorm = 0.0;
      for (std::size_t i = 0; i < K; ++i) {
        double err = h * (e[0] * k1_[i] + e[2] * k3[i] + e[3] * k4[i] + e[4] * k5[i] +
                          e[5] * k6[i] + e[6] * k7[i]);
        double sc = atol_ + rtol_ * std::max(std::fabs(y_[i]), std::fabs(y5[i]));
        errnorm += (err / sc) * (err / sc);
      }
      errnorm = std::sqrt(errnorm / K);
      if (!(errnorm <= 1.0) || !std::isfinite(errnorm)) {
        double shrink = std::isfinite(errnorm) && errnorm > 0.0
                            ? std::max(0.2, 0.9 * std::pow(errnorm, -0.2))
                            : 0.2;
        h_ = h * std::min(shrink, 0.9);
        continue;
      }
      // accepted: build the dense interpolant
      static const double d[] = {-12715105075.0 / 11282082432.0, 0.0,
                                 87487479700.0 / 32700410799.0, -10690763975.0 / 1880347072.0,
                                 701980252875.0 / 199316789632.0, -1453857185.0 / 822651844.0,
                                 69997945.0 / 29380423.0};
      out.t0 = t_;
      out.h = h;
      for (std::size_t i = 0; i < K; ++i) {
        double dy = y5[i] - y_[i];
        out.rcont[0][i] = y_[i];
        out.rcont[1][i] = dy;
        out.rcont[2][i] = h * k1_[i] - dy;
        out.rcont[3][i] = dy - h * k7[i] - out.rcont[2][i];
        out.rcont[4][i] = h * (d[0] * k1_[i] + d[2] * k3[i] + d[3] * k4[i] + d[4] * k5[i] +
                               d[5] * k6[i] + d[6] * k7[i]);
      }
      t_ += h;
      y_ = y5;
      k1_ = k7;  // FSAL
      have_k1_ = true;
      double grow = errnorm > 0.0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
      h_ = h * std::min(5.0, std::max(0.2, grow));
      return;
    }
    raise(errc::step_size_underflow, "step repeatedly rejected");
  }

 private:
  double initial_step() const {
    double ynorm = 0.0, fnorm = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      ynorm = std::max(ynorm, std::fabs(y_[i]));
      fnorm = std::max(fnorm, std::fabs(k1_[i]));
    }
    double h = 1e-4 * (1.0 + ynorm) / (1.0 + fnorm);
    return std::min(h, hmax_);
  }

  Rhs rhs_;
  double rtol_, atol_;
  double t_ = 0.0, h_ = 1e-6;
  double hmax_ = 1e100;
  StateVec<K> y_{}, k1_{};
  bool have_k1_ = false;
};

template <std::size_t K, class Rhs>
Dopri5<K, Rhs> make_dopri5(Rhs rhs, double rtol, double atol) {
  return Dopri5<K, Rhs>(std::move(rhs), rtol, atol);
}

}  // namespace pucci
