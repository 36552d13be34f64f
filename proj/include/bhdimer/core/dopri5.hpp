// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace bhd::ode {

struct Tolerances {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double initial_step = 0.0;  // 0 selects the step automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::int64_t max_steps = 500'000'000;
};

class StepUnderflow : public std::runtime_error {
 public:
  explicit StepUnderflow(double t)
      : std::runtime_error("integration step size underflow at t = " + std::to_string(t)),
        time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Dormand-Prince 5(4) with FSAL and fourth-order continuous extension.
///
/// `State` is any fixed or dynamic Eigen dense type. The right-hand side is
/// called as `rhs(t, y, dydt)` and assigns the derivative to `dydt`.
template <class State, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, const State& y0, double t0, Tolerances tol = {})
      : rhs_(std::move(rhs)), tol_(tol) {
    if (!(tol_.rel_tol > 0.0) || !(tol_.abs_tol >= 0.0))
      throw std::invalid_argument("tolerances must be positive");
    reset(t0, y0);
  }

  /// Restarts from a new point; the next step size is chosen afresh.
  void reset(double t0, const State& y0) {
    t_ = t_old_ = t0;
    y_ = y0;
    k1_ = y0;
    rhs_(t_, y_, k1_);
    h_ = tol_.initial_step > 0.0 ? tol_.initial_step : initial_step();
    has_dense_ = false;
  }

  double t() const noexcept { return t_; }
  double t_prev() const noexcept { return t_old_; }
  const State& y() const noexcept { return y_; }
  std::int64_t steps() const noexcept { return n_steps_; }
  std::int64_t evaluations() const noexcept { return n_eval_; }

  /// Takes one accepted step, never going past `t_limit`.
  void step(double t_limit = std::numeric_limits<double>::infinity()) {
    bool last_rejected = false;
    for (;;) {
      if (++n_steps_ > tol_.max_steps) throw StepUnderflow(t_);
      double h = std::min(h_, tol_.max_step);
      bool hits_limit = false;
      if (t_ + h >= t_limit) {
        h = t_limit - t_;
        hits_limit = true;
      }
      const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_));
      if (!(h > h_min) && !hits_limit) throw StepUnderflow(t_);
      if (!(h > 0.0)) throw std::logic_error("step requested at or beyond the limit");

      attempt(h);
      const double err = error_norm();
      if (!std::isfinite(err)) {
        h_ = 0.2 * h;
        last_rejected = true;
        if (h_ <= h_min) throw StepUnderflow(t_);
        continue;
      }
      double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      if (err <= 1.0) {
        build_dense(h);
        t_old_ = t_;
        y_old_.swap(y_);
        y_.swap(y_new_);
        k1_.swap(k7_);
        t_ = hits_limit ? t_limit : t_ + h;
        if (!hits_limit || fac < 1.0) h_ = h * fac;
        return;
      }
      h_ = h * fac;
      last_rejected = true;
      if (h_ <= h_min) throw StepUnderflow(t_);
    }
  }

  /// Continuous extension on the last accepted step, t in [t_prev, t].
  void dense(double t, State& out) const {
    if (!has_dense_) {
      out = y_;
      return;
    }
    const double h = t_ - t_old_;
    const double th = (t - t_old_) / h;
    const double th1 = 1.0 - th;
    out = r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
  }

  State dense(double t) const {
    State out;
    dense(t, out);
    return out;
  }

  /// Integrates to `t_end`, calling `observe(t, y)` on every point of `grid`
  /// (ascending, within (t, t_end]) using the continuous extension.
  template <class Grid, class Observe>
  void integrate_sampled(double t_end, const Grid& grid, Observe&& observe) {
    std::size_t i = 0;
    while (i < grid.size() && grid[i] <= t_) {
      if (grid[i] == t_) observe(t_, y_);
      ++i;
    }
    State tmp;
    while (t_ < t_end) {
      step(t_end);
      while (i < grid.size() && grid[i] <= t_) {
        if (grid[i] == t_) {
          observe(t_, y_);
        } else {
          dense(grid[i], tmp);
          observe(grid[i], tmp);
        }
        ++i;
      }
    }
  }

  void integrate_to(double t_end) {
    while (t_ < t_end) step(t_end);
  }

 private:
  void eval(double t, const State& y, State& dy) {
    ++n_eval_;
    rhs_(t, y, dy);
  }

  void attempt(double h) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    tmp_ = y_ + (h * a21) * k1_;
    eval(t_ + c2 * h, tmp_, k2_);
    tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    eval(t_ + c3 * h, tmp_, k3_);
    tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    eval(t_ + c4 * h, tmp_, k4_);
    tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    eval(t_ + c5 * h, tmp_, k5_);
    tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    eval(t_ + h, tmp_, k6_);
    y_new_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    eval(t_ + h, y_new_, k7_);
    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
  }

  double error_norm() const {
    const auto sc = tol_.abs_tol + tol_.rel_tol * y_.cwiseAbs().array().max(y_new_.cwiseAbs().array());
    const double n = static_cast<double>(y_.size());
    return std::sqrt((err_.cwiseAbs().array() / sc).square().sum() / n);
  }

  double initial_step() {
    const auto sc = tol_.abs_tol + tol_.rel_tol * y_.cwiseAbs().array();
    const double n = static_cast<double>(y_.size());
    const double d0 = std::sqrt((y_.cwiseAbs().array() / sc).square().sum() / n);
    const double d1 = std::sqrt((k1_.cwiseAbs().array() / sc).square().sum() / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, tol_.max_step);
    tmp_ = y_ + h0 * k1_;
    eval(t_ + h0, tmp_, k2_);
    const double d2 = std::sqrt(((k2_ - k1_).cwiseAbs().array() / sc).square().sum() / n) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, tol_.max_step});
  }

  void build_dense(double h) {
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    r1_ = y_;
    r2_ = y_new_ - y_;
    r3_ = h * k1_ - r2_;
    r4_ = r2_ - h * k7_ - r3_;
    r5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
    has_dense_ = true;
  }

  Rhs rhs_;
  Tolerances tol_;
  double t_ = 0.0, t_old_ = 0.0, h_ = 0.0;
  State y_, y_old_, y_new_, tmp_, err_;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  State r1_, r2_, r3_, r4_, r5_;
  bool has_dense_ = false;
  std::int64_t n_steps_ = 0, n_eval_ = 0;
};

template <class State, class Rhs>
Dopri5<State, Rhs> make_dopri5(Rhs rhs, const State& y0, double t0, Tolerances tol = {}) {
  return Dopri5<State, Rhs>(std::move(rhs), y0, t0, tol);
}

}  // namespace bhd::ode
