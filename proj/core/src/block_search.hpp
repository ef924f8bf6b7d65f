#pragma once

#include <cmath>
#include <deque>

#include "divclust/common.hpp"

namespace divclust::detail {

inline constexpr double kArmijo = 1e-4;
inline constexpr int kMaxHalvings = 60;

// Armijo backtracking along `dir` from `x`. Starts at `t0`, halves on failure.
// Returns the accepted step or 0 when none decreases the objective enough.
template <typename Loss>
double armijo(const Vector& x, double f0, const Vector& grad, const Vector& dir, double t0,
              Loss&& loss, Vector& x_out, double& f_out) {
  const double slope = grad.dot(dir);
  if (!(slope < 0.0)) return 0.0;
  double t = t0;
  for (int i = 0; i < kMaxHalvings; ++i, t *= 0.5) {
    Vector trial = x + t * dir;
    const double f1 = loss(trial);
    if (std::isfinite(f1) && f1 <= f0 + kArmijo * t * slope) {
      x_out = std::move(trial);
      f_out = f1;
      return t;
    }
  }
  return 0.0;
}

// Limited-memory quasi-Newton on one parameter block. `fg(x, g)` returns the
// loss and writes the gradient. `scale` carries the steepest-descent step
// between calls: it seeds the first iteration and is updated on acceptance.
// The history is local to the call, since the other blocks move in between.
template <typename LossGrad>
void lbfgs(Vector& x, int iterations, double& scale, LossGrad&& fg, int memory = 10) {
  Vector g(x.size());
  double f = fg(x, g);
  std::deque<Vector> s_hist;
  std::deque<Vector> y_hist;
  std::deque<double> rho_hist;
  auto loss_only = [&](const Vector& p) {
    Vector unused(p.size());
    return fg(p, unused);
  };

  for (int k = 0; k < iterations; ++k) {
    if (g.squaredNorm() == 0.0) return;
    Vector dir = -g;
    double t0 = 1.0;
    if (s_hist.empty()) {
      t0 = 2.0 * scale;
    } else {
      std::vector<double> a(s_hist.size());
      for (std::size_t i = s_hist.size(); i-- > 0;) {
        a[i] = rho_hist[i] * s_hist[i].dot(dir);
        dir -= a[i] * y_hist[i];
      }
      dir *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      for (std::size_t i = 0; i < s_hist.size(); ++i) {
        const double b = rho_hist[i] * y_hist[i].dot(dir);
        dir += (a[i] - b) * s_hist[i];
      }
      if (!(g.dot(dir) < 0.0)) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        dir = -g;
        t0 = 2.0 * scale;
      }
    }

    Vector x_new;
    double f_new = f;
    const double t = armijo(x, f, g, dir, t0, loss_only, x_new, f_new);
    if (t == 0.0) return;
    if (s_hist.empty()) scale = t;

    Vector g_new(x.size());
    f_new = fg(x_new, g_new);
    Vector s = x_new - x;
    Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * std::sqrt(s.squaredNorm() * y.squaredNorm())) {
      if (static_cast<int>(s_hist.size()) == memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    const bool stalled = f - f_new <= 1e-15 * std::abs(f);
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    if (stalled) return;
  }
}

}  // namespace divclust::detail
