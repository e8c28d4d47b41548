#pragma once

// Limited-memory BFGS with a strong-Wolfe line search (bracket + zoom).
// Accepted steps satisfy the Armijo condition, so the reported loss history
// is non-increasing.

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

namespace psmc {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 1000;
  double armijo_c1 = 1e-4;
  double curvature_c2 = 0.9;
  int max_step_trials = 40;
  double gradient_tolerance = 1e-12;
};

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool stopped_by_callback = false;
  std::vector<double> loss_history;  // accepted values, non-increasing
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// objective(x, grad) returns f and fills grad. stop(f, x) is checked after
// every accepted step; returning true ends the run with
// stopped_by_callback = true.
template <class Objective, class StopFn>
LbfgsResult lbfgs_minimize(Objective&& objective, std::vector<double> x0,
                           const LbfgsOptions& options, StopFn&& stop) {
  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);

  std::vector<double> grad(n), new_x(n), new_grad(n), direction(n);
  double f = objective(result.x, grad);
  result.f = f;
  result.loss_history.push_back(f);
  if (stop(f, result.x)) {
    result.stopped_by_callback = true;
    return result;
  }

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> alpha_buf;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double gnorm = std::sqrt(detail::dot(grad, grad));
    if (gnorm <= options.gradient_tolerance) break;

    // Two-loop recursion for d = -H g.
    direction = grad;
    alpha_buf.assign(s_hist.size(), 0.0);
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha_buf[k] = rho_hist[k] * detail::dot(s_hist[k], direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha_buf[k] * y_hist[k][i];
    }
    if (!s_hist.empty()) {
      const double gamma =
          detail::dot(s_hist.back(), y_hist.back()) / detail::dot(y_hist.back(), y_hist.back());
      for (auto& v : direction) v *= gamma;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * detail::dot(y_hist[k], direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha_buf[k] - beta) * s_hist[k][i];
    }
    for (auto& v : direction) v = -v;

    double dg0 = detail::dot(grad, direction);
    if (dg0 >= 0.0) {
      // Not a descent direction: fall back to steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      dg0 = -gnorm * gnorm;
      if (dg0 == 0.0) break;
    }

    // Strong-Wolfe line search on phi(a) = f(x + a d).
    auto eval = [&](double a, double& dg_out) {
      for (std::size_t i = 0; i < n; ++i) new_x[i] = result.x[i] + a * direction[i];
      const double fa = objective(new_x, new_grad);
      dg_out = detail::dot(new_grad, direction);
      return fa;
    };

    const double c1 = options.armijo_c1, c2 = options.curvature_c2;
    double lo = 0.0, f_lo = f;
    double alpha = 1.0, alpha_prev = 0.0, f_prev = f;
    double accepted = -1.0, f_new = f;
    double best_armijo_a = -1.0, best_armijo_f = f;
    int trials = 0;
    bool zooming = false;
    double hi = 0.0;

    auto note_armijo = [&](double a, double fa) {
      if (fa <= f + c1 * a * dg0 && fa < best_armijo_f) {
        best_armijo_a = a;
        best_armijo_f = fa;
      }
    };

    while (trials++ < options.max_step_trials) {
      double dg;
      if (!zooming) {
        const double fa = eval(alpha, dg);
        note_armijo(alpha, fa);
        if (fa > f + c1 * alpha * dg0 || (trials > 1 && fa >= f_prev)) {
          zooming = true;
          lo = alpha_prev; f_lo = f_prev;
          hi = alpha;
          continue;
        }
        if (std::abs(dg) <= -c2 * dg0) { accepted = alpha; f_new = fa; break; }
        if (dg >= 0.0) {
          zooming = true;
          lo = alpha; f_lo = fa;
          hi = alpha_prev;
          continue;
        }
        alpha_prev = alpha; f_prev = fa;
        alpha *= 2.0;
        if (alpha > 1e6) break;
      } else {
        const double mid = 0.5 * (lo + hi);
        const double fa = eval(mid, dg);
        note_armijo(mid, fa);
        if (fa > f + c1 * mid * dg0 || fa >= f_lo) {
          hi = mid;
        } else {
          if (std::abs(dg) <= -c2 * dg0) { accepted = mid; f_new = fa; break; }
          if (dg * (hi - lo) >= 0.0) hi = lo;
          lo = mid; f_lo = fa;
        }
        if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
      }
    }

    if (accepted < 0.0) {
      // No strong-Wolfe point found; take the best Armijo point seen, if any.
      if (best_armijo_a > 0.0 && best_armijo_f < f) {
        double dg;
        f_new = eval(best_armijo_a, dg);
        accepted = best_armijo_a;
      } else {
        break;  // stuck: line search failed to make progress
      }
    }

    // new_x / new_grad currently hold the accepted trial.
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = new_x[i] - result.x[i];
      y[i] = new_grad[i] - grad[i];
    }
    const double sy = detail::dot(s, y);
    if (sy > 1e-10 * std::sqrt(detail::dot(s, s)) * std::sqrt(detail::dot(y, y))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    result.x.swap(new_x);
    grad.swap(new_grad);
    f = f_new;
    result.f = f;
    result.iterations = iter + 1;
    result.loss_history.push_back(f);
    if (stop(f, result.x)) {
      result.stopped_by_callback = true;
      return result;
    }
  }
  result.f = f;
  return result;
}

}  // namespace psmc
