#pragma once

// Hedged Monte-Carlo option pricing on a weighted path ensemble.
//
// Backward induction from expiry: at each earlier day the continuation value
// and the hedge are fit jointly by weighted least squares, minimizing the
// one-day hedged residual
//   sum_k w_k (C_{t+1}(S_k,t+1) - C_t(S_k,t) - phi_t(S_k,t) (S_k,t+1 - S_k,t))^2.
// The value C_t is expanded over cubic B-splines in log-moneyness and the
// hedge phi_t uses the analytic derivative of the same expansion, so both
// share one coefficient vector. The day-0 slice, where every path starts at
// the same spot, reduces to a two-parameter fit (price and hedge ratio).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "psmc/black_scholes.hpp"
#include "psmc/fft.hpp"

namespace psmc {

struct HmcOptions {
  int basis_size = 12;        // cubic splines per time slice
  double ridge = 1e-8;        // Tikhonov term on the normalized normal equations
  double quantile_low = 0.01;  // slice range covers these ensemble quantiles
  double quantile_high = 0.99;
};

struct HmcResult {
  double price = 0.0;
  double hedge_ratio = 0.0;  // day-0 hedge from the same fit
  bool regularized = false;  // set when a degenerate slice fell back to a constant fit
};

namespace detail {

// Cubic B-spline bump on [0, 4] and its derivative.
inline double bspline3(double s) {
  if (s <= 0.0 || s >= 4.0) return 0.0;
  if (s < 1.0) return s * s * s / 6.0;
  if (s < 2.0) return (((-3.0 * s + 12.0) * s - 12.0) * s + 4.0) / 6.0;
  if (s < 3.0) return (((3.0 * s - 24.0) * s + 60.0) * s - 44.0) / 6.0;
  const double r = 4.0 - s;
  return r * r * r / 6.0;
}

inline double bspline3_deriv(double s) {
  if (s <= 0.0 || s >= 4.0) return 0.0;
  if (s < 1.0) return 0.5 * s * s;
  if (s < 2.0) return (-9.0 * s * s + 24.0 * s - 12.0) / 6.0;
  if (s < 3.0) return (9.0 * s * s - 48.0 * s + 60.0) / 6.0;
  const double r = 4.0 - s;
  return -0.5 * r * r;
}

// Spline sheet over [lo, hi] with linear extension beyond the range.
struct SplineSheet {
  double lo = 0.0;
  double step = 1.0;
  int count = 12;

  // Writes B_i(z) into val[] and dB_i/dz into der[] for all i.
  void eval(double z, double* val, double* der) const {
    std::fill(val, val + count, 0.0);
    std::fill(der, der + count, 0.0);
    const double u = (z - lo) / step;
    const double uc = std::clamp(u, 0.0, static_cast<double>(count - 3));
    const double overshoot = (u - uc) * step;  // signed distance outside the range, in z
    const int first = std::max(0, static_cast<int>(std::floor(uc)) - 1);
    const int last = std::min(count - 1, static_cast<int>(std::floor(uc)) + 3);
    for (int i = first; i <= last; ++i) {
      const double s = uc - i + 3.0;
      const double b = bspline3(s);
      const double db = bspline3_deriv(s) / step;
      val[i] = b + db * overshoot;
      der[i] = db;
    }
  }
};

inline double weighted_quantile_sorted(const std::vector<std::pair<double, double>>& zw,
                                       double total, double p) {
  const double cut = p * total;
  double acc = 0.0;
  for (const auto& [z, w] : zw) {
    acc += w;
    if (acc >= cut) return z;
  }
  return zw.back().first;
}

}  // namespace detail

inline double option_payoff(double spot, double strike, OptionType type) {
  return type == OptionType::call ? std::max(spot - strike, 0.0) : std::max(strike - spot, 0.0);
}

// paths: price paths, each of length >= maturity_days + 1, sharing the day-0
// spot. weights: nonnegative, positive sum; they are normalized internally so
// overall scale has no effect.
inline HmcResult hmc_price(const std::vector<rvec>& paths, const rvec& weights, int maturity_days,
                           double strike, OptionType type = OptionType::call,
                           const HmcOptions& opt = {}) {
  const std::size_t n = paths.size();
  if (n == 0) throw std::invalid_argument("hmc_price: empty ensemble");
  if (weights.size() != n) throw std::invalid_argument("hmc_price: weights size mismatch");
  if (maturity_days < 1) throw std::invalid_argument("hmc_price: maturity must be >= 1 day");
  if (opt.basis_size < 4) throw std::invalid_argument("hmc_price: basis_size must be >= 4");
  if (n < 10 * static_cast<std::size_t>(opt.basis_size))
    throw std::invalid_argument("hmc_price: ensemble smaller than 10x basis size");
  if (!(strike > 0.0)) throw std::invalid_argument("hmc_price: strike must be positive");
  const std::size_t len = static_cast<std::size_t>(maturity_days) + 1;
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("hmc_price: weights must be nonnegative");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("hmc_price: weights sum to zero");
  const double spot0 = paths[0][0];
  for (const rvec& p : paths) {
    if (p.size() < len) throw std::invalid_argument("hmc_price: path shorter than maturity");
    if (p[0] != spot0) throw std::invalid_argument("hmc_price: paths must share the initial spot");
    for (std::size_t u = 0; u < len; ++u)
      if (!(p[u] > 0.0)) throw std::invalid_argument("hmc_price: nonpositive price");
  }

  rvec w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = weights[k] / wsum;

  rvec value(n);
  for (std::size_t k = 0; k < n; ++k)
    value[k] = option_payoff(paths[k][len - 1], strike, type);

  bool regularized = false;
  const int nb = opt.basis_size;
  std::vector<double> bval(nb), bder(nb);
  Eigen::MatrixXd gram(nb, nb);
  Eigen::VectorXd rhs(nb), coef(nb);

  // Two-parameter fit: value c plus hedge p against the one-day move.
  const auto flat_fit = [&](std::size_t t) -> std::pair<double, double> {
    double a00 = 0.0, a01 = 0.0, a11 = 0.0, b0 = 0.0, b1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double ds = paths[k][t + 1] - paths[k][t];
      a00 += w[k];
      a01 += w[k] * ds;
      a11 += w[k] * ds * ds;
      b0 += w[k] * value[k];
      b1 += w[k] * value[k] * ds;
    }
    const double det = a00 * a11 - a01 * a01;
    if (det > 1e-14 * std::max(1.0, a00 * a11)) {
      return {(b0 * a11 - b1 * a01) / det, (a00 * b1 - a01 * b0) / det};
    }
    // No usable move variance: price is the weighted mean, hedge undefined.
    return {b0 / a00, 0.0};
  };

  std::vector<std::pair<double, double>> zw(n);
  for (int t = maturity_days - 1; t >= 1; --t) {
    const std::size_t tu = static_cast<std::size_t>(t);
    for (std::size_t k = 0; k < n; ++k)
      zw[k] = {std::log(paths[k][tu] / spot0), w[k]};
    std::sort(zw.begin(), zw.end());
    const double lo = detail::weighted_quantile_sorted(zw, 1.0, opt.quantile_low);
    const double hi = detail::weighted_quantile_sorted(zw, 1.0, opt.quantile_high);
    if (hi - lo < 1e-10) {
      const auto [c, p] = flat_fit(tu);
      std::fill(value.begin(), value.end(), c);
      regularized = true;
      (void)p;
      continue;
    }
    detail::SplineSheet sheet{lo, (hi - lo) / (nb - 3), nb};
    gram.setZero();
    rhs.setZero();
    for (std::size_t k = 0; k < n; ++k) {
      const double s_now = paths[k][tu];
      const double z = std::log(s_now / spot0);
      sheet.eval(z, bval.data(), bder.data());
      const double move_over_s = (paths[k][tu + 1] - s_now) / s_now;
      for (int i = 0; i < nb; ++i) bder[i] = bval[i] + bder[i] * move_over_s;
      for (int i = 0; i < nb; ++i) {
        if (bder[i] == 0.0) continue;
        const double wi = w[k] * bder[i];
        rhs(i) += wi * value[k];
        for (int j = 0; j < nb; ++j)
          if (bder[j] != 0.0) gram(i, j) += wi * bder[j];
      }
    }
    for (int i = 0; i < nb; ++i) gram(i, i) += opt.ridge;
    coef = gram.ldlt().solve(rhs);
    if (!coef.allFinite()) {
      for (int i = 0; i < nb; ++i) gram(i, i) += 1e3 * opt.ridge;
      coef = gram.ldlt().solve(rhs);
      regularized = true;
      if (!coef.allFinite()) throw std::runtime_error("hmc_price: singular slice regression");
    }
    for (std::size_t k = 0; k < n; ++k) {
      sheet.eval(std::log(paths[k][tu] / spot0), bval.data(), bder.data());
      double v = 0.0;
      for (int i = 0; i < nb; ++i) v += coef(i) * bval[i];
      value[k] = v;
    }
  }

  const auto [price, hedge] = flat_fit(0);
  return {price, hedge, regularized};
}

}  // namespace psmc
