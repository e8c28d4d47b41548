#pragma once

// Black-Scholes utilities at zero rate (a nonzero rate is accepted for
// completeness): price, delta, vega, and implied-volatility inversion by
// Newton iterations with a bisection fallback.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psmc {

enum class OptionType { call, put };

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// T in years, sigma annualized.
inline double bs_price(double spot, double strike, double maturity, double sigma, double rate = 0.0,
                       OptionType type = OptionType::call) {
  if (!(spot > 0.0) || !(strike > 0.0)) throw std::invalid_argument("bs_price: need S, K > 0");
  if (maturity < 0.0) throw std::invalid_argument("bs_price: negative maturity");
  const double df = std::exp(-rate * maturity);
  const double call_floor = std::max(spot - strike * df, 0.0);
  if (maturity == 0.0 || sigma <= 0.0)
    return type == OptionType::call ? call_floor : std::max(strike * df - spot, 0.0);
  const double vol = sigma * std::sqrt(maturity);
  const double d1 = (std::log(spot / (strike * df))) / vol + 0.5 * vol;
  const double d2 = d1 - vol;
  const double call = spot * normal_cdf(d1) - strike * df * normal_cdf(d2);
  if (type == OptionType::call) return call;
  return call - spot + strike * df;  // parity
}

inline double bs_delta(double spot, double strike, double maturity, double sigma,
                       double rate = 0.0, OptionType type = OptionType::call) {
  if (!(spot > 0.0) || !(strike > 0.0)) throw std::invalid_argument("bs_delta: need S, K > 0");
  if (maturity <= 0.0 || sigma <= 0.0) {
    const double intrinsic_delta =
        type == OptionType::call ? (spot > strike ? 1.0 : 0.0) : (spot < strike ? -1.0 : 0.0);
    return intrinsic_delta;
  }
  const double df = std::exp(-rate * maturity);
  const double vol = sigma * std::sqrt(maturity);
  const double d1 = (std::log(spot / (strike * df))) / vol + 0.5 * vol;
  return type == OptionType::call ? normal_cdf(d1) : normal_cdf(d1) - 1.0;
}

inline double bs_vega(double spot, double strike, double maturity, double sigma,
                      double rate = 0.0) {
  if (maturity <= 0.0 || sigma <= 0.0) return 0.0;
  const double df = std::exp(-rate * maturity);
  const double vol = sigma * std::sqrt(maturity);
  const double d1 = (std::log(spot / (strike * df))) / vol + 0.5 * vol;
  return spot * normal_pdf(d1) * std::sqrt(maturity);
}

// Inverts the call (or put) price. Prices at the intrinsic bound map to 0;
// prices outside [intrinsic, spot-or-strike bound] are rejected.
inline double implied_vol(double price, double spot, double strike, double maturity,
                          double rate = 0.0, OptionType type = OptionType::call) {
  if (!(spot > 0.0) || !(strike > 0.0)) throw std::invalid_argument("implied_vol: need S, K > 0");
  if (!(maturity > 0.0)) throw std::invalid_argument("implied_vol: need T > 0");
  const double df = std::exp(-rate * maturity);
  const double intrinsic = type == OptionType::call ? std::max(spot - strike * df, 0.0)
                                                    : std::max(strike * df - spot, 0.0);
  const double upper = type == OptionType::call ? spot : strike * df;
  const double slack = 1e-12 * spot;
  if (price < intrinsic - slack || price >= upper)
    throw std::invalid_argument("implied_vol: price outside no-arbitrage bounds");
  if (price <= intrinsic + slack) return 0.0;

  double sigma = std::sqrt(2.0 * std::numbers::pi / maturity) * price / spot;  // standard seed
  sigma = std::clamp(sigma, 1e-4, 5.0);
  for (int it = 0; it < 100; ++it) {
    const double diff = bs_price(spot, strike, maturity, sigma, rate, type) - price;
    if (std::abs(diff) < 1e-14 * spot) return sigma;
    const double vega = bs_vega(spot, strike, maturity, sigma, rate);
    if (vega < 1e-14) break;
    const double step = diff / vega;
    const double next = sigma - step;
    if (next <= 0.0 || next > 10.0) break;
    sigma = next;
    // Newton converges quadratically, so a sub-1e-12 step means the
    // remaining error is far below it.
    if (std::abs(step) < 1e-12 * std::max(1.0, sigma)) return sigma;
  }
  // Bisection fallback: price is increasing in sigma.
  double lo = 1e-10, hi = 5.0;
  while (bs_price(spot, strike, maturity, hi, rate, type) < price) {
    hi *= 2.0;
    if (hi > 50.0) throw std::runtime_error("implied_vol: no volatility matches the price");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bs_price(spot, strike, maturity, mid, rate, type) < price)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace psmc
