#pragma once

// Four-factor path-dependent volatility baseline: a trend feature R1 and an
// activity feature R2, each a convolution of past (squared) returns with a
// two-exponential kernel, feeding an affine volatility map
// sigma = beta0 + beta1 R1 + beta2 sqrt(R2), floored at zero.
//
// Kernels are raw exponential mixtures k(u) = sum_i w_i exp(-u/tau_i) over
// integer lags u = 0, 1, 2, ... (lag 0 = today's return). Any unit
// conventions (annualization, normalization) belong to the kernel weights.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "psmc/forecast.hpp"
#include "psmc/random.hpp"
#include "psmc/spectra.hpp"

namespace psmc {

struct PdvKernels {
  struct Exponential {
    double weight = 0.0;
    double tau = 1.0;  // decay timescale in days
  };
  std::vector<Exponential> k1, k2;

  void validate() const {
    if (k1.empty() || k2.empty()) throw std::invalid_argument("pdv kernels: empty mixture");
    for (const auto& e : k1)
      if (!(e.tau > 0.0)) throw std::invalid_argument("pdv kernels: tau must be > 0");
    for (const auto& e : k2) {
      if (!(e.tau > 0.0)) throw std::invalid_argument("pdv kernels: tau must be > 0");
      if (e.weight < 0.0)
        throw std::invalid_argument("pdv kernels: K2 weights must be >= 0 (keeps R2 >= 0)");
    }
  }

  // Example parameter set, chosen so that with daily log-returns R1 behaves
  // like an annualized trend and R2 like an annualized variance
  // (weights fold in the 252 annualization and the geometric-sum
  // normalization). Illustrative values, not a calibrated reference.
  static PdvKernels illustrative() {
    PdvKernels k;
    const double root_ann = std::sqrt(252.0);
    auto mean_weight = [](double share, double tau) { return share * (1.0 - std::exp(-1.0 / tau)); };
    k.k1 = {{root_ann * mean_weight(0.7, 5.0), 5.0}, {root_ann * mean_weight(0.3, 40.0), 40.0}};
    k.k2 = {{252.0 * mean_weight(0.6, 10.0), 10.0}, {252.0 * mean_weight(0.4, 120.0), 120.0}};
    return k;
  }
};

struct PdvBetas {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

struct PdvFeatures {
  double r1 = 0.0;
  double r2 = 0.0;
};

namespace detail {

// Per-factor exponential states advanced one return at a time:
// E_i(t) = r_t + exp(-1/tau_i) E_i(t-1), so R = sum_i w_i E_i equals the
// lag-0-inclusive convolution of the kernel with past returns.
struct PdvState {
  const PdvKernels* kernels;
  std::vector<double> e1, e2;

  explicit PdvState(const PdvKernels& k) : kernels(&k), e1(k.k1.size(), 0.0), e2(k.k2.size(), 0.0) {}

  void push_return(double r) {
    for (std::size_t i = 0; i < e1.size(); ++i)
      e1[i] = r + std::exp(-1.0 / kernels->k1[i].tau) * e1[i];
    const double r2 = r * r;
    for (std::size_t i = 0; i < e2.size(); ++i)
      e2[i] = r2 + std::exp(-1.0 / kernels->k2[i].tau) * e2[i];
  }

  PdvFeatures features() const {
    PdvFeatures f;
    for (std::size_t i = 0; i < e1.size(); ++i) f.r1 += kernels->k1[i].weight * e1[i];
    for (std::size_t i = 0; i < e2.size(); ++i) f.r2 += kernels->k2[i].weight * e2[i];
    return f;
  }
};

}  // namespace detail

inline double pdv_sigma(const PdvFeatures& f, const PdvBetas& betas) {
  const double r2 = std::max(0.0, f.r2);
  return std::max(0.0, betas.beta0 + betas.beta1 * f.r1 + betas.beta2 * std::sqrt(r2));
}

// Features for every date: element t uses returns up to and including
// r_t = x[t] - x[t-1] (element 0 is the zero state).
inline std::vector<PdvFeatures> pdv_feature_series(std::span<const double> x,
                                                   const PdvKernels& kernels) {
  kernels.validate();
  if (x.size() < 2) throw std::invalid_argument("pdv features: need at least 2 samples");
  std::vector<PdvFeatures> out(x.size());
  detail::PdvState state(kernels);
  out[0] = state.features();
  for (std::size_t t = 1; t < x.size(); ++t) {
    state.push_return(x[t] - x[t - 1]);
    out[t] = state.features();
  }
  return out;
}

// Direct O(t) convolution, kept as the cross-check for the recursion.
inline PdvFeatures pdv_features_direct(std::span<const double> x, const PdvKernels& kernels,
                                       std::size_t t) {
  kernels.validate();
  if (t < 1 || t >= x.size()) throw std::out_of_range("pdv features: date outside path");
  PdvFeatures f;
  for (std::size_t s = 1; s <= t; ++s) {
    const double r = x[s] - x[s - 1];
    const double lag = static_cast<double>(t - s);
    for (const auto& e : kernels.k1) f.r1 += e.weight * std::exp(-lag / e.tau) * r;
    for (const auto& e : kernels.k2) f.r2 += e.weight * std::exp(-lag / e.tau) * r * r;
  }
  return f;
}

inline PdvFeatures pdv_features(std::span<const double> x, const PdvKernels& kernels,
                                std::size_t t) {
  kernels.validate();
  if (t < 1 || t >= x.size()) throw std::out_of_range("pdv features: date outside path");
  detail::PdvState state(kernels);
  for (std::size_t s = 1; s <= t; ++s) state.push_return(x[s] - x[s - 1]);
  return state.features();
}

struct PdvSimulationOptions {
  int burn_in = 1000;
  double vol_cap = 5.0;  // annualized explosion guard
  double x0 = 0.0;
};

// Daily Euler scheme for the log-price: one step per day, volatility from
// the path's own history, martingale price (log drift -sigma^2/2 per year).
inline rvec pdv_simulate(const PdvKernels& kernels, const PdvBetas& betas, std::size_t n,
                         std::uint64_t seed, const PdvSimulationOptions& options = {}) {
  kernels.validate();
  if (betas.beta2 < 0.0) throw std::invalid_argument("pdv simulate: beta2 must be >= 0");
  if (n < 2) throw std::invalid_argument("pdv simulate: need n >= 2");
  if (options.burn_in < 0) throw std::invalid_argument("pdv simulate: negative burn-in");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  detail::PdvState state(kernels);
  rvec out(n);
  double x = options.x0;
  const double day = 1.0 / kTradingDaysPerYear;
  const double sqrt_day = std::sqrt(day);
  const std::size_t total = static_cast<std::size_t>(options.burn_in) + n - 1;
  std::size_t recorded = 0;
  out[recorded++] = x;
  for (std::size_t step = 0; step < total; ++step) {
    const double sigma = pdv_sigma(state.features(), betas);
    if (sigma > options.vol_cap)
      throw std::runtime_error("pdv simulate: volatility explosion (cap exceeded)");
    const double r = sigma * sqrt_day * normal(rng) - 0.5 * sigma * sigma * day;
    state.push_return(r);
    x += r;
    if (step >= static_cast<std::size_t>(options.burn_in)) out[recorded++] = x;
  }
  return out;
}

// Model forecast of annualized variance over the next T days:
// (beta0 + beta1 R1 + beta2 sqrt(R2))^2 with the affine part floored at 0.
inline double pdv_predict_vol(std::span<const double> x, const PdvKernels& kernels,
                              const PdvBetas& betas, std::size_t t) {
  const PdvFeatures f = pdv_features(x, kernels, t);
  const double sigma = pdv_sigma(f, betas);
  return sigma * sigma;
}

struct PdvRegressionOptions {
  std::size_t min_history = 252;  // skip the kernel warm-up at the series start
};

// OLS of sqrt(q_T) on (1, R1, sqrt(R2)).
inline PdvBetas pdv_calibrate_regression(std::span<const double> x, const PdvKernels& kernels,
                                         int horizon, const PdvRegressionOptions& options = {}) {
  kernels.validate();
  if (horizon < 1) throw std::invalid_argument("pdv regression: horizon must be >= 1");
  const std::size_t start = std::max<std::size_t>(options.min_history, 1);
  if (x.size() < start + static_cast<std::size_t>(horizon) + 2)
    throw std::invalid_argument("pdv regression: series too short");
  const auto features = pdv_feature_series(x, kernels);
  const std::size_t rows = x.size() - start - static_cast<std::size_t>(horizon);

  Eigen::MatrixXd design(rows, 3);
  Eigen::VectorXd target(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t t = start + i;
    design(i, 0) = 1.0;
    design(i, 1) = features[t].r1;
    design(i, 2) = std::sqrt(std::max(0.0, features[t].r2));
    target(i) = std::sqrt(realized_variance(x, t, horizon));
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3)
    throw std::runtime_error("pdv regression: rank-deficient design matrix");
  Eigen::Vector3d beta = qr.solve(target);
  return PdvBetas{beta(0), beta(1), beta(2)};
}

struct PdvSpectraCalibrationOptions {
  int realizations = 10;
  std::uint64_t seed = 17;
  PdvSimulationOptions simulation;
};

// Picks the beta grid point whose simulated paths have spectra closest to
// the target (mean spectra over the realizations). Grid points whose
// simulation explodes are skipped.
inline PdvBetas pdv_calibrate_spectra(const PdvKernels& kernels,
                                      const std::vector<PdvBetas>& beta_grid,
                                      const ScatteringSpectra& target, const FilterBank& bank,
                                      const PdvSpectraCalibrationOptions& options = {}) {
  if (beta_grid.empty()) throw std::invalid_argument("pdv spectra calibration: empty grid");
  if (options.realizations < 1)
    throw std::invalid_argument("pdv spectra calibration: need >= 1 realization");
  SpectraEngine engine(bank);
  double best = std::numeric_limits<double>::infinity();
  const PdvBetas* winner = nullptr;
  for (const auto& betas : beta_grid) {
    ScatteringSpectra mean;
    mean.index = engine.index();
    mean.values.assign(mean.index.size(), {});
    bool exploded = false;
    for (int r = 0; r < options.realizations && !exploded; ++r) {
      try {
        const rvec path = pdv_simulate(kernels, betas, bank.signal_length,
                                       derive_seed(options.seed, static_cast<std::uint64_t>(r)),
                                       options.simulation);
        const ScatteringSpectra s = engine.compute(path);
        for (std::size_t e = 0; e < mean.values.size(); ++e)
          mean.values[e] += s.values[e] / static_cast<double>(options.realizations);
      } catch (const std::runtime_error&) {
        exploded = true;
      }
    }
    if (exploded) continue;
    const double d = spectra_distance(mean, target);
    if (d < best) {
      best = d;
      winner = &betas;
    }
  }
  if (!winner)
    throw std::runtime_error("pdv spectra calibration: every grid point exploded");
  return *winner;
}

}  // namespace psmc
