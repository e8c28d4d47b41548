#pragma once

// Implied-volatility smiles from weighted path ensembles.
//
// A surface holds one slice per maturity. Strikes are laid out on a
// standardized moneyness grid M = ln(K/S0) / (sigma_atm sqrt(T)), anchored on
// the slice's own at-the-money volatility, so smiles from different dates and
// models are comparable cell by cell. Slice metrics come from a quadratic fit
//   sigma(M) = atm (1 + slope M + curvature M^2)   over |M| <= 1,
// and the skew is slope / sqrt(T years).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "psmc/black_scholes.hpp"
#include "psmc/embedding.hpp"
#include "psmc/forecast.hpp"
#include "psmc/hmc.hpp"
#include "psmc/shadow.hpp"

namespace psmc {

struct SmileCell {
  double moneyness = 0.0;
  double strike = 0.0;
  double price = std::numeric_limits<double>::quiet_NaN();
  double implied = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;
};

struct SmileMetrics {
  double atm = std::numeric_limits<double>::quiet_NaN();
  double slope = std::numeric_limits<double>::quiet_NaN();
  double curvature = std::numeric_limits<double>::quiet_NaN();
  double skew = std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  bool valid = false;
};

struct SmileSlice {
  int maturity_days = 0;
  double atm_price = std::numeric_limits<double>::quiet_NaN();
  double atm_vol = std::numeric_limits<double>::quiet_NaN();
  bool atm_valid = false;
  bool regularized = false;
  std::vector<SmileCell> cells;
  SmileMetrics metrics;

  const SmileCell* cell(double moneyness) const {
    for (const SmileCell& c : cells)
      if (std::abs(c.moneyness - moneyness) < 1e-9) return &c;
    return nullptr;
  }
};

struct SmileSurface {
  std::size_t date = 0;  // index into the caller's date axis
  std::string label;
  std::vector<SmileSlice> slices;

  const SmileSlice* slice(int maturity_days) const {
    for (const SmileSlice& s : slices)
      if (s.maturity_days == maturity_days) return &s;
    return nullptr;
  }
};

inline SmileMetrics smile_metrics(const SmileSlice& slice) {
  SmileMetrics m;
  std::vector<const SmileCell*> pts;
  for (const SmileCell& c : slice.cells)
    if (c.valid && std::abs(c.moneyness) <= 1.0 + 1e-12) pts.push_back(&c);
  m.used = pts.size();
  if (pts.size() < 3) return m;
  Eigen::MatrixXd design(pts.size(), 3);
  Eigen::VectorXd iv(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = pts[i]->moneyness;
    design(i, 2) = pts[i]->moneyness * pts[i]->moneyness;
    iv(i) = pts[i]->implied;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) return m;
  const Eigen::VectorXd c = qr.solve(iv);
  if (!(std::abs(c(0)) > 1e-12)) return m;
  m.atm = c(0);
  m.slope = c(1) / c(0);
  m.curvature = c(2) / c(0);
  m.skew = m.slope / std::sqrt(slice.maturity_days / static_cast<double>(kTradingDaysPerYear));
  m.valid = true;
  return m;
}

// paths: price snippets sharing spot 100 at day 0, length >= max(maturities)+1.
inline SmileSurface smile_from_ensemble(const std::vector<rvec>& paths, const rvec& weights,
                                        const std::vector<int>& maturities,
                                        const std::vector<double>& moneyness,
                                        const HmcOptions& opt = {}) {
  if (maturities.empty()) throw std::invalid_argument("smile_from_ensemble: no maturities");
  SmileSurface surface;
  for (int t_days : maturities) {
    SmileSlice slice;
    slice.maturity_days = t_days;
    const double years = t_days / static_cast<double>(kTradingDaysPerYear);
    const HmcResult atm = hmc_price(paths, weights, t_days, 100.0, OptionType::call, opt);
    slice.atm_price = atm.price;
    slice.regularized = atm.regularized;
    try {
      slice.atm_vol = implied_vol(atm.price, 100.0, 100.0, years);
      slice.atm_valid = slice.atm_vol > 0.0;
    } catch (const std::exception&) {
      slice.atm_valid = false;
    }
    if (slice.atm_valid) {
      for (double mness : moneyness) {
        SmileCell cell;
        cell.moneyness = mness;
        cell.strike = 100.0 * std::exp(mness * slice.atm_vol * std::sqrt(years));
        if (mness == 0.0) {
          cell.price = atm.price;
          cell.implied = slice.atm_vol;
          cell.valid = true;
        } else {
          const HmcResult res =
              hmc_price(paths, weights, t_days, cell.strike, OptionType::call, opt);
          cell.price = res.price;
          slice.regularized = slice.regularized || res.regularized;
          try {
            cell.implied = implied_vol(res.price, 100.0, cell.strike, years);
            cell.valid = true;
          } catch (const std::exception&) {
            cell.valid = false;
          }
        }
        slice.cells.push_back(cell);
      }
      slice.metrics = smile_metrics(slice);
    }
    surface.slices.push_back(std::move(slice));
  }
  return surface;
}

// Converts shadow futures into price snippets with spot 100 at the anchor day.
inline std::vector<rvec> shadow_price_snippets(const ShadowSet& shadows) {
  std::vector<rvec> snippets(shadows.entries.size());
  for (std::size_t k = 0; k < shadows.entries.size(); ++k) {
    const rvec& fut = shadows.entries[k].future;
    rvec s(fut.size() + 1);
    s[0] = 100.0;
    for (std::size_t u = 0; u < fut.size(); ++u) s[u + 1] = 100.0 * std::exp(fut[u]);
    snippets[k] = std::move(s);
  }
  return snippets;
}

// Conditional smile at the end of `past`: shadow paths supply the ensemble,
// shadow weights carry the conditioning.
inline SmileSurface ps_hmc_smile(const PathDataset& dataset, std::span<const double> past,
                                 const std::vector<int>& maturities,
                                 const std::vector<double>& moneyness,
                                 const EmbeddingConfig& embed_config, std::size_t k,
                                 const ScanOptions& scan_options = {},
                                 const HmcOptions& hmc_options = {}) {
  for (int t_days : maturities)
    if (t_days < 1 || t_days > scan_options.future_length)
      throw std::invalid_argument("ps_hmc_smile: maturity outside the scanned future window");
  const ShadowSet shadows = scan(dataset, embed(past, embed_config), k, embed_config, scan_options);
  const std::vector<rvec> snippets = shadow_price_snippets(shadows);
  return smile_from_ensemble(snippets, shadows.weights, maturities, moneyness, hmc_options);
}

// Unconditional smile of a log-price path: every daily-start snippet enters
// with equal weight.
inline SmileSurface average_smile(std::span<const double> x, const std::vector<int>& maturities,
                                  const std::vector<double>& moneyness,
                                  std::size_t snippet_length = 150,
                                  const HmcOptions& hmc_options = {}) {
  if (x.size() <= snippet_length)
    throw std::invalid_argument("average_smile: path shorter than the snippet length");
  const std::size_t count = x.size() - snippet_length;
  std::vector<rvec> snippets(count);
  for (std::size_t o = 0; o < count; ++o) {
    rvec s(snippet_length + 1);
    for (std::size_t u = 0; u <= snippet_length; ++u) s[u] = 100.0 * std::exp(x[o + u] - x[o]);
    snippets[o] = std::move(s);
  }
  const rvec weights(count, 1.0);
  return smile_from_ensemble(snippets, weights, maturities, moneyness, hmc_options);
}

// Unconditional smile pooled over every daily-start snippet of every dataset
// path, all with equal weight.
inline SmileSurface average_smile(const PathDataset& dataset, const std::vector<int>& maturities,
                                  const std::vector<double>& moneyness,
                                  std::size_t snippet_length = 150,
                                  const HmcOptions& hmc_options = {}) {
  std::vector<rvec> snippets;
  for (const rvec& x : dataset.paths) {
    if (x.size() <= snippet_length) continue;
    for (std::size_t o = 0; o + snippet_length < x.size(); ++o) {
      rvec s(snippet_length + 1);
      for (std::size_t u = 0; u <= snippet_length; ++u) s[u] = 100.0 * std::exp(x[o + u] - x[o]);
      snippets.push_back(std::move(s));
    }
  }
  if (snippets.empty())
    throw std::invalid_argument("average_smile: no dataset path covers the snippet length");
  const rvec weights(snippets.size(), 1.0);
  return smile_from_ensemble(snippets, weights, maturities, moneyness, hmc_options);
}

// Linear interpolation of implied vol in log-strike over the slice's valid
// cells; nullopt outside the covered range.
inline std::optional<double> interpolate_iv(const SmileSlice& slice, double strike) {
  std::vector<std::pair<double, double>> pts;
  for (const SmileCell& c : slice.cells)
    if (c.valid) pts.emplace_back(std::log(c.strike), c.implied);
  std::sort(pts.begin(), pts.end());
  if (pts.empty()) return std::nullopt;
  const double lk = std::log(strike);
  if (lk < pts.front().first - 1e-12 || lk > pts.back().first + 1e-12) return std::nullopt;
  if (pts.size() == 1)
    return std::abs(lk - pts.front().first) <= 1e-12 ? std::optional<double>(pts.front().second)
                                                     : std::nullopt;
  auto hi = std::lower_bound(pts.begin(), pts.end(), std::make_pair(lk, -1e300));
  if (hi == pts.begin()) ++hi;
  if (hi == pts.end()) --hi;
  auto lo = hi - 1;
  const double span = hi->first - lo->first;
  if (span <= 0.0) return lo->second;
  const double frac = std::clamp((lk - lo->first) / span, 0.0, 1.0);
  return lo->second + frac * (hi->second - lo->second);
}

struct SkewStickiness {
  int maturity_days = 0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  std::size_t pairs = 0;
};

// Regresses day-over-day ATM vol moves on -skew * (log-price move) for one
// maturity. surfaces[i] must correspond to the date of returns[i]; returns[i]
// is x(date i+1) - x(date i).
inline SkewStickiness skew_stickiness(const std::vector<SmileSurface>& surfaces,
                                      const rvec& returns, int maturity_days,
                                      std::size_t min_pairs = 30) {
  if (surfaces.size() < 2 || returns.size() + 1 < surfaces.size())
    throw std::invalid_argument("skew_stickiness: need consecutive dated surfaces with returns");
  std::vector<double> u, y;
  for (std::size_t i = 0; i + 1 < surfaces.size(); ++i) {
    const SmileSlice* a = surfaces[i].slice(maturity_days);
    const SmileSlice* b = surfaces[i + 1].slice(maturity_days);
    if (a == nullptr || b == nullptr) continue;
    if (!a->atm_valid || !b->atm_valid || !a->metrics.valid) continue;
    u.push_back(-a->metrics.skew * returns[i]);
    y.push_back(b->atm_vol - a->atm_vol);
  }
  if (u.size() < min_pairs)
    throw std::invalid_argument("skew_stickiness: fewer usable date pairs than required");
  const double n = static_cast<double>(u.size());
  double su = 0.0, sy = 0.0, suu = 0.0, suy = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    su += u[i];
    sy += y[i];
    suu += u[i] * u[i];
    suy += u[i] * y[i];
  }
  const double var = suu - su * su / n;
  if (!(var > 1e-30)) throw std::invalid_argument("skew_stickiness: degenerate regressor");
  SkewStickiness out;
  out.maturity_days = maturity_days;
  out.ratio = (suy - su * sy / n) / var;
  out.intercept = (sy - out.ratio * su) / n;
  out.pairs = u.size();
  return out;
}

}  // namespace psmc
