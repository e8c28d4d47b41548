#pragma once

// Realized-variance prediction by path shadowing, with the trailing-window
// benchmark and R² scoring. One scan serves every horizon for a given date.

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "psmc/embedding.hpp"
#include "psmc/shadow.hpp"

namespace psmc {

inline constexpr double kTradingDaysPerYear = 252.0;

// Annualized realized variance over (t, t+T]: (252/T) sum (delta x)^2.
inline double realized_variance(std::span<const double> x, std::size_t t, int horizon) {
  if (horizon < 1) throw std::invalid_argument("realized_variance: horizon must be >= 1");
  if (t + static_cast<std::size_t>(horizon) >= x.size())
    throw std::out_of_range("realized_variance: window extends past the data");
  double s = 0.0;
  for (std::size_t u = t + 1; u <= t + static_cast<std::size_t>(horizon); ++u) {
    const double d = x[u] - x[u - 1];
    s += d * d;
  }
  return kTradingDaysPerYear / static_cast<double>(horizon) * s;
}

// Realized variance of an anchored future segment (values relative to the
// anchor), as stored in a ShadowSet entry.
inline double future_realized_variance(std::span<const double> future, int horizon) {
  if (horizon < 1 || future.size() < static_cast<std::size_t>(horizon))
    throw std::invalid_argument("future_realized_variance: horizon exceeds future length");
  double prev = 0.0, s = 0.0;
  for (int u = 0; u < horizon; ++u) {
    const double d = future[static_cast<std::size_t>(u)] - prev;
    prev = future[static_cast<std::size_t>(u)];
    s += d * d;
  }
  return kTradingDaysPerYear / static_cast<double>(horizon) * s;
}

// Realized variance over the T days ending at t.
inline double predict_benchmark(std::span<const double> past, std::size_t t, int horizon) {
  if (horizon < 1) throw std::invalid_argument("predict_benchmark: horizon must be >= 1");
  if (t >= past.size()) throw std::out_of_range("predict_benchmark: date outside path");
  if (t < static_cast<std::size_t>(horizon))
    throw std::out_of_range("predict_benchmark: insufficient history");
  return realized_variance(past, t - static_cast<std::size_t>(horizon), horizon);
}

// One scan, many horizons.
inline std::vector<double> predict_ps_mc_multi(const PathDataset& dataset,
                                               std::span<const double> past,
                                               const std::vector<int>& horizons,
                                               const EmbeddingConfig& config, std::size_t k,
                                               const ScanOptions& options = {}) {
  for (int horizon : horizons)
    if (horizon < 1 || horizon > options.future_length)
      throw std::invalid_argument("predict_ps_mc: horizon outside the future window");
  const EmbeddedPast query = embed(past, config);
  const ShadowSet shadow = scan(dataset, query, k, config, options);
  std::vector<double> out;
  out.reserve(horizons.size());
  for (int horizon : horizons)
    out.push_back(estimate(
        shadow, [horizon](std::span<const double> f) { return future_realized_variance(f, horizon); }));
  return out;
}

inline double predict_ps_mc(const PathDataset& dataset, std::span<const double> past, int horizon,
                            const EmbeddingConfig& config, std::size_t k,
                            const ScanOptions& options = {}) {
  return predict_ps_mc_multi(dataset, past, {horizon}, config, k, options).front();
}

inline double score_r2(std::span<const double> predictions, std::span<const double> realized) {
  if (predictions.size() != realized.size())
    throw std::invalid_argument("score_r2: length mismatch");
  if (predictions.size() < 2) throw std::invalid_argument("score_r2: need at least 2 points");
  double mean = 0.0;
  for (double v : realized) mean += v;
  mean /= static_cast<double>(realized.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < realized.size(); ++i) {
    ss_tot += (realized[i] - mean) * (realized[i] - mean);
    ss_res += (realized[i] - predictions[i]) * (realized[i] - predictions[i]);
  }
  if (!(ss_tot > 0.0)) throw std::domain_error("score_r2: realized series is constant");
  return 1.0 - ss_res / ss_tot;
}

struct CalibrationScore {
  EmbeddingConfig config;
  double mean_r2 = 0.0;
  std::vector<double> r2_per_horizon;
};

struct CalibrationOptions {
  std::size_t num_snippets = 200;
  double holdout_fraction = 0.25;  // paths reserved as snippet source
  std::size_t k = 1000;
  std::uint64_t seed = 1;
  ScanOptions scan;
};

struct CalibrationReport {
  EmbeddingConfig best;
  std::vector<CalibrationScore> scores;
};

// In-model self-prediction grid search: snippets drawn from held-out paths,
// scanned against the remaining paths; the config with the best mean R²
// over the horizons wins (ties keep grid order).
inline CalibrationReport calibrate_embedding(const PathDataset& dataset,
                                             const std::vector<EmbeddingConfig>& grid,
                                             const std::vector<int>& horizons,
                                             const CalibrationOptions& options = {}) {
  if (grid.empty()) throw std::invalid_argument("calibrate_embedding: empty config grid");
  if (horizons.empty()) throw std::invalid_argument("calibrate_embedding: no horizons");
  const std::size_t holdout =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::floor(options.holdout_fraction *
                                              static_cast<double>(dataset.count()))));
  if (holdout >= dataset.count())
    throw std::invalid_argument("calibrate_embedding: dataset too small for a holdout split");

  PathDataset candidates;
  candidates.paths.assign(dataset.paths.begin(),
                          dataset.paths.end() - static_cast<std::ptrdiff_t>(holdout));
  candidates.meta.assign(candidates.paths.size(), PathMeta{});

  const std::size_t p_len = static_cast<std::size_t>(options.scan.past_length);
  const std::size_t window = p_len + static_cast<std::size_t>(options.scan.future_length);
  const std::size_t n = dataset.path_length();
  if (n < window) throw std::invalid_argument("calibrate_embedding: paths shorter than a window");

  // Deterministic snippet draws from the held-out tail paths.
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick_path(dataset.count() - holdout,
                                                       dataset.count() - 1);
  std::uniform_int_distribution<std::size_t> pick_offset(0, n - window);
  struct Snippet {
    std::size_t path_id, offset;
  };
  std::vector<Snippet> snippets(options.num_snippets);
  for (auto& s : snippets) s = {pick_path(rng), pick_offset(rng)};

  CalibrationReport report;
  report.scores.reserve(grid.size());
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& config : grid) {
    CalibrationScore score;
    score.config = config;
    std::vector<std::vector<double>> preds(horizons.size()), reals(horizons.size());
    for (const auto& snippet : snippets) {
      const rvec& path = dataset.paths[snippet.path_id];
      std::span<const double> past(path.data() + snippet.offset, p_len);
      const std::size_t anchor = snippet.offset + p_len - 1;
      const auto p = predict_ps_mc_multi(candidates, past, horizons, config, options.k,
                                         options.scan);
      for (std::size_t h = 0; h < horizons.size(); ++h) {
        preds[h].push_back(p[h]);
        reals[h].push_back(realized_variance(path, anchor, horizons[h]));
      }
    }
    double mean = 0.0;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      const double r2 = score_r2(preds[h], reals[h]);
      score.r2_per_horizon.push_back(r2);
      mean += r2;
    }
    score.mean_r2 = mean / static_cast<double>(horizons.size());
    report.scores.push_back(score);
    if (score.mean_r2 > best_score) {
      best_score = score.mean_r2;
      report.best = config;
    }
  }
  return report;
}

}  // namespace psmc
