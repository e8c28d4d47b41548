#pragma once

// Exact k-nearest-window scan over a path dataset plus the Nadaraya-Watson
// estimator over the selected futures. The scan shards the dataset across
// threads with per-shard top-k heaps; the (distance, path id, offset)
// tie-break makes the merged result identical to a sequential exhaustive
// scan regardless of thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "psmc/dataset.hpp"
#include "psmc/embedding.hpp"
#include "psmc/parallel.hpp"

namespace psmc {

struct ShadowEntry {
  std::size_t path_id = 0;
  std::size_t offset = 0;  // start of the window's past segment
  double distance = 0.0;
  // Future log-prices relative to the window anchor (the last past sample):
  // future[i] = x(anchor + 1 + i) - x(anchor), i = 0..F-1. Anchored
  // differences make every future functional translation invariant.
  rvec future;
};

struct ShadowSet {
  std::vector<ShadowEntry> entries;  // distance-sorted, ties by (path id, offset)
  rvec weights;                      // Gaussian in distance, (1/k) sum = 1
  double eta = 0.0;
};

struct ScanOptions {
  std::size_t stride = 1;
  unsigned threads = 0;
  int past_length = 126;
  int future_length = 150;
};

inline ShadowSet scan(const PathDataset& dataset, const EmbeddedPast& query, std::size_t k,
                      const EmbeddingConfig& config, const ScanOptions& options = {}) {
  config.validate();
  if (k < 1) throw std::invalid_argument("scan: k must be >= 1");
  if (dataset.count() == 0) throw std::invalid_argument("scan: empty dataset");
  if (options.stride < 1) throw std::invalid_argument("scan: stride must be >= 1");
  if (options.past_length < config.horizon)
    throw std::invalid_argument("scan: window past length shorter than embedding horizon");
  const auto lag_list = config.lags();
  // the anchor sits at the end of the past segment, so the longest lag must
  // leave room for one more sample before it
  if (options.past_length <= lag_list.back())
    throw std::invalid_argument("scan: window past length shorter than the longest lag + 1");

  const std::size_t p_len = static_cast<std::size_t>(options.past_length);
  const std::size_t f_len = static_cast<std::size_t>(options.future_length);
  const std::size_t window = p_len + f_len;
  const std::size_t n = dataset.path_length();
  if (n < window) throw std::invalid_argument("scan: paths shorter than one window");
  const std::size_t offsets_per_path = (n - window) / options.stride + 1;
  const std::size_t total_windows = offsets_per_path * dataset.count();
  if (total_windows < k) throw std::invalid_argument("scan: fewer windows than k");

  if (query.vector.size() != lag_list.size())
    throw std::invalid_argument("scan: query dimension does not match config");
  const double eta = threshold(query, config);

  std::vector<double> lag_weight(lag_list.size());
  for (std::size_t m = 0; m < lag_list.size(); ++m)
    lag_weight[m] = 1.0 / std::pow(lag_list[m], config.beta);

  using Key = std::tuple<double, std::size_t, std::size_t>;  // (d^2, path, offset)
  const unsigned threads = effective_threads(options.threads);

  // Shard over paths; each shard keeps its own top-k max-heap.
  std::vector<std::vector<Key>> heaps_out(threads);
  parallel_chunks(dataset.count(), threads, [&](std::size_t chunk, std::size_t begin,
                                                std::size_t end) {
    std::priority_queue<Key> heap;  // max-heap: top is the current worst
    for (std::size_t pid = begin; pid < end; ++pid) {
      const rvec& path = dataset.paths[pid];
      for (std::size_t off = 0; off + window <= n; off += options.stride) {
        const std::size_t anchor = off + p_len - 1;
        const double x_t = path[anchor];
        double d2 = 0.0;
        if (heap.size() == k) {
          const double bound = std::get<0>(heap.top());
          bool abandoned = false;
          for (std::size_t m = 0; m < lag_list.size(); ++m) {
            const double diff =
                (x_t - path[anchor - static_cast<std::size_t>(lag_list[m])]) * lag_weight[m] -
                query.vector[m];
            d2 += diff * diff;
            if (d2 > bound) {
              abandoned = true;
              break;
            }
          }
          if (abandoned) continue;
          if (Key{d2, pid, off} < heap.top()) {
            heap.pop();
            heap.emplace(d2, pid, off);
          }
        } else {
          for (std::size_t m = 0; m < lag_list.size(); ++m) {
            const double diff =
                (x_t - path[anchor - static_cast<std::size_t>(lag_list[m])]) * lag_weight[m] -
                query.vector[m];
            d2 += diff * diff;
          }
          heap.emplace(d2, pid, off);
        }
      }
    }
    auto& out = heaps_out[chunk];
    out.reserve(heap.size());
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
  });

  std::vector<Key> merged;
  for (auto& h : heaps_out) merged.insert(merged.end(), h.begin(), h.end());
  std::sort(merged.begin(), merged.end());
  merged.resize(k);

  ShadowSet shadow;
  shadow.eta = eta;
  shadow.entries.resize(k);
  shadow.weights.assign(k, 0.0);
  const double d2_min = std::get<0>(merged.front());
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto [d2, pid, off] = merged[i];
    ShadowEntry& entry = shadow.entries[i];
    entry.path_id = pid;
    entry.offset = off;
    entry.distance = std::sqrt(d2);
    const rvec& path = dataset.paths[pid];
    const std::size_t anchor = off + p_len - 1;
    entry.future.resize(f_len);
    for (std::size_t u = 0; u < f_len; ++u) entry.future[u] = path[anchor + 1 + u] - path[anchor];
    // Shifted by the closest distance so the exponentials cannot all
    // underflow; the shift cancels in the normalization.
    shadow.weights[i] = std::exp(-(d2 - d2_min) / (2.0 * eta * eta));
    weight_sum += shadow.weights[i];
  }
  const double scale = static_cast<double>(k) / weight_sum;
  for (auto& w : shadow.weights) w *= scale;
  return shadow;
}

// Nadaraya-Watson estimate (1/k) sum_k w_k q(future_k).
inline double estimate(const ShadowSet& shadow,
                       const std::function<double(std::span<const double>)>& q) {
  if (shadow.entries.empty()) throw std::invalid_argument("estimate: empty shadow set");
  double s = 0.0;
  for (std::size_t i = 0; i < shadow.entries.size(); ++i)
    s += shadow.weights[i] * q(shadow.entries[i].future);
  return s / static_cast<double>(shadow.entries.size());
}

struct WeightedDistribution {
  // Sorted by value; weights carried along.
  std::vector<std::pair<double, double>> samples;  // (value, weight)
  double total_weight = 0.0;

  // Lower weighted quantile: smallest value whose cumulative weight reaches
  // p * total.
  double quantile(double p) const {
    if (samples.empty()) throw std::logic_error("quantile of empty distribution");
    if (p <= 0.0) return samples.front().first;
    const double target = p * total_weight;
    double cum = 0.0;
    for (const auto& [v, w] : samples) {
      cum += w;
      if (cum >= target) return v;
    }
    return samples.back().first;
  }
};

inline WeightedDistribution predict_distribution(
    const ShadowSet& shadow, const std::function<double(std::span<const double>)>& q) {
  if (shadow.entries.empty())
    throw std::invalid_argument("predict_distribution: empty shadow set");
  WeightedDistribution dist;
  dist.samples.reserve(shadow.entries.size());
  for (std::size_t i = 0; i < shadow.entries.size(); ++i)
    dist.samples.emplace_back(q(shadow.entries[i].future), shadow.weights[i]);
  std::sort(dist.samples.begin(), dist.samples.end());
  for (const auto& [v, w] : dist.samples) dist.total_weight += w;
  return dist;
}

}  // namespace psmc
