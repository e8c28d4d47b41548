#pragma once

// Multi-scale past embedding: power-law-weighted increments at geometrically
// spaced lags, truncated at a horizon. Duplicated lags produced by the floor
// are kept on purpose (they up-weight short lags), and the threshold used
// for shadow weights is relative to the query's own norm.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace psmc {

struct EmbeddingConfig {
  double alpha = 1.15;
  double beta = 0.9;
  double eta_hat = 0.075;
  int horizon = 126;

  void validate() const {
    if (!(alpha > 1.0)) throw std::invalid_argument("embedding: alpha must be > 1");
    if (!(beta >= 0.0)) throw std::invalid_argument("embedding: beta must be >= 0");
    if (!(eta_hat > 0.0)) throw std::invalid_argument("embedding: eta_hat must be > 0");
    if (horizon < 1) throw std::invalid_argument("embedding: horizon must be >= 1");
  }

  // Lags floor(alpha^m), m = 1, 2, ..., while they stay within the horizon.
  // Duplicates are kept.
  std::vector<int> lags() const {
    validate();
    std::vector<int> out;
    for (int m = 1;; ++m) {
      const double p = std::pow(alpha, static_cast<double>(m));
      if (p > 1e9) break;
      const int lag = static_cast<int>(std::floor(p));
      if (lag > horizon) break;
      if (lag >= 1) out.push_back(lag);
    }
    return out;
  }

  int dimension() const { return static_cast<int>(lags().size()); }
};

struct EmbeddedPast {
  std::vector<double> vector;
  double norm = 0.0;
};

// Embeds the past ending at the last sample of `past`. Component m is
// (x(t) - x(t - lag_m)) / lag_m^beta.
inline EmbeddedPast embed(std::span<const double> past, const EmbeddingConfig& config) {
  const auto lag_list = config.lags();
  const std::size_t need = lag_list.empty() ? 1 : static_cast<std::size_t>(lag_list.back()) + 1;
  if (past.size() < need || past.size() < static_cast<std::size_t>(config.horizon))
    throw std::invalid_argument("embed: past shorter than the embedding horizon");
  EmbeddedPast out;
  out.vector.resize(lag_list.size());
  const std::size_t t = past.size() - 1;
  double sq = 0.0;
  for (std::size_t m = 0; m < lag_list.size(); ++m) {
    const int lag = lag_list[m];
    const double v =
        (past[t] - past[t - static_cast<std::size_t>(lag)]) / std::pow(lag, config.beta);
    out.vector[m] = v;
    sq += v * v;
  }
  out.norm = std::sqrt(sq);
  return out;
}

inline double shadow_distance(const EmbeddedPast& a, const EmbeddedPast& b) {
  if (a.vector.size() != b.vector.size())
    throw std::invalid_argument("shadow_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.vector.size(); ++i) {
    const double d = a.vector[i] - b.vector[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double threshold(const EmbeddedPast& query, const EmbeddingConfig& config) {
  config.validate();
  if (!(query.norm > 0.0))
    throw std::domain_error("threshold: constant past has zero-norm embedding");
  return config.eta_hat * query.norm;
}

}  // namespace psmc
