#pragma once

// Run configuration: one JSON document covering every pipeline stage, with
// defaults matching the reference parameter set.

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psmc/embedding.hpp"
#include "psmc/pdv.hpp"
#include "psmc/shadow.hpp"
#include "psmc/synthesis.hpp"
#include "psmc/trading.hpp"

namespace psmc {

struct RunConfig {
  std::uint64_t seed = 0;
  int num_scales = 0;  // 0 picks the default for the synthesis length
  std::size_t path_length = 1024;
  std::size_t path_count = 64;
  SynthesisConfig synthesis;
  EmbeddingConfig embedding;
  std::size_t neighbors = 1000;
  ScanOptions scan;
  std::vector<int> horizons = {7, 25, 50, 126};
  std::vector<int> maturities = {8, 25, 50, 75, 150};
  std::vector<double> moneyness = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
  PdvKernels pdv_kernels = PdvKernels::illustrative();
  PdvBetas pdv_betas{0.050, -0.13, 0.56};
  GameOptions game;

  void validate() const {
    synthesis.validate();
    embedding.validate();
    pdv_kernels.validate();
    if (path_length < 4 || !is_power_of_two(path_length))
      throw std::invalid_argument("config: path_length must be a power of two >= 4");
    if (path_count == 0) throw std::invalid_argument("config: path_count must be positive");
    if (neighbors == 0) throw std::invalid_argument("config: neighbors must be positive");
    if (scan.stride == 0) throw std::invalid_argument("config: stride must be positive");
    if (scan.past_length < embedding.horizon)
      throw std::invalid_argument("config: past_length must cover the embedding horizon");
    if (scan.past_length <= embedding.lags().back())
      throw std::invalid_argument("config: past_length must exceed the longest embedding lag");
    if (horizons.empty()) throw std::invalid_argument("config: need at least one horizon");
    for (int t : horizons)
      if (t < 1 || t > scan.future_length)
        throw std::invalid_argument("config: horizon outside the scanned future window");
    for (int t : maturities)
      if (t < 1 || t > scan.future_length)
        throw std::invalid_argument("config: maturity outside the scanned future window");
    if (!(game.hedge_vol >= 0.0)) throw std::invalid_argument("config: hedge_vol must be >= 0");
    if (game.period_days == 0) throw std::invalid_argument("config: period_days must be positive");
  }
};

namespace detail {

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        ok = true;
        break;
      }
    if (!ok) throw std::invalid_argument("config: unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline std::vector<PdvKernels::Exponential> kernel_from_json(const nlohmann::json& j) {
  std::vector<PdvKernels::Exponential> terms;
  for (const auto& term : j) {
    check_keys(term, {"weight", "tau"}, "pdv kernel term");
    terms.push_back({term.at("weight").get<double>(), term.at("tau").get<double>()});
  }
  return terms;
}

inline nlohmann::json kernel_to_json(const std::vector<PdvKernels::Exponential>& terms) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : terms) arr.push_back({{"weight", t.weight}, {"tau", t.tau}});
  return arr;
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  detail::check_keys(j,
                     {"seed", "num_scales", "path_length", "path_count", "synthesis", "embedding",
                      "neighbors", "scan", "horizons", "maturities", "moneyness", "pdv", "game"},
                     "config root");
  RunConfig c;
  detail::maybe(j, "seed", c.seed);
  detail::maybe(j, "num_scales", c.num_scales);
  detail::maybe(j, "path_length", c.path_length);
  detail::maybe(j, "path_count", c.path_count);
  if (j.contains("synthesis")) {
    const auto& s = j.at("synthesis");
    detail::check_keys(s, {"epsilon_rel", "max_iterations", "lbfgs_memory", "modulus_smoothing"},
                       "synthesis");
    detail::maybe(s, "epsilon_rel", c.synthesis.epsilon_rel);
    detail::maybe(s, "max_iterations", c.synthesis.max_iterations);
    detail::maybe(s, "lbfgs_memory", c.synthesis.lbfgs_memory);
    detail::maybe(s, "modulus_smoothing", c.synthesis.modulus_smoothing);
  }
  if (j.contains("embedding")) {
    const auto& e = j.at("embedding");
    detail::check_keys(e, {"alpha", "beta", "eta_hat", "horizon"}, "embedding");
    detail::maybe(e, "alpha", c.embedding.alpha);
    detail::maybe(e, "beta", c.embedding.beta);
    detail::maybe(e, "eta_hat", c.embedding.eta_hat);
    detail::maybe(e, "horizon", c.embedding.horizon);
  }
  detail::maybe(j, "neighbors", c.neighbors);
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    detail::check_keys(s, {"stride", "past_length", "future_length"}, "scan");
    detail::maybe(s, "stride", c.scan.stride);
    detail::maybe(s, "past_length", c.scan.past_length);
    detail::maybe(s, "future_length", c.scan.future_length);
  }
  detail::maybe(j, "horizons", c.horizons);
  detail::maybe(j, "maturities", c.maturities);
  detail::maybe(j, "moneyness", c.moneyness);
  if (j.contains("pdv")) {
    const auto& p = j.at("pdv");
    detail::check_keys(p, {"kernel1", "kernel2", "betas"}, "pdv");
    if (p.contains("kernel1")) c.pdv_kernels.k1 = detail::kernel_from_json(p.at("kernel1"));
    if (p.contains("kernel2")) c.pdv_kernels.k2 = detail::kernel_from_json(p.at("kernel2"));
    if (p.contains("betas")) {
      const auto& b = p.at("betas");
      if (!b.is_array() || b.size() != 3)
        throw std::invalid_argument("config: pdv betas must be a 3-array");
      c.pdv_betas = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>()};
    }
  }
  if (j.contains("game")) {
    const auto& g = j.at("game");
    detail::check_keys(g, {"hedge_vol", "anchor_on_counterparty", "period_days"}, "game");
    detail::maybe(g, "hedge_vol", c.game.hedge_vol);
    detail::maybe(g, "anchor_on_counterparty", c.game.anchor_on_counterparty);
    detail::maybe(g, "period_days", c.game.period_days);
  }
  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["num_scales"] = c.num_scales;
  j["path_length"] = c.path_length;
  j["path_count"] = c.path_count;
  j["synthesis"] = {{"epsilon_rel", c.synthesis.epsilon_rel},
                    {"max_iterations", c.synthesis.max_iterations},
                    {"lbfgs_memory", c.synthesis.lbfgs_memory},
                    {"modulus_smoothing", c.synthesis.modulus_smoothing}};
  j["embedding"] = {{"alpha", c.embedding.alpha},
                    {"beta", c.embedding.beta},
                    {"eta_hat", c.embedding.eta_hat},
                    {"horizon", c.embedding.horizon}};
  j["neighbors"] = c.neighbors;
  j["scan"] = {{"stride", c.scan.stride},
               {"past_length", c.scan.past_length},
               {"future_length", c.scan.future_length}};
  j["horizons"] = c.horizons;
  j["maturities"] = c.maturities;
  j["moneyness"] = c.moneyness;
  j["pdv"] = {{"kernel1", detail::kernel_to_json(c.pdv_kernels.k1)},
              {"kernel2", detail::kernel_to_json(c.pdv_kernels.k2)},
              {"betas", nlohmann::json::array({c.pdv_betas.beta0, c.pdv_betas.beta1, c.pdv_betas.beta2})}};
  j["game"] = {{"hedge_vol", c.game.hedge_vol},
               {"anchor_on_counterparty", c.game.anchor_on_counterparty},
               {"period_days", c.game.period_days}};
  return j;
}

inline RunConfig load_config(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("load_config: cannot open " + filename);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

}  // namespace psmc
