#pragma once

// Systematic option trading between a model surface and a counterparty
// (market) surface.
//
// At each date, maturity and moneyness cell the trader buys one unit when the
// counterparty's implied vol is strictly below the model's and sells when it
// is strictly above. Volume is 100/S_t, so all cash flows are computed in the
// rescaled frame where the spot is 100 at trade inception; the numbers
// reported per trade already include that volume factor. Hedged P&L adds
// daily Black-Scholes delta rebalancing at a fixed hedge vol.

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "psmc/black_scholes.hpp"
#include "psmc/forecast.hpp"
#include "psmc/smile.hpp"

namespace psmc {

// +1 buy, -1 sell, 0 stand aside (equal vols).
inline int trade_signal(double market_vol, double model_vol) {
  if (!std::isfinite(market_vol) || !std::isfinite(model_vol) || market_vol < 0.0 ||
      model_vol < 0.0)
    throw std::invalid_argument("trade_signal: vols must be finite and nonnegative");
  if (market_vol < model_vol) return 1;
  if (market_vol > model_vol) return -1;
  return 0;
}

struct TradePnl {
  double unhedged = 0.0;
  double hedged = 0.0;
};

// spots: rescaled price path, spots[0] = 100 at inception, spots[T] at expiry.
inline TradePnl trade_pnl(int sign, double strike, double market_price,
                          std::span<const double> spots, double hedge_vol) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("trade_pnl: sign must be +1 or -1");
  if (spots.size() < 2) throw std::invalid_argument("trade_pnl: need at least inception and expiry");
  const std::size_t t_days = spots.size() - 1;
  const double payoff = std::max(spots[t_days] - strike, 0.0);
  TradePnl pnl;
  pnl.unhedged = sign * (payoff - market_price);
  double hedge_flow = 0.0;
  for (std::size_t u = 0; u < t_days; ++u) {
    const double tau = (t_days - u) / static_cast<double>(kTradingDaysPerYear);
    const double delta = bs_delta(spots[u], strike, tau, hedge_vol);
    hedge_flow += (-sign * delta) * (spots[u + 1] - spots[u]);
  }
  pnl.hedged = pnl.unhedged + hedge_flow;
  return pnl;
}

struct LedgerTrade {
  std::size_t date = 0;
  int maturity_days = 0;
  double moneyness = 0.0;
  int sign = 0;
  double strike = 0.0;
  double volume = 0.0;  // 100 / S_date in the original frame
  double model_vol = 0.0;
  double market_vol = 0.0;
  double market_price = 0.0;
  TradePnl pnl;
};

struct PnlLedger {
  std::vector<LedgerTrade> trades;
  std::size_t no_trade = 0;  // cells where both vols agreed
  std::size_t skipped = 0;   // cells missing a quote, a valid cell, or price history
};

struct PnlAggregate {
  std::size_t count = 0;
  double mean_unhedged = 0.0;
  double mean_hedged = 0.0;
  double sd_unhedged = 0.0;
  double sd_hedged = 0.0;
  double win_rate = 0.0;  // fraction of trades with positive hedged P&L
};

namespace detail {

inline PnlAggregate finish_aggregate(const std::vector<const LedgerTrade*>& trades) {
  PnlAggregate agg;
  agg.count = trades.size();
  if (trades.empty()) return agg;
  double su = 0.0, sh = 0.0;
  std::size_t wins = 0;
  for (const LedgerTrade* t : trades) {
    su += t->pnl.unhedged;
    sh += t->pnl.hedged;
    if (t->pnl.hedged > 0.0) ++wins;
  }
  const double n = static_cast<double>(trades.size());
  agg.mean_unhedged = su / n;
  agg.mean_hedged = sh / n;
  if (trades.size() > 1) {
    double vu = 0.0, vh = 0.0;
    for (const LedgerTrade* t : trades) {
      vu += (t->pnl.unhedged - agg.mean_unhedged) * (t->pnl.unhedged - agg.mean_unhedged);
      vh += (t->pnl.hedged - agg.mean_hedged) * (t->pnl.hedged - agg.mean_hedged);
    }
    agg.sd_unhedged = std::sqrt(vu / (n - 1.0));
    agg.sd_hedged = std::sqrt(vh / (n - 1.0));
  }
  agg.win_rate = static_cast<double>(wins) / n;
  return agg;
}

}  // namespace detail

inline PnlAggregate aggregate_overall(const PnlLedger& ledger) {
  std::vector<const LedgerTrade*> all;
  all.reserve(ledger.trades.size());
  for (const LedgerTrade& t : ledger.trades) all.push_back(&t);
  return detail::finish_aggregate(all);
}

// Buckets trades by (date period, maturity, moneyness). period_days = 756
// groups roughly three trading years per bucket.
using AggregateKey = std::tuple<std::size_t, int, double>;

inline std::map<AggregateKey, PnlAggregate> aggregate_ledger(const PnlLedger& ledger,
                                                             std::size_t period_days = 756) {
  if (period_days == 0) throw std::invalid_argument("aggregate_ledger: period_days must be > 0");
  std::map<AggregateKey, std::vector<const LedgerTrade*>> buckets;
  for (const LedgerTrade& t : ledger.trades)
    buckets[{t.date / period_days, t.maturity_days, t.moneyness}].push_back(&t);
  std::map<AggregateKey, PnlAggregate> out;
  for (const auto& [key, trades] : buckets) out[key] = detail::finish_aggregate(trades);
  return out;
}

// Running sum of hedged P&L, one point per distinct trade date.
inline std::vector<std::pair<std::size_t, double>> cumulative_hedged(const PnlLedger& ledger) {
  std::map<std::size_t, double> by_date;
  for (const LedgerTrade& t : ledger.trades) by_date[t.date] += t.pnl.hedged;
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(by_date.size());
  double acc = 0.0;
  for (const auto& [date, pnl] : by_date) {
    acc += pnl;
    out.emplace_back(date, acc);
  }
  return out;
}

struct GameOptions {
  double hedge_vol = 0.2;
  bool anchor_on_counterparty = false;  // default: strikes from the model's ATM vol
  std::size_t period_days = 756;
};

// x: log-price path for the underlying; surface dates index into it. Each
// model surface is matched with the counterparty surface of the same date.
// Transactions use the counterparty's price at the cell's strike.
inline PnlLedger run_game(const std::vector<SmileSurface>& model,
                          const std::vector<SmileSurface>& counterparty,
                          std::span<const double> x, const std::vector<int>& maturities,
                          const std::vector<double>& moneyness, const GameOptions& opt = {}) {
  std::map<std::size_t, const SmileSurface*> market;
  for (const SmileSurface& s : counterparty) market[s.date] = &s;
  PnlLedger ledger;
  for (const SmileSurface& surface : model) {
    const std::size_t date = surface.date;
    const auto it = market.find(date);
    if (it == market.end() || date >= x.size()) {
      ledger.skipped += maturities.size() * moneyness.size();
      continue;
    }
    const SmileSurface& quotes = *it->second;
    for (int t_days : maturities) {
      const SmileSlice* own = surface.slice(t_days);
      const SmileSlice* mkt = quotes.slice(t_days);
      const bool history = date + static_cast<std::size_t>(t_days) < x.size();
      if (own == nullptr || mkt == nullptr || !own->atm_valid || !history) {
        ledger.skipped += moneyness.size();
        continue;
      }
      const double years = t_days / static_cast<double>(kTradingDaysPerYear);
      double anchor_vol = own->atm_vol;
      if (opt.anchor_on_counterparty) {
        if (!mkt->atm_valid) {
          ledger.skipped += moneyness.size();
          continue;
        }
        anchor_vol = mkt->atm_vol;
      }
      for (double mness : moneyness) {
        const SmileCell* cell = own->cell(mness);
        if (cell == nullptr || !cell->valid) {
          ++ledger.skipped;
          continue;
        }
        const double strike = 100.0 * std::exp(mness * anchor_vol * std::sqrt(years));
        const std::optional<double> quote = interpolate_iv(*mkt, strike);
        if (!quote.has_value()) {
          ++ledger.skipped;
          continue;
        }
        const int sign = trade_signal(*quote, cell->implied);
        if (sign == 0) {
          ++ledger.no_trade;
          continue;
        }
        LedgerTrade trade;
        trade.date = date;
        trade.maturity_days = t_days;
        trade.moneyness = mness;
        trade.sign = sign;
        trade.strike = strike;
        trade.volume = 100.0 * std::exp(-x[date]);
        trade.model_vol = cell->implied;
        trade.market_vol = *quote;
        trade.market_price = bs_price(100.0, strike, years, *quote);
        rvec spots(static_cast<std::size_t>(t_days) + 1);
        for (std::size_t u = 0; u < spots.size(); ++u)
          spots[u] = 100.0 * std::exp(x[date + u] - x[date]);
        trade.pnl = trade_pnl(sign, strike, trade.market_price, spots, opt.hedge_vol);
        ledger.trades.push_back(std::move(trade));
      }
    }
  }
  return ledger;
}

// Two models trade against each other at B's prices. B's ledger is the exact
// negation of A's, trade by trade.
inline std::pair<PnlLedger, PnlLedger> model_vs_model_game(
    const std::vector<SmileSurface>& model_a, const std::vector<SmileSurface>& model_b,
    std::span<const double> x, const std::vector<int>& maturities,
    const std::vector<double>& moneyness, const GameOptions& opt = {}) {
  PnlLedger ledger_a = run_game(model_a, model_b, x, maturities, moneyness, opt);
  PnlLedger ledger_b;
  ledger_b.no_trade = ledger_a.no_trade;
  ledger_b.skipped = ledger_a.skipped;
  ledger_b.trades.reserve(ledger_a.trades.size());
  for (const LedgerTrade& t : ledger_a.trades) {
    LedgerTrade mirror = t;
    mirror.sign = -t.sign;
    std::swap(mirror.model_vol, mirror.market_vol);
    rvec spots(static_cast<std::size_t>(t.maturity_days) + 1);
    for (std::size_t u = 0; u < spots.size(); ++u)
      spots[u] = 100.0 * std::exp(x[t.date + u] - x[t.date]);
    mirror.pnl = trade_pnl(mirror.sign, t.strike, t.market_price, spots, opt.hedge_vol);
    ledger_b.trades.push_back(std::move(mirror));
  }
  return {std::move(ledger_a), std::move(ledger_b)};
}

}  // namespace psmc
