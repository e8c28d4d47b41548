#pragma once

// Command-line surface. run_cli is the whole program; the binary in tools/
// just forwards argv so tests can drive every pipeline in-process.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "psmc/config.hpp"
#include "psmc/dataset.hpp"
#include "psmc/forecast.hpp"
#include "psmc/path.hpp"
#include "psmc/pdv.hpp"
#include "psmc/smile.hpp"
#include "psmc/spectra.hpp"
#include "psmc/synthesis.hpp"
#include "psmc/trading.hpp"

namespace psmc {

inline const char* spectrum_kind_name(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::phi1: return "phi1";
    case SpectrumKind::phi2: return "phi2";
    case SpectrumKind::phi3: return "phi3";
    case SpectrumKind::phi4: return "phi4";
    case SpectrumKind::sign_moment: return "sign_moment";
  }
  return "unknown";
}

inline nlohmann::json spectra_to_json(const ScatteringSpectra& spectra) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < spectra.values.size(); ++i) {
    const SpectraDescriptor& d = spectra.index.entries[i];
    nlohmann::json e;
    e["kind"] = spectrum_kind_name(d.kind);
    e["j"] = d.j;
    if (d.kind == SpectrumKind::phi3 || d.kind == SpectrumKind::phi4) e["jp"] = d.jp;
    if (d.kind == SpectrumKind::phi4) e["j2"] = d.j2;
    e["re"] = spectra.values[i].real();
    e["im"] = spectra.values[i].imag();
    entries.push_back(std::move(e));
  }
  nlohmann::json j;
  j["num_scales"] = spectra.index.num_scales;
  j["entries"] = std::move(entries);
  return j;
}

// Target statistics for synthesis: the spectra averaged over the disjoint
// length-N windows of the observed path.
inline ScatteringSpectra average_windowed_spectra(const rvec& x, const FilterBank& bank) {
  const std::size_t n = bank.signal_length;
  if (x.size() < n)
    throw std::invalid_argument("target path is shorter than the synthesis length");
  const std::size_t windows = x.size() / n;
  SpectraEngine engine(bank);
  ScatteringSpectra acc;
  for (std::size_t w = 0; w < windows; ++w) {
    rvec segment(x.begin() + static_cast<std::ptrdiff_t>(w * n),
                 x.begin() + static_cast<std::ptrdiff_t>((w + 1) * n));
    ScatteringSpectra s = engine.compute(segment);
    if (w == 0) {
      acc = std::move(s);
    } else {
      for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += s.values[i];
    }
  }
  for (auto& v : acc.values) v /= static_cast<double>(windows);
  return acc;
}

namespace detail {

inline std::ofstream open_output(const std::string& filename) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open output file " + filename);
  out << std::setprecision(17);
  return out;
}

inline std::size_t resolve_date(const std::string& label,
                                const std::map<std::string, std::size_t>& by_label) {
  const auto it = by_label.find(label);
  if (it == by_label.end()) throw std::runtime_error("smile date not in the price series: " + label);
  return it->second;
}

inline std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = strip(tok);
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty numeric list: " + csv);
  return out;
}

}  // namespace detail

inline void write_smiles_csv(std::ostream& out, const std::vector<SmileSurface>& surfaces) {
  out << "date,maturity,moneyness,strike,price,iv,valid,atm_vol\n";
  out << std::setprecision(17);
  for (const SmileSurface& surface : surfaces) {
    const std::string date = surface.label.empty() ? std::to_string(surface.date) : surface.label;
    for (const SmileSlice& slice : surface.slices) {
      for (const SmileCell& cell : slice.cells) {
        out << date << ',' << slice.maturity_days << ',' << cell.moneyness << ',' << cell.strike
            << ',' << cell.price << ',' << cell.implied << ',' << (cell.valid ? 1 : 0) << ','
            << slice.atm_vol << '\n';
      }
    }
  }
}

// Reads either this tool's smile format
//   date,maturity,moneyness,strike,price,iv,valid,atm_vol
// or market quote sheets
//   date,T,K,mid_iv   |   date,T,K,mid_price
// (strikes and prices in the rescaled frame with spot 100). date_labels maps
// quote dates onto indices of the underlying price series.
inline std::vector<SmileSurface> load_smiles_csv(std::istream& in,
                                                 const std::vector<std::string>& date_labels) {
  std::map<std::string, std::size_t> by_label;
  for (std::size_t i = 0; i < date_labels.size(); ++i) by_label[date_labels[i]] = i;

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty smile file");
  const auto header = detail::split_csv_row(line);
  enum class Format { native, market_iv, market_price } format;
  if (header == std::vector<std::string>{"date", "maturity", "moneyness", "strike", "price", "iv",
                                         "valid", "atm_vol"})
    format = Format::native;
  else if (header == std::vector<std::string>{"date", "T", "K", "mid_iv"})
    format = Format::market_iv;
  else if (header == std::vector<std::string>{"date", "T", "K", "mid_price"})
    format = Format::market_price;
  else
    throw std::runtime_error("unrecognized smile header");

  // (date index, maturity) -> slice under construction
  std::map<std::pair<std::size_t, int>, SmileSlice> slices;
  std::map<std::size_t, std::string> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::strip(line).empty()) continue;
    const auto fields = detail::split_csv_row(line);
    const std::size_t expected = format == Format::native ? 8 : 4;
    if (fields.size() != expected)
      throw std::runtime_error("malformed smile row " + std::to_string(row));
    const std::size_t date = detail::resolve_date(fields[0], by_label);
    labels[date] = fields[0];
    const int t_days = std::stoi(fields[1]);
    SmileSlice& slice = slices[{date, t_days}];
    slice.maturity_days = t_days;
    SmileCell cell;
    if (format == Format::native) {
      cell.moneyness = std::stod(fields[2]);
      cell.strike = std::stod(fields[3]);
      cell.price = std::stod(fields[4]);
      cell.implied = std::stod(fields[5]);
      cell.valid = std::stoi(fields[6]) != 0 && std::isfinite(cell.implied);
      const double atm = std::stod(fields[7]);
      if (std::isfinite(atm) && atm > 0.0) {
        slice.atm_vol = atm;
        slice.atm_valid = true;
      }
    } else {
      cell.strike = std::stod(fields[2]);
      cell.moneyness = std::numeric_limits<double>::quiet_NaN();
      const double years = t_days / kTradingDaysPerYear;
      if (format == Format::market_iv) {
        cell.implied = std::stod(fields[3]);
        cell.price = bs_price(100.0, cell.strike, years, cell.implied);
      } else {
        cell.price = std::stod(fields[3]);
        cell.implied = implied_vol(cell.price, 100.0, cell.strike, years);
      }
      cell.valid = std::isfinite(cell.implied) && cell.implied >= 0.0;
    }
    slice.cells.push_back(cell);
  }

  std::map<std::size_t, SmileSurface> surfaces;
  for (auto& [key, slice] : slices) {
    if (!slice.atm_valid) {
      // Market sheets carry no ATM column; read it off the smile at K = 100.
      const std::optional<double> atm = interpolate_iv(slice, 100.0);
      if (atm.has_value() && *atm > 0.0) {
        slice.atm_vol = *atm;
        slice.atm_valid = true;
      }
    }
    SmileSurface& surface = surfaces[key.first];
    surface.date = key.first;
    surface.label = labels[key.first];
    surface.slices.push_back(std::move(slice));
  }
  std::vector<SmileSurface> out;
  out.reserve(surfaces.size());
  for (auto& [date, surface] : surfaces) out.push_back(std::move(surface));
  return out;
}

inline void write_ledger_csv(std::ostream& out, const PnlLedger& ledger,
                             const std::vector<std::string>& date_labels) {
  out << "date,label,maturity,moneyness,sign,strike,volume,model_vol,market_vol,market_price,"
         "pnl_unhedged,pnl_hedged\n";
  out << std::setprecision(17);
  for (const LedgerTrade& t : ledger.trades) {
    const std::string label = t.date < date_labels.size() ? date_labels[t.date] : "";
    out << t.date << ',' << label << ',' << t.maturity_days << ',' << t.moneyness << ',' << t.sign
        << ',' << t.strike << ',' << t.volume << ',' << t.model_vol << ',' << t.market_vol << ','
        << t.market_price << ',' << t.pnl.unhedged << ',' << t.pnl.hedged << '\n';
  }
}

inline nlohmann::json ledger_summary_json(const PnlLedger& ledger, std::size_t period_days) {
  const PnlAggregate overall = aggregate_overall(ledger);
  nlohmann::json j;
  j["trades"] = ledger.trades.size();
  j["no_trade"] = ledger.no_trade;
  j["skipped"] = ledger.skipped;
  j["overall"] = {{"count", overall.count},
                  {"mean_unhedged", overall.mean_unhedged},
                  {"mean_hedged", overall.mean_hedged},
                  {"sd_unhedged", overall.sd_unhedged},
                  {"sd_hedged", overall.sd_hedged},
                  {"win_rate", overall.win_rate}};
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& [key, agg] : aggregate_ledger(ledger, period_days)) {
    buckets.push_back({{"period", std::get<0>(key)},
                       {"maturity", std::get<1>(key)},
                       {"moneyness", std::get<2>(key)},
                       {"count", agg.count},
                       {"mean_unhedged", agg.mean_unhedged},
                       {"mean_hedged", agg.mean_hedged},
                       {"sd_hedged", agg.sd_hedged},
                       {"win_rate", agg.win_rate}});
  }
  j["buckets"] = std::move(buckets);
  return j;
}

inline int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"scattering-spectra path generation, volatility prediction and option pricing"};
  app.require_subcommand(1);

  std::string config_path;
  unsigned threads = 0;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--threads", threads, "worker thread cap (0 = all cores)");

  const auto make_config = [&]() {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    cfg.scan.threads = threads;
    return cfg;
  };

  // spectra
  std::string sp_in, sp_out;
  int sp_scales = 0;
  auto* sp = app.add_subcommand("spectra", "compute scattering spectra of a price series");
  sp->add_option("--in", sp_in, "input prices CSV")->required();
  sp->add_option("--out", sp_out, "output JSON")->required();
  sp->add_option("--scales,-J", sp_scales, "number of dyadic scales (0 = auto)");
  sp->callback([&] {
    const LogPricePath path = load_prices(sp_in);
    ScatteringSpectra spectra;
    if (is_power_of_two(path.x.size())) {
      const int j = sp_scales > 0 ? sp_scales : default_num_scales(path.x.size());
      spectra = compute_spectra(path.x, build_filter_bank(path.x.size(), j));
    } else {
      spectra = compute_spectra_padded(path.x, sp_scales);
    }
    nlohmann::json j = spectra_to_json(spectra);
    j["input"] = sp_in;
    j["length"] = path.x.size();
    detail::open_output(sp_out) << j.dump(2) << '\n';
  });

  // generate
  std::string gen_target, gen_out;
  std::size_t gen_count = 0;
  std::size_t gen_length = 0;
  int gen_scales = 0;
  std::uint64_t gen_seed = 0;
  bool gen_seed_set = false;
  auto* gen = app.add_subcommand("generate", "sample paths matching a target's spectra");
  gen->add_option("--target", gen_target, "prices CSV providing the target statistics")
      ->required();
  gen->add_option("--out", gen_out, "output dataset file")->required();
  gen->add_option("--count", gen_count, "number of paths (default from config)");
  gen->add_option("--length", gen_length, "path length, power of two (default from config)");
  gen->add_option("--scales,-J", gen_scales, "number of dyadic scales (0 = auto)");
  gen->add_option("--seed", gen_seed, "random seed override")->each([&](const std::string&) {
    gen_seed_set = true;
  });
  gen->callback([&] {
    RunConfig cfg = make_config();
    if (gen_count > 0) cfg.path_count = gen_count;
    if (gen_length > 0) cfg.path_length = gen_length;
    if (gen_scales > 0) cfg.num_scales = gen_scales;
    if (gen_seed_set) cfg.seed = gen_seed;
    cfg.validate();
    cfg.synthesis.seed = cfg.seed;
    const LogPricePath target = load_prices(gen_target);
    const int j = cfg.num_scales > 0 ? cfg.num_scales : default_num_scales(cfg.path_length);
    const FilterBank bank = build_filter_bank(cfg.path_length, j);
    const ScatteringSpectra target_spectra = average_windowed_spectra(target.x, bank);
    const PathDataset dataset = generate_dataset(target_spectra, cfg.path_count, cfg.path_length,
                                                 cfg.synthesis, bank, threads);
    save_dataset(dataset, gen_out);
    std::size_t converged = 0;
    for (const PathMeta& m : dataset.meta) converged += m.converged ? 1 : 0;
    std::cout << "generated " << dataset.count() << " paths of length " << cfg.path_length << ", "
              << converged << " converged\n";
  });

  // predict-vol
  std::string pv_dataset, pv_query, pv_out, pv_summary;
  std::size_t pv_stride = 1;
  auto* pv = app.add_subcommand("predict-vol", "realized-variance prediction along a query path");
  pv->add_option("--dataset", pv_dataset, "generated path dataset")->required();
  pv->add_option("--query", pv_query, "prices CSV to predict on")->required();
  pv->add_option("--out", pv_out, "per-date predictions CSV")->required();
  pv->add_option("--summary", pv_summary, "R^2 summary JSON");
  pv->add_option("--stride", pv_stride, "anchor stride along the query path");
  pv->callback([&] {
    const RunConfig cfg = make_config();
    if (pv_stride == 0) throw std::invalid_argument("stride must be positive");
    const PathDataset dataset = load_dataset(pv_dataset);
    const LogPricePath query = load_prices(pv_query);
    const std::span<const double> x(query.x);
    int max_h = 0;
    for (int t : cfg.horizons) max_h = std::max(max_h, t);
    const std::size_t first = static_cast<std::size_t>(std::max(cfg.embedding.horizon, max_h));
    if (first + static_cast<std::size_t>(max_h) >= x.size())
      throw std::invalid_argument("query path too short for the configured horizons");

    auto out = detail::open_output(pv_out);
    out << "anchor,label,horizon,ps_mc,benchmark,realized\n";
    std::vector<std::vector<double>> ps(cfg.horizons.size()), bench(cfg.horizons.size()),
        real(cfg.horizons.size());
    for (std::size_t t = first; t + static_cast<std::size_t>(max_h) < x.size(); t += pv_stride) {
      const std::vector<double> pred = predict_ps_mc_multi(
          dataset, x.subspan(0, t + 1), cfg.horizons, cfg.embedding, cfg.neighbors, cfg.scan);
      for (std::size_t h = 0; h < cfg.horizons.size(); ++h) {
        const double b = predict_benchmark(x, t, cfg.horizons[h]);
        const double r = realized_variance(x, t, cfg.horizons[h]);
        ps[h].push_back(pred[h]);
        bench[h].push_back(b);
        real[h].push_back(r);
        out << t << ',' << (query.dates.empty() ? "" : query.dates[t]) << ',' << cfg.horizons[h]
            << ',' << pred[h] << ',' << b << ',' << r << '\n';
      }
    }
    nlohmann::json summary;
    summary["anchors"] = ps.empty() ? 0 : ps[0].size();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t h = 0; h < cfg.horizons.size(); ++h) {
      nlohmann::json row;
      row["horizon"] = cfg.horizons[h];
      row["r2_ps_mc"] = score_r2(ps[h], real[h]);
      row["r2_benchmark"] = score_r2(bench[h], real[h]);
      rows.push_back(std::move(row));
    }
    summary["scores"] = std::move(rows);
    std::cout << summary.dump(2) << '\n';
    if (!pv_summary.empty()) detail::open_output(pv_summary) << summary.dump(2) << '\n';
  });

  // price-smile
  std::string psm_dataset, psm_query, psm_out;
  bool psm_unconditional = false;
  auto* psm = app.add_subcommand("price-smile", "implied-vol smile from a path ensemble");
  psm->add_option("--dataset", psm_dataset, "generated path dataset")->required();
  psm->add_option("--query", psm_query, "prices CSV whose recent past conditions the smile");
  psm->add_flag("--unconditional", psm_unconditional, "average smile of the whole dataset");
  psm->add_option("--out", psm_out, "smile CSV")->required();
  psm->callback([&] {
    const RunConfig cfg = make_config();
    if (psm_unconditional == !psm_query.empty())
      throw std::invalid_argument("price-smile: pass exactly one of --query / --unconditional");
    const PathDataset dataset = load_dataset(psm_dataset);
    SmileSurface surface;
    if (psm_unconditional) {
      surface = average_smile(dataset, cfg.maturities, cfg.moneyness,
                              static_cast<std::size_t>(cfg.scan.future_length));
    } else {
      const LogPricePath query = load_prices(psm_query);
      surface = ps_hmc_smile(dataset, query.x, cfg.maturities, cfg.moneyness, cfg.embedding,
                             cfg.neighbors, cfg.scan);
      surface.date = query.x.size() - 1;
      if (!query.dates.empty()) surface.label = query.dates.back();
    }
    auto out = detail::open_output(psm_out);
    write_smiles_csv(out, {surface});
  });

  // trade-game
  std::string tg_model, tg_counterparty, tg_prices, tg_ledger, tg_ledger_b, tg_cumulative,
      tg_summary;
  bool tg_versus = false;
  auto* tg = app.add_subcommand("trade-game", "systematic trading between two smile surfaces");
  tg->add_option("--model", tg_model, "model smiles CSV")->required();
  tg->add_option("--counterparty", tg_counterparty, "counterparty smiles CSV")->required();
  tg->add_option("--prices", tg_prices, "underlying prices CSV")->required();
  tg->add_option("--ledger", tg_ledger, "trade ledger CSV")->required();
  tg->add_option("--ledger-b", tg_ledger_b, "counterparty ledger CSV (with --versus)");
  tg->add_option("--cumulative", tg_cumulative, "cumulative hedged P&L CSV");
  tg->add_option("--summary", tg_summary, "aggregate summary JSON");
  tg->add_flag("--versus", tg_versus, "model-vs-model game (counterparty ledger is the mirror)");
  tg->callback([&] {
    const RunConfig cfg = make_config();
    const LogPricePath underlying = load_prices(tg_prices);
    std::ifstream min(tg_model);
    if (!min) throw std::runtime_error("cannot open " + tg_model);
    std::ifstream cin_(tg_counterparty);
    if (!cin_) throw std::runtime_error("cannot open " + tg_counterparty);
    const std::vector<SmileSurface> model = load_smiles_csv(min, underlying.dates);
    const std::vector<SmileSurface> counterparty = load_smiles_csv(cin_, underlying.dates);

    PnlLedger ledger;
    if (tg_versus) {
      auto [a, b] = model_vs_model_game(model, counterparty, underlying.x, cfg.maturities,
                                        cfg.moneyness, cfg.game);
      ledger = std::move(a);
      if (!tg_ledger_b.empty()) {
        auto out = detail::open_output(tg_ledger_b);
        write_ledger_csv(out, b, underlying.dates);
      }
    } else {
      ledger = run_game(model, counterparty, underlying.x, cfg.maturities, cfg.moneyness,
                        cfg.game);
    }
    {
      auto out = detail::open_output(tg_ledger);
      write_ledger_csv(out, ledger, underlying.dates);
    }
    if (!tg_cumulative.empty()) {
      auto out = detail::open_output(tg_cumulative);
      out << "date,cumulative_hedged\n";
      for (const auto& [date, pnl] : cumulative_hedged(ledger)) out << date << ',' << pnl << '\n';
    }
    const nlohmann::json summary = ledger_summary_json(ledger, cfg.game.period_days);
    std::cout << summary.dump(2) << '\n';
    if (!tg_summary.empty()) detail::open_output(tg_summary) << summary.dump(2) << '\n';
  });

  // calibrate
  std::string cal_mode, cal_prices, cal_dataset, cal_out, cal_table;
  std::string cal_alphas = "1.15", cal_betas = "0.9", cal_etas = "0.075";
  std::size_t cal_snippets = 200;
  int cal_horizon = 7;
  auto* cal = app.add_subcommand("calibrate", "fit model parameters");
  cal->add_option("--mode", cal_mode, "pdv | embedding")->required();
  cal->add_option("--prices", cal_prices, "prices CSV (pdv mode)");
  cal->add_option("--dataset", cal_dataset, "path dataset (embedding mode)");
  cal->add_option("--out", cal_out, "result JSON")->required();
  cal->add_option("--table", cal_table, "per-config scores CSV (embedding mode)");
  cal->add_option("--alphas", cal_alphas, "comma list of lag growth factors");
  cal->add_option("--betas", cal_betas, "comma list of lag decay exponents");
  cal->add_option("--eta-hats", cal_etas, "comma list of kernel widths");
  cal->add_option("--snippets", cal_snippets, "query snippets for embedding calibration");
  cal->add_option("--horizon", cal_horizon, "regression horizon in days (pdv mode)");
  cal->callback([&] {
    const RunConfig cfg = make_config();
    if (cal_mode == "pdv") {
      if (cal_prices.empty()) throw std::invalid_argument("calibrate --mode pdv needs --prices");
      const LogPricePath path = load_prices(cal_prices);
      const PdvBetas betas = pdv_calibrate_regression(path.x, cfg.pdv_kernels, cal_horizon);
      nlohmann::json j = {
          {"beta0", betas.beta0}, {"beta1", betas.beta1}, {"beta2", betas.beta2}};
      std::cout << j.dump(2) << '\n';
      detail::open_output(cal_out) << j.dump(2) << '\n';
    } else if (cal_mode == "embedding") {
      if (cal_dataset.empty())
        throw std::invalid_argument("calibrate --mode embedding needs --dataset");
      const PathDataset dataset = load_dataset(cal_dataset);
      std::vector<EmbeddingConfig> grid;
      for (double a : detail::parse_double_list(cal_alphas))
        for (double b : detail::parse_double_list(cal_betas))
          for (double e : detail::parse_double_list(cal_etas)) {
            EmbeddingConfig ec = cfg.embedding;
            ec.alpha = a;
            ec.beta = b;
            ec.eta_hat = e;
            grid.push_back(ec);
          }
      CalibrationOptions opt;
      opt.num_snippets = cal_snippets;
      opt.k = cfg.neighbors;
      opt.seed = cfg.seed == 0 ? 1 : cfg.seed;
      opt.scan = cfg.scan;
      const CalibrationReport report = calibrate_embedding(dataset, grid, cfg.horizons, opt);
      nlohmann::json j = {{"alpha", report.best.alpha},
                          {"beta", report.best.beta},
                          {"eta_hat", report.best.eta_hat},
                          {"horizon", report.best.horizon}};
      std::cout << j.dump(2) << '\n';
      detail::open_output(cal_out) << j.dump(2) << '\n';
      if (!cal_table.empty()) {
        auto out = detail::open_output(cal_table);
        out << "alpha,beta,eta_hat,mean_r2\n";
        for (const CalibrationScore& s : report.scores)
          out << s.config.alpha << ',' << s.config.beta << ',' << s.config.eta_hat << ','
              << s.mean_r2 << '\n';
      }
    } else {
      throw std::invalid_argument("calibrate: unknown mode " + cal_mode);
    }
  });

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("psmc");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace psmc
