#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "psmc/cli.hpp"

namespace {

psmc::RunConfig tiny_config() {
  psmc::RunConfig cfg;
  cfg.seed = 7;
  cfg.path_length = 256;
  cfg.path_count = 4;
  cfg.embedding.horizon = 16;
  cfg.scan.past_length = 20;
  cfg.scan.future_length = 8;
  cfg.horizons = {3, 5};
  cfg.maturities = {4};
  cfg.neighbors = 150;  // hedged pricing wants at least 10x its basis size
  return cfg;
}

void write_config(const std::string& file, const psmc::RunConfig& cfg) {
  std::ofstream out(file);
  out << psmc::config_to_json(cfg).dump(2) << '\n';
}

nlohmann::json parse_file(const std::string& file) {
  return nlohmann::json::parse(testutil::slurp(file));
}

std::size_t count_data_rows(const std::string& csv_file) {
  std::ifstream in(csv_file);
  std::string line;
  std::size_t rows = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (!line.empty()) ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("cli rejects bad invocations") {
  CHECK(psmc::run_cli({}) != 0);
  CHECK(psmc::run_cli({"frobnicate"}) != 0);
  CHECK(psmc::run_cli({"spectra", "--out", "/tmp/x.json"}) != 0);  // --in missing
  CHECK(psmc::run_cli({"spectra", "--in", "/nonexistent/prices.csv", "--out", "/tmp/x.json"}) != 0);
}

TEST_CASE("cli spectra writes a json report") {
  testutil::TempDir dir;
  const std::string prices = dir.file("prices.csv");
  psmc::write_prices(prices, testutil::make_price_path(testutil::gaussian_walk(256, 11, 0.01)));

  const std::string out = dir.file("spectra.json");
  REQUIRE(psmc::run_cli({"spectra", "--in", prices, "--out", out}) == 0);

  const nlohmann::json j = parse_file(out);
  CHECK(j.at("length") == 256);
  CHECK(j.at("num_scales") == 5);
  // J = 5: 5 + 5 + 15 phi3 pairs + 20 phi4 triples + 5 sign moments
  REQUIRE(j.at("entries").size() == 50);
  const auto& first = j.at("entries").at(0);
  CHECK(first.at("kind") == "phi1");
  CHECK(first.at("j") == 1);
  CHECK(first.at("re").get<double>() > 0.0);
  bool saw_phi4 = false;
  for (const auto& e : j.at("entries"))
    if (e.at("kind") == "phi4") {
      saw_phi4 = true;
      CHECK(e.contains("jp"));
      CHECK(e.contains("j2"));
    }
  CHECK(saw_phi4);
}

TEST_CASE("cli spectra handles non-power-of-two input by padding") {
  testutil::TempDir dir;
  const std::string prices = dir.file("prices.csv");
  psmc::write_prices(prices, testutil::make_price_path(testutil::gaussian_walk(300, 12, 0.01)));

  const std::string out = dir.file("spectra.json");
  REQUIRE(psmc::run_cli({"spectra", "--in", prices, "--out", out}) == 0);
  const nlohmann::json j = parse_file(out);
  CHECK(j.at("length") == 300);
  CHECK(j.at("num_scales").get<int>() >= 1);
}

TEST_CASE("cli pipeline: generate, predict-vol, price-smile, trade-game") {
  testutil::TempDir dir;

  const std::string config = dir.file("run.json");
  write_config(config, tiny_config());

  const std::string target = dir.file("target.csv");
  psmc::write_prices(target, testutil::make_price_path(testutil::gaussian_walk(512, 21, 0.01)));

  // full underlying series plus a 40-day prefix used as the live query
  const psmc::rvec underlying = testutil::gaussian_walk(60, 22, 0.01);
  const std::string prices = dir.file("prices.csv");
  psmc::write_prices(prices, testutil::make_price_path(underlying));
  const std::string query = dir.file("query.csv");
  psmc::write_prices(query, testutil::make_price_path(
                                psmc::rvec(underlying.begin(), underlying.begin() + 40)));

  const std::string dataset = dir.file("paths.bin");
  REQUIRE(psmc::run_cli({"--config", config, "generate", "--target", target, "--out", dataset}) ==
          0);
  const psmc::PathDataset ds = psmc::load_dataset(dataset);
  CHECK(ds.count() == 4);
  CHECK(ds.paths[0].size() == 256);

  SECTION("generation is reproducible and seed-sensitive") {
    const std::string again = dir.file("paths2.bin");
    REQUIRE(psmc::run_cli({"--config", config, "generate", "--target", target, "--out", again}) ==
            0);
    CHECK(testutil::slurp(again) == testutil::slurp(dataset));

    const std::string reseeded = dir.file("paths3.bin");
    REQUIRE(psmc::run_cli({"--config", config, "generate", "--target", target, "--out", reseeded,
                           "--seed", "8"}) == 0);
    CHECK(testutil::slurp(reseeded) != testutil::slurp(dataset));
  }

  SECTION("predict-vol emits per-anchor rows and r2 summary") {
    const std::string pred = dir.file("pred.csv");
    const std::string summary = dir.file("summary.json");
    REQUIRE(psmc::run_cli({"--config", config, "predict-vol", "--dataset", dataset, "--query",
                           query, "--out", pred, "--summary", summary}) == 0);

    // anchors run from t = 16 while t + 5 < 40, two horizons each
    CHECK(count_data_rows(pred) == 19 * 2);
    const nlohmann::json j = parse_file(summary);
    CHECK(j.at("anchors") == 19);
    REQUIRE(j.at("scores").size() == 2);
    for (const auto& row : j.at("scores")) {
      CHECK(row.at("r2_ps_mc").is_number());
      CHECK(row.at("r2_benchmark").is_number());
      CHECK(row.at("r2_ps_mc").get<double>() <= 1.0);
    }
  }

  SECTION("price-smile conditioned on the query feeds trade-game") {
    const std::string smile = dir.file("smile.csv");
    REQUIRE(psmc::run_cli({"--config", config, "price-smile", "--dataset", dataset, "--query",
                           query, "--out", smile}) == 0);
    CHECK(count_data_rows(smile) == 9);  // one row per default moneyness level

    std::ifstream in(smile);
    std::string header;
    std::getline(in, header);
    CHECK(header == "date,maturity,moneyness,strike,price,iv,valid,atm_vol");

    // identical books on both sides of the game: nothing should trade
    const std::string ledger = dir.file("ledger.csv");
    const std::string summary = dir.file("game.json");
    REQUIRE(psmc::run_cli({"--config", config, "trade-game", "--model", smile, "--counterparty",
                           smile, "--prices", prices, "--ledger", ledger, "--summary", summary}) ==
            0);
    const nlohmann::json j = parse_file(summary);
    CHECK(j.at("trades") == 0);
    CHECK(j.at("no_trade").get<std::size_t>() + j.at("skipped").get<std::size_t>() == 9);
    CHECK(count_data_rows(ledger) == 0);
  }

  SECTION("price-smile wants exactly one smile mode") {
    CHECK(psmc::run_cli({"--config", config, "price-smile", "--dataset", dataset, "--out",
                         dir.file("x.csv")}) != 0);
    CHECK(psmc::run_cli({"--config", config, "price-smile", "--dataset", dataset, "--query", query,
                         "--unconditional", "--out", dir.file("x.csv")}) != 0);
  }
}
