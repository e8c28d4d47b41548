#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "psmc/embedding.hpp"

using namespace psmc;

TEST_CASE("default configuration spans 34 components up to lag 126") {
  const EmbeddingConfig cfg;
  const auto lags = cfg.lags();
  CHECK(cfg.dimension() == 34);
  REQUIRE_FALSE(lags.empty());
  CHECK(lags.front() == 1);
  CHECK(lags.back() <= 126);
  for (std::size_t m = 1; m < lags.size(); ++m) CHECK(lags[m] >= lags[m - 1]);

  // floor(1.15^m) repeats small lags; those duplicates are intentional
  int ones = 0;
  for (int l : lags) ones += (l == 1);
  CHECK(ones == 4);
}

TEST_CASE("geometric lags truncate at the horizon") {
  EmbeddingConfig cfg;
  cfg.alpha = 2.0;
  cfg.horizon = 8;
  const auto lags = cfg.lags();
  REQUIRE(lags == std::vector<int>{2, 4, 8});
}

TEST_CASE("components are lag-normalized increments of the endpoint") {
  EmbeddingConfig cfg;
  cfg.alpha = 2.0;
  cfg.beta = 0.5;
  cfg.horizon = 8;
  const std::vector<double> past{0.0, 0.5, -1.0, 2.0, 0.25, 1.0, -0.5, 3.0, 4.0};
  const EmbeddedPast e = embed(past, cfg);
  REQUIRE(e.vector.size() == 3);
  CHECK_THAT(e.vector[0], Catch::Matchers::WithinRel((4.0 - (-0.5)) / std::sqrt(2.0), 1e-15));
  CHECK_THAT(e.vector[1], Catch::Matchers::WithinRel((4.0 - 0.25) / 2.0, 1e-15));
  CHECK_THAT(e.vector[2], Catch::Matchers::WithinRel((4.0 - 0.0) / std::sqrt(8.0), 1e-15));
  const double norm = std::sqrt(e.vector[0] * e.vector[0] + e.vector[1] * e.vector[1] +
                                e.vector[2] * e.vector[2]);
  CHECK_THAT(e.norm, Catch::Matchers::WithinRel(norm, 1e-15));
}

TEST_CASE("embedding rejects pasts shorter than the horizon") {
  EmbeddingConfig cfg;
  cfg.alpha = 2.0;
  cfg.horizon = 8;
  CHECK_THROWS_AS(embed(std::vector<double>(8, 1.0), cfg), std::invalid_argument);
  CHECK_NOTHROW(embed(std::vector<double>(9, 1.0), cfg));
}

TEST_CASE("threshold scales with the query norm and rejects flat pasts") {
  EmbeddingConfig cfg;
  cfg.alpha = 2.0;
  cfg.horizon = 4;
  cfg.eta_hat = 0.25;
  const std::vector<double> past{0.0, 1.0, 3.0, 2.0, 5.0};
  const EmbeddedPast e = embed(past, cfg);
  CHECK_THAT(threshold(e, cfg), Catch::Matchers::WithinRel(0.25 * e.norm, 1e-15));

  const EmbeddedPast flat = embed(std::vector<double>(5, 2.0), cfg);
  CHECK(flat.norm == 0.0);
  CHECK_THROWS_AS(threshold(flat, cfg), std::domain_error);
}

TEST_CASE("distance is Euclidean and validates dimensions") {
  EmbeddedPast a{{1.0, 2.0, 2.0}, 3.0};
  EmbeddedPast b{{1.0, 0.0, 0.0}, 1.0};
  CHECK_THAT(shadow_distance(a, b), Catch::Matchers::WithinRel(std::sqrt(8.0), 1e-15));
  EmbeddedPast c{{1.0, 2.0}, 0.0};
  CHECK_THROWS_AS(shadow_distance(a, c), std::invalid_argument);
}

TEST_CASE("config validation rejects degenerate parameters") {
  EmbeddingConfig cfg;
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.eta_hat = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
