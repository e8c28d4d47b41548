#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "psmc/forecast.hpp"

using namespace psmc;

TEST_CASE("realized variance matches a hand computation") {
  const std::vector<double> x{0.0, 0.1, 0.1, -0.1, 0.3};
  // increments after t=0: 0.1, 0.0, -0.2, 0.4
  const double expect = 252.0 / 4.0 * (0.01 + 0.0 + 0.04 + 0.16);
  CHECK_THAT(realized_variance(x, 0, 4), Catch::Matchers::WithinRel(expect, 1e-15));
  CHECK_THAT(realized_variance(x, 1, 2), Catch::Matchers::WithinRel(252.0 / 2.0 * 0.04, 1e-12));
  CHECK_THROWS_AS(realized_variance(x, 1, 4), std::out_of_range);
  CHECK_THROWS_AS(realized_variance(x, 0, 0), std::invalid_argument);
}

TEST_CASE("anchored-future variance agrees with the absolute form") {
  const std::vector<double> x{1.0, 1.2, 0.9, 1.5, 1.4, 1.6};
  const std::size_t anchor = 1;
  std::vector<double> future;
  for (std::size_t u = anchor + 1; u < x.size(); ++u) future.push_back(x[u] - x[anchor]);
  for (int h = 1; h <= 4; ++h)
    CHECK_THAT(future_realized_variance(future, h),
               Catch::Matchers::WithinRel(realized_variance(x, anchor, h), 1e-14));
  CHECK_THROWS_AS(future_realized_variance(future, 5), std::invalid_argument);
}

TEST_CASE("benchmark is the trailing realized variance") {
  const rvec x = testutil::gaussian_walk(64, 81, 0.02);
  CHECK(predict_benchmark(x, 30, 7) == realized_variance(x, 23, 7));
  CHECK_THROWS_AS(predict_benchmark(x, 5, 7), std::out_of_range);
  CHECK_THROWS_AS(predict_benchmark(x, 100, 7), std::out_of_range);
}

TEST_CASE("shadow prediction equals the weighted mean of neighbor variances") {
  EmbeddingConfig cfg;
  cfg.alpha = 1.4;
  cfg.horizon = 10;
  ScanOptions opt;
  opt.past_length = 12;
  opt.future_length = 8;

  PathDataset ds = testutil::dataset_from_paths(
      {testutil::gaussian_walk(128, 82, 0.01), testutil::gaussian_walk(128, 83, 0.01)});
  const rvec probe = testutil::gaussian_walk(16, 84, 0.01);

  const std::size_t k = 15;
  const std::vector<int> horizons{3, 7};
  const auto preds = predict_ps_mc_multi(ds, probe, horizons, cfg, k, opt);
  REQUIRE(preds.size() == 2);

  const ShadowSet shadow = scan(ds, embed(probe, cfg), k, cfg, opt);
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    double manual = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      manual += shadow.weights[i] * future_realized_variance(shadow.entries[i].future, horizons[h]);
    manual /= static_cast<double>(k);
    CHECK_THAT(preds[h], Catch::Matchers::WithinRel(manual, 1e-14));
    CHECK(preds[h] > 0.0);
  }
  CHECK(predict_ps_mc(ds, probe, 3, cfg, k, opt) == preds[0]);
  CHECK_THROWS_AS(predict_ps_mc(ds, probe, 9, cfg, k, opt), std::invalid_argument);
}

TEST_CASE("r2 scoring pins perfect, mean and broken predictors") {
  const std::vector<double> realized{1.0, 2.0, 3.0, 4.0};
  CHECK(score_r2(realized, realized) == 1.0);

  const std::vector<double> at_mean(4, 2.5);
  CHECK_THAT(score_r2(at_mean, realized), Catch::Matchers::WithinAbs(0.0, 1e-15));

  const std::vector<double> inverted{4.0, 3.0, 2.0, 1.0};
  CHECK(score_r2(inverted, realized) < 0.0);

  CHECK_THROWS_AS(score_r2(std::vector<double>{1.0}, std::vector<double>{1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(score_r2(at_mean, at_mean), std::domain_error);
  CHECK_THROWS_AS(score_r2(at_mean, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("embedding calibration prefers the truthful config on an AR world") {
  // dataset of AR(1) level paths: memory lives at short lags, so a config
  // whose horizon covers the correlation length beats a lag-1-only config
  std::vector<rvec> paths;
  for (std::uint64_t s = 0; s < 12; ++s) paths.push_back(testutil::ar1_path(220, 0.85, 400 + s));
  const PathDataset ds = testutil::dataset_from_paths(std::move(paths));

  EmbeddingConfig rich;
  rich.alpha = 1.4;
  rich.horizon = 16;
  EmbeddingConfig poor = rich;
  poor.horizon = 1;

  CalibrationOptions opt;
  opt.num_snippets = 40;
  opt.k = 60;
  opt.seed = 5;
  opt.scan.past_length = 20;
  opt.scan.future_length = 10;

  const CalibrationReport report = calibrate_embedding(ds, {rich, poor}, {5}, opt);
  REQUIRE(report.scores.size() == 2);
  CHECK(report.scores[0].r2_per_horizon.size() == 1);
  // both entries scored, best reproduces the argmax
  const double s0 = report.scores[0].mean_r2;
  const double s1 = report.scores[1].mean_r2;
  if (s0 >= s1)
    CHECK(report.best.horizon == rich.horizon);
  else
    CHECK(report.best.horizon == poor.horizon);

  CHECK_THROWS_AS(calibrate_embedding(ds, {}, {5}, opt), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_embedding(ds, {rich}, {}, opt), std::invalid_argument);
}
