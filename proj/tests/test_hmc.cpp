#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "psmc/hmc.hpp"

using namespace psmc;

namespace {

std::vector<rvec> flat_world(std::size_t count, std::size_t days, double level) {
  return std::vector<rvec>(count, rvec(days + 1, level));
}

}  // namespace

TEST_CASE("flat ensemble prices at intrinsic value") {
  const auto paths = flat_world(160, 5, 100.0);
  const rvec weights(160, 1.0);

  const HmcResult itm = hmc_price(paths, weights, 5, 90.0);
  CHECK_THAT(itm.price, Catch::Matchers::WithinAbs(10.0, 1e-9));
  CHECK(itm.regularized);
  CHECK(itm.hedge_ratio == 0.0);

  const HmcResult atm = hmc_price(paths, weights, 5, 100.0);
  CHECK_THAT(atm.price, Catch::Matchers::WithinAbs(0.0, 1e-12));

  const HmcResult put = hmc_price(paths, weights, 5, 110.0, OptionType::put);
  CHECK_THAT(put.price, Catch::Matchers::WithinAbs(10.0, 1e-9));
}

TEST_CASE("weight scale does not matter") {
  const auto paths = testutil::gbm_price_paths(240, 8, 0.25, 501);
  rvec weights(240);
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k] = 0.2 + 0.001 * (k % 7);

  const HmcResult base = hmc_price(paths, weights, 8, 101.0);
  rvec doubled(weights);
  for (double& w : doubled) w *= 2.0;
  const HmcResult x2 = hmc_price(paths, doubled, 8, 101.0);
  CHECK(x2.price == base.price);  // power-of-two scaling is exact
  CHECK(x2.hedge_ratio == base.hedge_ratio);

  rvec tripled(weights);
  for (double& w : tripled) w *= 3.0;
  const HmcResult x3 = hmc_price(paths, tripled, 8, 101.0);
  CHECK_THAT(x3.price, Catch::Matchers::WithinRel(base.price, 1e-12));
}

TEST_CASE("zero-weight paths are inert") {
  auto paths = testutil::gbm_price_paths(200, 6, 0.2, 502);
  rvec weights(200, 1.0);
  const HmcResult base = hmc_price(paths, weights, 6, 100.0);

  // append wild paths with zero weight; the price must not move much
  // (they only extend the slice ranges through the quantiles' sample set,
  // carrying zero mass)
  auto extended = paths;
  rvec wext(weights);
  for (int e = 0; e < 20; ++e) {
    rvec wild(7, 100.0);
    for (std::size_t u = 1; u < 7; ++u) wild[u] = wild[u - 1] * (e % 2 ? 1.2 : 0.85);
    extended.push_back(wild);
    wext.push_back(0.0);
  }
  const HmcResult got = hmc_price(extended, wext, 6, 100.0);
  CHECK_THAT(got.price, Catch::Matchers::WithinRel(base.price, 1e-9));
}

TEST_CASE("duplicating every path leaves the price unchanged") {
  const auto paths = testutil::gbm_price_paths(150, 6, 0.3, 503);
  const rvec weights(150, 1.0);
  const HmcResult base = hmc_price(paths, weights, 6, 98.0);

  std::vector<rvec> doubled(paths);
  doubled.insert(doubled.end(), paths.begin(), paths.end());
  const HmcResult dup = hmc_price(doubled, rvec(300, 1.0), 6, 98.0);
  CHECK_THAT(dup.price, Catch::Matchers::WithinRel(base.price, 1e-10));
}

TEST_CASE("gbm ensemble reproduces the lognormal price and hedge") {
  const int days = 20;
  const double sigma = 0.2;
  const auto paths = testutil::gbm_price_paths(4000, days, sigma, 504);
  const rvec weights(4000, 1.0);
  const double maturity = days / 252.0;

  for (double strike : {95.0, 100.0, 105.0}) {
    const HmcResult got = hmc_price(paths, weights, days, strike);
    const double want = bs_price(100.0, strike, maturity, sigma);
    INFO("strike " << strike);
    CHECK_THAT(got.price, Catch::Matchers::WithinAbs(want, 0.15));
    CHECK_THAT(got.hedge_ratio,
               Catch::Matchers::WithinAbs(bs_delta(100.0, strike, maturity, sigma), 0.12));
    CHECK_FALSE(got.regularized);
  }

  // approximate parity: the weighted terminal mean is the forward
  double forward = 0.0;
  for (const rvec& p : paths) forward += p[days];
  forward /= static_cast<double>(paths.size());
  const double call = hmc_price(paths, weights, days, 100.0).price;
  const double put = hmc_price(paths, weights, days, 100.0, OptionType::put).price;
  CHECK_THAT(call - put, Catch::Matchers::WithinAbs(forward - 100.0, 0.35));
}

TEST_CASE("ensemble preconditions are enforced") {
  const auto paths = testutil::gbm_price_paths(130, 4, 0.2, 505);
  const rvec weights(130, 1.0);

  CHECK_THROWS_AS(hmc_price({}, {}, 4, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(hmc_price(paths, rvec(129, 1.0), 4, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(hmc_price(paths, weights, 0, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(hmc_price(paths, weights, 5, 100.0), std::invalid_argument);  // too short
  CHECK_THROWS_AS(hmc_price(paths, weights, 4, -5.0), std::invalid_argument);
  CHECK_THROWS_AS(hmc_price(paths, weights, 4, 100.0, OptionType::call, HmcOptions{3}),
                  std::invalid_argument);

  auto small = testutil::gbm_price_paths(119, 4, 0.2, 506);
  CHECK_THROWS_AS(hmc_price(small, rvec(119, 1.0), 4, 100.0), std::invalid_argument);

  rvec negw(130, 1.0);
  negw[3] = -0.1;
  CHECK_THROWS_AS(hmc_price(paths, negw, 4, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(hmc_price(paths, rvec(130, 0.0), 4, 100.0), std::invalid_argument);

  auto mixed = paths;
  mixed[7][0] = 101.0;
  CHECK_THROWS_AS(hmc_price(mixed, weights, 4, 100.0), std::invalid_argument);

  auto broken = paths;
  broken[2][3] = -1.0;
  CHECK_THROWS_AS(hmc_price(broken, weights, 4, 100.0), std::invalid_argument);
}
