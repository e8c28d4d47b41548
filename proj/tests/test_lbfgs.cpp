#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "psmc/lbfgs.hpp"

using namespace psmc;

namespace {
const auto never = [](double, const std::vector<double>&) { return false; };
}

TEST_CASE("quadratic bowl is solved to gradient tolerance") {
  // f = sum_i w_i (x_i - c_i)^2 with condition number 100
  const std::vector<double> w{1.0, 4.0, 25.0, 100.0};
  const std::vector<double> c{0.5, -1.5, 2.0, -3.0};
  auto objective = [&](const std::vector<double>& x, std::vector<double>& g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - c[i];
      f += w[i] * d * d;
      g[i] = 2.0 * w[i] * d;
    }
    return f;
  };
  LbfgsOptions opt;
  opt.gradient_tolerance = 1e-10;
  const LbfgsResult res = lbfgs_minimize(objective, std::vector<double>(4, 0.0), opt, never);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK_THAT(res.x[i], Catch::Matchers::WithinAbs(c[i], 1e-8));
  CHECK(res.f < 1e-16);
  CHECK_FALSE(res.stopped_by_callback);
}

TEST_CASE("rosenbrock valley converges from the standard start") {
  auto objective = [](const std::vector<double>& x, std::vector<double>& g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  LbfgsOptions opt;
  opt.max_iterations = 200;
  opt.gradient_tolerance = 1e-10;
  const LbfgsResult res = lbfgs_minimize(objective, {-1.2, 1.0}, opt, never);
  CHECK_THAT(res.x[0], Catch::Matchers::WithinAbs(1.0, 1e-6));
  CHECK_THAT(res.x[1], Catch::Matchers::WithinAbs(1.0, 1e-6));
  CHECK(res.f < 1e-12);
  CHECK(res.iterations < 200);
}

TEST_CASE("accepted losses never increase") {
  auto objective = [](const std::vector<double>& x, std::vector<double>& g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      f += std::cosh(x[i]) + 0.1 * x[i] * x[i];
      g[i] = std::sinh(x[i]) + 0.2 * x[i];
    }
    return f;
  };
  std::vector<double> x0(8);
  for (std::size_t i = 0; i < 8; ++i) x0[i] = (i % 2 ? 2.0 : -3.0);
  const LbfgsResult res = lbfgs_minimize(objective, x0, LbfgsOptions{}, never);
  REQUIRE(res.loss_history.size() >= 2);
  for (std::size_t i = 1; i < res.loss_history.size(); ++i)
    CHECK(res.loss_history[i] <= res.loss_history[i - 1]);
  CHECK(res.f == res.loss_history.back());
}

TEST_CASE("stop callback halts the run immediately") {
  int evals = 0;
  auto objective = [&](const std::vector<double>& x, std::vector<double>& g) {
    ++evals;
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      f += x[i] * x[i];
      g[i] = 2.0 * x[i];
    }
    return f;
  };
  auto stop = [](double f, const std::vector<double>&) { return f < 0.5; };
  const LbfgsResult res = lbfgs_minimize(objective, {10.0, -10.0}, LbfgsOptions{}, stop);
  CHECK(res.stopped_by_callback);
  CHECK(res.f < 0.5);
  CHECK(evals < 100);
}

TEST_CASE("iteration cap is honored") {
  auto objective = [](const std::vector<double>& x, std::vector<double>& g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      f += std::pow(x[i] * x[i] + 1.0, 0.3);
      g[i] = 0.6 * x[i] * std::pow(x[i] * x[i] + 1.0, -0.7);
    }
    return f;
  };
  LbfgsOptions opt;
  opt.max_iterations = 3;
  const LbfgsResult res = lbfgs_minimize(objective, {50.0, -80.0, 20.0}, opt, never);
  CHECK(res.iterations <= 3);
}
