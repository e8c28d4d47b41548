#pragma once

// Shared fixtures for the test binaries: seeded toy worlds and scratch files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "psmc/dataset.hpp"
#include "psmc/fft.hpp"
#include "psmc/path.hpp"
#include "psmc/random.hpp"

namespace testutil {

using psmc::rvec;

inline rvec gaussian_walk(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  const rvec steps = psmc::normal_vector(n, seed, sigma);
  rvec x(n);
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    acc += steps[t];
    x[t] = acc;
  }
  return x;
}

// Stationary AR(1) in levels: x_t = rho x_{t-1} + sigma xi_t.
inline rvec ar1_path(std::size_t n, double rho, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  rvec x(n);
  x[0] = sigma / std::sqrt(1.0 - rho * rho) * normal(rng);
  for (std::size_t t = 1; t < n; ++t) x[t] = rho * x[t - 1] + sigma * normal(rng);
  return x;
}

// Log-price GBM samples at daily steps with martingale prices
// (drift -sigma^2/2 in log space).
inline rvec gbm_log_path(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dt = 1.0 / 252.0;
  rvec x(n);
  x[0] = 0.0;
  for (std::size_t t = 1; t < n; ++t)
    x[t] = x[t - 1] + sigma * std::sqrt(dt) * normal(rng) - 0.5 * sigma * sigma * dt;
  return x;
}

inline std::vector<rvec> gbm_price_paths(std::size_t count, int days, double sigma,
                                         std::uint64_t seed, double s0 = 100.0) {
  std::vector<rvec> paths(count);
  for (std::size_t k = 0; k < count; ++k) {
    const rvec x = gbm_log_path(static_cast<std::size_t>(days) + 1, sigma,
                                psmc::derive_seed(seed, k));
    rvec s(x.size());
    for (std::size_t u = 0; u < x.size(); ++u) s[u] = s0 * std::exp(x[u]);
    paths[k] = std::move(s);
  }
  return paths;
}

inline psmc::PathDataset dataset_from_paths(std::vector<rvec> paths) {
  psmc::PathDataset d;
  d.meta.assign(paths.size(), psmc::PathMeta{0, 0.0, true});
  d.paths = std::move(paths);
  return d;
}

// Ascending ISO-like labels starting 2000-01-01, one per calendar day.
inline std::vector<std::string> make_dates(std::size_t n) {
  std::vector<std::string> out(n);
  int y = 2000, m = 1, d = 1;
  static const int mdays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    out[i] = buf;
    if (++d > mdays[m - 1]) {
      d = 1;
      if (++m > 12) {
        m = 1;
        ++y;
      }
    }
  }
  return out;
}

inline psmc::LogPricePath make_price_path(rvec x, psmc::Provenance prov = psmc::Provenance::real) {
  psmc::LogPricePath p;
  p.dates = make_dates(x.size());
  p.x = std::move(x);
  p.provenance = prov;
  return p;
}

class TempDir {
 public:
  TempDir() {
    char tmpl[] = "/tmp/psmc_test_XXXXXX";
    root_ = ::mkdtemp(tmpl);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(root_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return root_; }
  std::string file(const std::string& name) const { return root_ + "/" + name; }

 private:
  std::string root_;
};

inline std::string slurp(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
