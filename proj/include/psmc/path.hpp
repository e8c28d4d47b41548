#pragma once

// Log-price paths and their CSV representation (header `date,close`).

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psmc/fft.hpp"

namespace psmc {

enum class Provenance { real, synthetic };

struct LogPricePath {
  std::vector<std::string> dates;  // ISO labels; may be empty for synthetic paths
  rvec x;                          // natural log of close
  Provenance provenance = Provenance::real;

  void validate() const {
    if (x.size() < 2) throw std::invalid_argument("LogPricePath: need at least two observations");
    for (double v : x)
      if (!std::isfinite(v)) throw std::invalid_argument("LogPricePath: non-finite log price");
    if (!dates.empty()) {
      if (dates.size() != x.size())
        throw std::invalid_argument("LogPricePath: dates/values size mismatch");
      for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i - 1] < dates[i]))
          throw std::invalid_argument("LogPricePath: dates must be strictly increasing");
    }
  }
};

inline rvec increments(const rvec& x) {
  if (x.size() < 2) throw std::invalid_argument("increments: need at least two values");
  rvec dx(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) dx[i] = x[i + 1] - x[i];
  return dx;
}

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) fields.push_back(strip(cur));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace detail

inline LogPricePath load_prices(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_prices: empty input");
  auto header = detail::split_csv_row(line);
  if (header.size() != 2 || header[0] != "date" || header[1] != "close")
    throw std::runtime_error("load_prices: expected header 'date,close'");
  LogPricePath path;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::strip(line).empty()) continue;
    auto fields = detail::split_csv_row(line);
    if (fields.size() != 2)
      throw std::runtime_error("load_prices: malformed row " + std::to_string(row));
    const std::string& date = fields[0];
    if (date.empty()) throw std::runtime_error("load_prices: empty date at row " + std::to_string(row));
    double close = 0.0;
    std::size_t used = 0;
    try {
      close = std::stod(fields[1], &used);
    } catch (const std::exception&) {
      throw std::runtime_error("load_prices: bad close at row " + std::to_string(row));
    }
    if (used != fields[1].size())
      throw std::runtime_error("load_prices: bad close at row " + std::to_string(row));
    if (!(close > 0.0) || !std::isfinite(close))
      throw std::runtime_error("load_prices: close must be positive at row " + std::to_string(row));
    if (!path.dates.empty()) {
      if (date == path.dates.back())
        throw std::runtime_error("load_prices: duplicate date " + date);
      if (date < path.dates.back())
        throw std::runtime_error("load_prices: dates out of order at row " + std::to_string(row));
    }
    path.dates.push_back(date);
    path.x.push_back(std::log(close));
  }
  path.validate();
  return path;
}

inline LogPricePath load_prices(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("load_prices: cannot open " + filename);
  return load_prices(in);
}

inline void write_prices(std::ostream& out, const LogPricePath& path) {
  path.validate();
  out << "date,close\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < path.x.size(); ++i) {
    if (!path.dates.empty())
      out << path.dates[i];
    else
      out << "d" << std::setw(7) << std::setfill('0') << i << std::setfill(' ');
    out << ',' << std::exp(path.x[i]) << '\n';
  }
}

inline void write_prices(const std::string& filename, const LogPricePath& path) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("write_prices: cannot open " + filename);
  write_prices(out, path);
}

}  // namespace psmc
