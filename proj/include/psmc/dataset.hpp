#pragma once

// On-disk path dataset. Fixed little-endian layout:
//   bytes 0..7    magic "PSMCPATH"
//   bytes 8..11   u32 version (1)
//   bytes 12..15  u32 reserved (0)
//   bytes 16..23  u64 path count
//   bytes 24..31  u64 path length N
//   count * N     f64 path samples, paths stored contiguously in order
//   count records u64 seed, f64 final_loss, u8 converged
// Round-trips are bit exact.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psmc/fft.hpp"

namespace psmc {

struct PathMeta {
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  bool converged = false;
};

struct PathDataset {
  std::vector<rvec> paths;
  std::vector<PathMeta> meta;

  std::size_t count() const { return paths.size(); }
  std::size_t path_length() const { return paths.empty() ? 0 : paths.front().size(); }
};

namespace detail {

inline void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& buf, double v) {
  put_u64(buf, std::bit_cast<std::uint64_t>(v));
}

struct ByteReader {
  const unsigned char* p;
  const unsigned char* end;
  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end - p) < n)
      throw std::runtime_error("path dataset: truncated file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    p += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  unsigned char u8() {
    need(1);
    return *p++;
  }
};

}  // namespace detail

inline constexpr char kDatasetMagic[8] = {'P', 'S', 'M', 'C', 'P', 'A', 'T', 'H'};

inline void save_dataset(const PathDataset& dataset, const std::string& filename) {
  const std::size_t count = dataset.count();
  if (dataset.meta.size() != count)
    throw std::invalid_argument("save_dataset: metadata size does not match path count");
  const std::size_t n = dataset.path_length();
  for (const auto& p : dataset.paths)
    if (p.size() != n) throw std::invalid_argument("save_dataset: ragged path lengths");

  std::string buf;
  buf.reserve(32 + count * (n * 8 + 17));
  buf.append(kDatasetMagic, 8);
  detail::put_u32(buf, 1);
  detail::put_u32(buf, 0);
  detail::put_u64(buf, count);
  detail::put_u64(buf, n);
  for (const auto& path : dataset.paths)
    for (double v : path) detail::put_f64(buf, v);
  for (const auto& m : dataset.meta) {
    detail::put_u64(buf, m.seed);
    detail::put_f64(buf, m.final_loss);
    buf.push_back(m.converged ? 1 : 0);
  }

  std::ofstream out(filename, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + filename);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("save_dataset: write failed for " + filename);
}

inline PathDataset load_dataset(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + filename);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* base = reinterpret_cast<const unsigned char*>(buf.data());
  detail::ByteReader reader{base, base + buf.size()};

  reader.need(8);
  if (std::memcmp(reader.p, kDatasetMagic, 8) != 0)
    throw std::runtime_error("load_dataset: bad magic in " + filename);
  reader.p += 8;
  const std::uint32_t version = reader.u32();
  if (version != 1) throw std::runtime_error("load_dataset: unsupported version");
  reader.u32();  // reserved
  const std::uint64_t count = reader.u64();
  const std::uint64_t n = reader.u64();
  if (count > 0 && n == 0) throw std::runtime_error("load_dataset: zero path length");

  PathDataset dataset;
  dataset.paths.assign(count, rvec(n));
  dataset.meta.assign(count, PathMeta{});
  for (auto& path : dataset.paths)
    for (auto& v : path) v = reader.f64();
  for (auto& m : dataset.meta) {
    m.seed = reader.u64();
    m.final_loss = reader.f64();
    m.converged = reader.u8() != 0;
  }
  if (reader.p != reader.end) throw std::runtime_error("load_dataset: trailing bytes");
  return dataset;
}

}  // namespace psmc
