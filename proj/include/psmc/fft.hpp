#pragma once

// Thin wrapper over FFTW's 1-d complex transforms. Plans are cached per
// length and shared between threads; plan creation is serialized, execution
// uses the new-array interface which is safe on distinct buffers.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace psmc {

using cvec = std::vector<std::complex<double>>;
using rvec = std::vector<double>;

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {

struct FftPlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Plans are created with FFTW_UNALIGNED so they can execute on any buffer
// regardless of allocator alignment.
inline const FftPlanPair& fft_plans(std::size_t n) {
  static std::mutex mutex;
  static std::unordered_map<std::size_t, FftPlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  cvec a(n), b(n);
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  FftPlanPair pair;
  pair.forward = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_FORWARD,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
  pair.backward = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!pair.forward || !pair.backward) throw std::runtime_error("fft: plan creation failed");
  return cache.emplace(n, pair).first->second;
}

inline void execute(fftw_plan plan, const std::complex<double>* in, std::complex<double>* out) {
  // FFTW does not write through the input pointer for out-of-place plans.
  auto* pin = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in));
  auto* pout = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(plan, pin, pout);
}

}  // namespace detail

// Unnormalized forward DFT: out[k] = sum_t in[t] exp(-2*pi*i*k*t/n).
inline void fft_forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
  detail::execute(detail::fft_plans(n).forward, in, out);
}

// Inverse DFT including the 1/n factor.
inline void fft_inverse(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
  detail::execute(detail::fft_plans(n).backward, in, out);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

inline cvec fft_forward(const cvec& in) {
  cvec out(in.size());
  fft_forward(in.data(), out.data(), in.size());
  return out;
}

inline cvec fft_inverse(const cvec& in) {
  cvec out(in.size());
  fft_inverse(in.data(), out.data(), in.size());
  return out;
}

// Forward DFT of a real signal.
inline cvec fft_forward_real(const rvec& x) {
  cvec in(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) in[i] = x[i];
  return fft_forward(in);
}

}  // namespace psmc
