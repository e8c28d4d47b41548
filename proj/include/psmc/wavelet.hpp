#pragma once

// Frequency-domain filter bank built from the degree-3 spline orthonormal
// wavelet. All filters live on the N-point DFT grid. Band-pass filters are
// analytic (supported on strictly positive frequencies only); the low-pass
// keeps a symmetric real spectrum. After pointwise renormalization the bank
// satisfies an exact discrete Littlewood-Paley identity,
//   sum_j psi_hat_j(w)^2 + phi_hat(w)^2 = 1  for every grid frequency in
//   (0, pi],
// and the transform below applies sqrt(2) gain on proper positive bins so
// that it is an isometry on real signals.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "psmc/fft.hpp"

namespace psmc {

namespace detail {

inline double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

inline double pow4(double v) {
  double v2 = v * v;
  return v2 * v2;
}

inline double pow8(double v) {
  double v4 = pow4(v);
  return v4 * v4;
}

// Spectral autocorrelation of the cubic B-spline,
//   A(w) = sum_k |Bhat(w + 2 pi k)|^2  with  Bhat(w) = sinc(w/2)^4.
// A is 2 pi periodic and the terms decay like k^-8, so a modest truncation
// is accurate to ~1e-13. The argument is reduced mod 2 pi first so the
// truncated window always brackets the dominant lattice points.
inline double spline_autocorrelation(double omega) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = omega - two_pi * std::floor(omega / two_pi);
  double sum = 0.0;
  for (int k = -64; k <= 64; ++k) {
    sum += pow8(sinc(0.5 * (w + two_pi * k)));
  }
  return sum;
}

// Arguments beyond this point contribute less than ~1e-21 in squared
// magnitude and are treated as zero.
constexpr double kSpectrumCutoff = 1024.0;

}  // namespace detail

// Orthonormalized spline scaling spectrum, phi_hat(w) = Bhat(w)/sqrt(A(w)).
inline double spline_scaling_hat(double omega) {
  double w = std::abs(omega);
  if (w >= detail::kSpectrumCutoff) return 0.0;
  return detail::pow4(detail::sinc(0.5 * w)) / std::sqrt(detail::spline_autocorrelation(w));
}

// Modulus of the spline wavelet spectrum. Supported on w > 0 (the analytic
// convention), peaked inside [pi, 2 pi], with a fourth-order zero at w = 0.
inline double spline_wavelet_hat(double omega) {
  if (omega <= 0.0 || omega >= detail::kSpectrumCutoff) return 0.0;
  const double h = 0.5 * omega, q = 0.25 * omega;
  const double s4 = detail::pow4(std::sin(q));
  const double b4 = detail::pow4(detail::sinc(q));
  const double a_num = detail::spline_autocorrelation(h + std::numbers::pi);
  const double a_den =
      detail::spline_autocorrelation(omega) * detail::spline_autocorrelation(h);
  return s4 * b4 * std::sqrt(a_num / a_den);
}

struct FilterBank {
  int num_scales = 0;          // J
  std::size_t signal_length = 0;  // N, a power of two
  // psi_hat[j-1][n]: unit Littlewood-Paley band-pass spectra, zero outside
  // grid bins 1..N/2. The spectra are real valued; the corresponding time
  // filters are complex analytic wavelets.
  std::vector<rvec> psi_hat;
  // Symmetric low-pass spectrum with phi_hat[0] = 1.
  rvec phi_hat;
  // Energy-preserving multipliers actually applied by the transform:
  // sqrt(2) * psi_hat on bins 0 < n < N/2 and psi_hat itself at Nyquist.
  std::vector<rvec> multiplier;
};

inline FilterBank build_filter_bank(std::size_t signal_length, int num_scales) {
  if (!is_power_of_two(signal_length) || signal_length < 4)
    throw std::invalid_argument("build_filter_bank: signal length must be a power of two >= 4");
  if (num_scales < 1 || (std::size_t{1} << num_scales) >= signal_length)
    throw std::invalid_argument("build_filter_bank: need 1 <= J and 2^J < N");

  const std::size_t n_total = signal_length, half = signal_length / 2;
  const int j_max = num_scales;
  FilterBank bank;
  bank.num_scales = j_max;
  bank.signal_length = n_total;
  bank.psi_hat.assign(j_max, rvec(n_total, 0.0));
  bank.phi_hat.assign(n_total, 0.0);
  bank.phi_hat[0] = 1.0;

  const double w0 = 2.0 * std::numbers::pi / static_cast<double>(n_total);
  for (std::size_t n = 1; n <= half; ++n) {
    const double omega = w0 * static_cast<double>(n);
    double stack = 0.0;
    for (int j = 1; j <= j_max; ++j) {
      const double v = spline_wavelet_hat(std::ldexp(omega, j));
      bank.psi_hat[j - 1][n] = v;
      stack += v * v;
    }
    // The tail sum over scales beyond J telescopes to the scaling spectrum
    // dilated to scale 2^J.
    const double low = spline_scaling_hat(std::ldexp(omega, j_max));
    stack += low * low;
    const double rescale = 1.0 / std::sqrt(stack);
    for (int j = 1; j <= j_max; ++j) bank.psi_hat[j - 1][n] *= rescale;
    bank.phi_hat[n] = low * rescale;
  }
  for (std::size_t n = 1; n < half; ++n) bank.phi_hat[n_total - n] = bank.phi_hat[n];

  bank.multiplier.assign(j_max, rvec(n_total, 0.0));
  const double root2 = std::numbers::sqrt2;
  for (int j = 0; j < j_max; ++j) {
    for (std::size_t n = 1; n < half; ++n)
      bank.multiplier[j][n] = root2 * bank.psi_hat[j][n];
    bank.multiplier[j][half] = bank.psi_hat[j][half];
  }
  return bank;
}

struct WaveletCoefficients {
  int num_scales = 0;
  std::size_t signal_length = 0;
  // values[j-1] for j = 1..J are the band-pass channels; values[J] is the
  // low-pass channel (real content, stored complex for uniformity).
  std::vector<cvec> values;
};

inline cvec apply_real_multiplier(const cvec& spectrum, const rvec& mult) {
  cvec shaped(spectrum.size());
  for (std::size_t n = 0; n < spectrum.size(); ++n) shaped[n] = spectrum[n] * mult[n];
  return fft_inverse(shaped);
}

inline WaveletCoefficients wavelet_transform(const rvec& x, const FilterBank& bank) {
  if (x.size() != bank.signal_length)
    throw std::invalid_argument("wavelet_transform: signal length does not match bank");
  WaveletCoefficients coeffs;
  coeffs.num_scales = bank.num_scales;
  coeffs.signal_length = bank.signal_length;
  coeffs.values.reserve(bank.num_scales + 1);
  const cvec spectrum = fft_forward_real(x);
  for (int j = 0; j < bank.num_scales; ++j)
    coeffs.values.push_back(apply_real_multiplier(spectrum, bank.multiplier[j]));
  coeffs.values.push_back(apply_real_multiplier(spectrum, bank.phi_hat));
  return coeffs;
}

}  // namespace psmc
