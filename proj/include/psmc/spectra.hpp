#pragma once

// Scattering spectra of a real signal: per-scale sparsity and variance,
// cross-scale phase correlations, scale-pair envelope correlations, and
// smoothed sign moments of lagged increments. One engine instance owns all
// workspace buffers and can also back-propagate the squared distance to a
// target through the whole pipeline (FFTs, smoothed modulus, time averages,
// normalizing ratios, sigmoid), which is what the path sampler consumes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "psmc/fft.hpp"
#include "psmc/random.hpp"
#include "psmc/wavelet.hpp"

#include <Eigen/Dense>

namespace psmc {

enum class SpectrumKind { phi1, phi2, phi3, phi4, sign_moment };

struct SpectraDescriptor {
  SpectrumKind kind = SpectrumKind::phi1;
  // phi1/phi2/sign_moment use j; phi3 uses (j, jp) with j >= jp;
  // phi4 uses (j, jp, j2) for the pair (j1, j1') under envelope scale j2,
  // with j <= jp < j2.
  int j = 0;
  int jp = 0;
  int j2 = 0;

  bool complex_valued() const {
    return kind == SpectrumKind::phi3 || kind == SpectrumKind::phi4;
  }
  friend bool operator==(const SpectraDescriptor&, const SpectraDescriptor&) = default;
};

struct SpectraIndex {
  int num_scales = 0;
  std::vector<SpectraDescriptor> entries;

  std::size_t size() const { return entries.size(); }
  friend bool operator==(const SpectraIndex&, const SpectraIndex&) = default;

  // Canonical ordering: phi1, phi2, phi3, phi4, sign moments, each block in
  // lexicographic scale order.
  static SpectraIndex standard(int num_scales) {
    SpectraIndex index;
    index.num_scales = num_scales;
    auto& e = index.entries;
    for (int j = 1; j <= num_scales; ++j) e.push_back({SpectrumKind::phi1, j});
    for (int j = 1; j <= num_scales; ++j) e.push_back({SpectrumKind::phi2, j});
    for (int j = 1; j <= num_scales; ++j)
      for (int jp = 1; jp <= j; ++jp) e.push_back({SpectrumKind::phi3, j, jp});
    for (int j1 = 1; j1 <= num_scales; ++j1)
      for (int j1p = j1; j1p <= num_scales; ++j1p)
        for (int j2 = j1p + 1; j2 <= num_scales; ++j2)
          e.push_back({SpectrumKind::phi4, j1, j1p, j2});
    for (int j = 1; j <= num_scales; ++j) e.push_back({SpectrumKind::sign_moment, j});
    return index;
  }
};

struct ScatteringSpectra {
  SpectraIndex index;
  cvec values;

  double norm() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s);
  }
};

inline double spectra_distance(const ScatteringSpectra& a, const ScatteringSpectra& b) {
  if (!(a.index == b.index)) throw std::invalid_argument("spectra_distance: index mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(s);
}

namespace detail {

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace detail

// Computes scattering spectra and, on demand, the gradient of the squared
// distance to a target. Owns preallocated workspaces; one instance per
// thread. modulus_smoothing is the relative level eps_m of the smoothed
// modulus |z| ~ sqrt(|z|^2 + eps^2) with eps = eps_m * sqrt(<|W_j x|^2>),
// frozen per evaluation (its own x-dependence contributes O(eps_m^2)
// relative gradient error, far below any tolerance used here).
class SpectraEngine {
 public:
  explicit SpectraEngine(const FilterBank& bank, double modulus_smoothing = 0.0)
      : bank_(&bank),
        eps_rel_(modulus_smoothing),
        n_(bank.signal_length),
        j_max_(bank.num_scales),
        index_(SpectraIndex::standard(bank.num_scales)) {
    if (modulus_smoothing < 0.0)
      throw std::invalid_argument("SpectraEngine: modulus smoothing must be >= 0");
    const std::size_t pairs = pair_count();
    x_.resize(n_);
    xspec_.resize(n_);
    w_.assign(j_max_, cvec(n_));
    u_.assign(j_max_, rvec(n_));
    uhat_.assign(j_max_, cvec(n_));
    v_.assign(pairs, cvec(n_));
    s2_.assign(j_max_, 0.0);
    eps_.assign(j_max_, 0.0);
    m1_.assign(j_max_, 0.0);
    tmp_.resize(n_);
    values_.resize(index_.size());
  }

  const SpectraIndex& index() const { return index_; }
  const FilterBank& bank() const { return *bank_; }

  ScatteringSpectra compute(const rvec& x) {
    forward(x);
    return ScatteringSpectra{index_, values_};
  }

  double loss(const rvec& x, const ScatteringSpectra& target) {
    check_target(target);
    forward(x);
    double l = 0.0;
    for (std::size_t e = 0; e < values_.size(); ++e) l += std::norm(values_[e] - target.values[e]);
    return l;
  }

  // Squared distance to the target and its gradient with respect to x.
  double loss_and_gradient(const rvec& x, const ScatteringSpectra& target, rvec& grad) {
    check_target(target);
    forward(x);
    ensure_adjoint_buffers();
    const double inv_n = 1.0 / static_cast<double>(n_);

    double l = 0.0;
    std::fill(s2_adj_.begin(), s2_adj_.end(), 0.0);
    std::fill(m1_adj_.begin(), m1_adj_.end(), 0.0);
    std::fill(x_adj_.begin(), x_adj_.end(), 0.0);
    for (auto& b : w_adj_) std::fill(b.begin(), b.end(), std::complex<double>{});
    for (auto& b : u_adj_) std::fill(b.begin(), b.end(), 0.0);
    for (auto& b : uhat_adj_) std::fill(b.begin(), b.end(), std::complex<double>{});
    for (auto& b : v_adj_) std::fill(b.begin(), b.end(), std::complex<double>{});
    std::fill(xspec_adj_.begin(), xspec_adj_.end(), std::complex<double>{});

    for (std::size_t e = 0; e < index_.entries.size(); ++e) {
      const auto& d = index_.entries[e];
      const std::complex<double> val = values_[e];
      const std::complex<double> delta = val - target.values[e];
      l += std::norm(delta);
      const std::complex<double> eadj = 2.0 * delta;
      const double eadj_re = eadj.real();
      switch (d.kind) {
        case SpectrumKind::phi1: {
          const int j = d.j - 1;
          m1_adj_[j] += eadj_re * 2.0 * m1_[j] / s2_[j];
          s2_adj_[j] -= eadj_re * m1_[j] * m1_[j] / (s2_[j] * s2_[j]);
          break;
        }
        case SpectrumKind::phi2:
          s2_adj_[d.j - 1] += eadj_re;
          break;
        case SpectrumKind::phi3: {
          const int j = d.j - 1, jp = d.jp - 1;
          const double denom = std::sqrt(s2_[j] * s2_[jp]);
          const std::complex<double> c3_adj = eadj / denom;
          const double pull = std::real(std::conj(eadj) * val);
          s2_adj_[j] -= pull / (2.0 * s2_[j]);
          s2_adj_[jp] -= pull / (2.0 * s2_[jp]);
          const auto& wj = w_[j];
          const auto& ujp = u_[jp];
          auto& wadj = w_adj_[j];
          auto& uadj = u_adj_[jp];
          for (std::size_t t = 0; t < n_; ++t) {
            wadj[t] += c3_adj * (ujp[t] * inv_n);
            uadj[t] += std::real(std::conj(c3_adj) * wj[t]) * inv_n;
          }
          break;
        }
        case SpectrumKind::phi4: {
          const int j1 = d.j - 1, j1p = d.jp - 1;
          const double denom = std::sqrt(s2_[j1] * s2_[j1p]);
          const std::complex<double> c4_adj = eadj / denom;
          const double pull = std::real(std::conj(eadj) * val);
          s2_adj_[j1] -= pull / (2.0 * s2_[j1]);
          s2_adj_[j1p] -= pull / (2.0 * s2_[j1p]);
          const auto& va = v_[pair_offset(d.j, d.j2)];
          const auto& vb = v_[pair_offset(d.jp, d.j2)];
          auto& va_adj = v_adj_[pair_offset(d.j, d.j2)];
          auto& vb_adj = v_adj_[pair_offset(d.jp, d.j2)];
          const std::complex<double> c4_adj_conj = std::conj(c4_adj);
          for (std::size_t t = 0; t < n_; ++t) {
            va_adj[t] += c4_adj * (vb[t] * inv_n);
            vb_adj[t] += c4_adj_conj * (va[t] * inv_n);
          }
          break;
        }
        case SpectrumKind::sign_moment: {
          const std::size_t lag = std::size_t{1} << d.j;
          for (std::size_t t = 0; t < n_; ++t) {
            const std::size_t tl = (t + n_ - lag) % n_;
            const double s = detail::sigmoid(x_[t] - x_[tl]);
            const double g = eadj_re * s * (1.0 - s) * inv_n;
            x_adj_[t] += g;
            x_adj_[tl] -= g;
          }
          break;
        }
      }
    }

    // Envelope second stage: V = ifft(fft(U) * m_{j2}).
    for (int j2 = 2; j2 <= j_max_; ++j2) {
      const auto& mult = bank_->multiplier[j2 - 1];
      for (int j1 = 1; j1 < j2; ++j1) {
        auto& vadj = v_adj_[pair_offset(j1, j2)];
        fft_forward(vadj.data(), tmp_.data(), n_);
        auto& uh_adj = uhat_adj_[j1 - 1];
        for (std::size_t t = 0; t < n_; ++t) uh_adj[t] += mult[t] * (tmp_[t] * inv_n);
      }
    }
    for (int j = 0; j < j_max_; ++j) {
      auto& uh_adj = uhat_adj_[j];
      for (std::size_t t = 0; t < n_; ++t) uh_adj[t] = std::conj(uh_adj[t]);
      fft_forward(uh_adj.data(), tmp_.data(), n_);
      auto& uadj = u_adj_[j];
      const double m1a = m1_adj_[j] * inv_n;
      for (std::size_t t = 0; t < n_; ++t) uadj[t] += tmp_[t].real() + m1a;
    }
    // Smoothed modulus and per-scale energies back to the wavelet fields.
    for (int j = 0; j < j_max_; ++j) {
      const auto& wj = w_[j];
      const auto& uj = u_[j];
      const auto& uadj = u_adj_[j];
      auto& wadj = w_adj_[j];
      const double s2a = s2_adj_[j] * 2.0 * inv_n;
      for (std::size_t t = 0; t < n_; ++t) {
        if (uj[t] > 0.0) wadj[t] += (uadj[t] / uj[t]) * wj[t];
        wadj[t] += s2a * wj[t];
      }
    }
    for (int j = 0; j < j_max_; ++j) {
      fft_forward(w_adj_[j].data(), tmp_.data(), n_);
      const auto& mult = bank_->multiplier[j];
      for (std::size_t t = 0; t < n_; ++t) xspec_adj_[t] += mult[t] * (tmp_[t] * inv_n);
    }
    for (std::size_t t = 0; t < n_; ++t) xspec_adj_[t] = std::conj(xspec_adj_[t]);
    fft_forward(xspec_adj_.data(), tmp_.data(), n_);

    // Adjoint of the wrap-ramp removal: the ramp slope reads x[N-1] - x[0],
    // so the accumulated ramp pull flows back into those two samples.
    grad.resize(n_);
    double ramp_pull = 0.0;
    for (std::size_t t = 0; t < n_; ++t) {
      const double gy = tmp_[t].real();
      grad[t] = gy + x_adj_[t];
      ramp_pull += gy * static_cast<double>(t);
    }
    ramp_pull /= static_cast<double>(n_ - 1);
    grad[0] += ramp_pull;
    grad[n_ - 1] -= ramp_pull;
    return l;
  }

 private:
  std::size_t pair_count() const {
    return static_cast<std::size_t>(j_max_) * (j_max_ - 1) / 2;
  }
  // Pairs (j1, j2), 1 <= j1 < j2 <= J, ordered by j2 then j1.
  std::size_t pair_offset(int j1, int j2) const {
    return static_cast<std::size_t>(j2 - 1) * (j2 - 2) / 2 + (j1 - 1);
  }

  void check_target(const ScatteringSpectra& target) const {
    if (!(target.index == index_))
      throw std::invalid_argument("spectra target has mismatched index");
  }

  void forward(const rvec& x) {
    if (x.size() != n_) throw std::invalid_argument("compute_spectra: length mismatch with bank");
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (!(*mn < *mx)) throw std::domain_error("compute_spectra: constant input is degenerate");

    x_ = x;
    // The wavelet statistics treat the window as a stationary increment
    // process (the band filters act on increments, appendix-style theta
    // filtering). A plain circular transform of a random-walk window would
    // smear the artificial wrap-around jump x[0] - x[N-1] across every band,
    // so the ramp closing that jump is removed first. Sign moments keep the
    // raw increments: they measure drift asymmetry on purpose.
    const double wrap_slope = (x[n_ - 1] - x[0]) / static_cast<double>(n_ - 1);
    for (std::size_t t = 0; t < n_; ++t)
      tmp_[t] = x[t] - wrap_slope * static_cast<double>(t);
    fft_forward(tmp_.data(), xspec_.data(), n_);

    const double inv_n = 1.0 / static_cast<double>(n_);
    for (int j = 0; j < j_max_; ++j) {
      const auto& mult = bank_->multiplier[j];
      for (std::size_t t = 0; t < n_; ++t) tmp_[t] = xspec_[t] * mult[t];
      fft_inverse(tmp_.data(), w_[j].data(), n_);
      double s2 = 0.0;
      for (const auto& z : w_[j]) s2 += std::norm(z);
      s2 *= inv_n;
      if (!(s2 > 0.0))
        throw std::domain_error("compute_spectra: no energy at one of the scales");
      s2_[j] = s2;
      eps_[j] = eps_rel_ * std::sqrt(s2);
      const double eps2 = eps_[j] * eps_[j];
      double m1 = 0.0;
      auto& uj = u_[j];
      for (std::size_t t = 0; t < n_; ++t) {
        uj[t] = std::sqrt(std::norm(w_[j][t]) + eps2);
        m1 += uj[t];
      }
      m1_[j] = m1 * inv_n;
      for (std::size_t t = 0; t < n_; ++t) tmp_[t] = uj[t];
      fft_forward(tmp_.data(), uhat_[j].data(), n_);
    }
    for (int j2 = 2; j2 <= j_max_; ++j2) {
      const auto& mult = bank_->multiplier[j2 - 1];
      for (int j1 = 1; j1 < j2; ++j1) {
        const auto& uh = uhat_[j1 - 1];
        for (std::size_t t = 0; t < n_; ++t) tmp_[t] = uh[t] * mult[t];
        fft_inverse(tmp_.data(), v_[pair_offset(j1, j2)].data(), n_);
      }
    }

    for (std::size_t e = 0; e < index_.entries.size(); ++e) {
      const auto& d = index_.entries[e];
      switch (d.kind) {
        case SpectrumKind::phi1: {
          const int j = d.j - 1;
          values_[e] = m1_[j] * m1_[j] / s2_[j];
          break;
        }
        case SpectrumKind::phi2:
          values_[e] = s2_[d.j - 1];
          break;
        case SpectrumKind::phi3: {
          const int j = d.j - 1, jp = d.jp - 1;
          std::complex<double> c3{};
          const auto& wj = w_[j];
          const auto& ujp = u_[jp];
          for (std::size_t t = 0; t < n_; ++t) c3 += wj[t] * ujp[t];
          values_[e] = c3 * inv_n / std::sqrt(s2_[j] * s2_[jp]);
          break;
        }
        case SpectrumKind::phi4: {
          const auto& va = v_[pair_offset(d.j, d.j2)];
          const auto& vb = v_[pair_offset(d.jp, d.j2)];
          std::complex<double> c4{};
          for (std::size_t t = 0; t < n_; ++t) c4 += va[t] * std::conj(vb[t]);
          values_[e] = c4 * inv_n / std::sqrt(s2_[d.j - 1] * s2_[d.jp - 1]);
          break;
        }
        case SpectrumKind::sign_moment: {
          const std::size_t lag = std::size_t{1} << d.j;
          double s = 0.0;
          for (std::size_t t = 0; t < n_; ++t)
            s += detail::sigmoid(x[t] - x[(t + n_ - lag) % n_]);
          values_[e] = s * inv_n;
          break;
        }
      }
    }
  }

  void ensure_adjoint_buffers() {
    if (!w_adj_.empty()) return;
    w_adj_.assign(j_max_, cvec(n_));
    u_adj_.assign(j_max_, rvec(n_));
    uhat_adj_.assign(j_max_, cvec(n_));
    v_adj_.assign(pair_count(), cvec(n_));
    xspec_adj_.resize(n_);
    s2_adj_.assign(j_max_, 0.0);
    m1_adj_.assign(j_max_, 0.0);
    x_adj_.assign(n_, 0.0);
  }

  const FilterBank* bank_;
  double eps_rel_;
  std::size_t n_;
  int j_max_;
  SpectraIndex index_;

  rvec x_;
  cvec xspec_, tmp_;
  std::vector<cvec> w_, uhat_, v_;
  std::vector<rvec> u_;
  rvec s2_, eps_, m1_;
  cvec values_;

  std::vector<cvec> w_adj_, uhat_adj_, v_adj_;
  std::vector<rvec> u_adj_;
  cvec xspec_adj_;
  rvec s2_adj_, m1_adj_, x_adj_;
};

inline ScatteringSpectra compute_spectra(const rvec& x, const FilterBank& bank) {
  SpectraEngine engine(bank);
  return engine.compute(x);
}

inline int default_num_scales(std::size_t signal_length) {
  int log2n = 0;
  while ((std::size_t{1} << (log2n + 1)) <= signal_length) ++log2n;
  return std::max(1, log2n - 3);
}

// Spectra of a signal of arbitrary length: the signal is extended with its
// last value up to the next power of two before the transform. The flat
// extension is spectrally quiet and the transform itself closes the wrap
// ramp, but the pad corner still perturbs nearby coefficients, so this is an
// approximation intended for data ingestion, not for the exact-identity
// tests.
inline ScatteringSpectra compute_spectra_padded(const rvec& x, int num_scales = 0) {
  if (x.size() < 4) throw std::invalid_argument("compute_spectra_padded: input too short");
  std::size_t padded = 1;
  while (padded < x.size()) padded <<= 1;
  rvec y(padded, x.back() - x.front());
  for (std::size_t t = 0; t < x.size(); ++t) y[t] = x[t] - x[0];
  if (num_scales <= 0) num_scales = default_num_scales(padded);
  FilterBank bank = build_filter_bank(padded, num_scales);
  return compute_spectra(y, bank);
}

enum class PerturbComponent { phi1, phi3_modulus, phi4, imaginary_parts };

// Interpolates one component of the target against a Gaussian-process
// reference: value <- (1 - lambda) * reference + lambda * target, applied to
// the selected component only. lambda = 1 returns the target unchanged;
// lambda > 1 extrapolates away from the reference.
inline ScatteringSpectra perturb_spectra(const ScatteringSpectra& target,
                                         const ScatteringSpectra& gaussian_ref,
                                         PerturbComponent component, double lambda) {
  if (!(target.index == gaussian_ref.index))
    throw std::invalid_argument("perturb_spectra: index mismatch");
  if (lambda < 0.0) throw std::invalid_argument("perturb_spectra: lambda must be >= 0");
  ScatteringSpectra out = target;
  const double mu = 1.0 - lambda;
  for (std::size_t e = 0; e < out.values.size(); ++e) {
    const auto& d = target.index.entries[e];
    const std::complex<double> tv = target.values[e];
    const std::complex<double> rv = gaussian_ref.values[e];
    switch (component) {
      case PerturbComponent::phi1:
        if (d.kind == SpectrumKind::phi1)
          out.values[e] = {mu * rv.real() + lambda * tv.real(), tv.imag()};
        break;
      case PerturbComponent::phi3_modulus:
        if (d.kind == SpectrumKind::phi3) {
          const double mt = std::abs(tv);
          const double mixed = mu * std::abs(rv) + lambda * mt;
          out.values[e] = mt > 0.0 ? tv * (mixed / mt) : std::complex<double>{mixed, 0.0};
        }
        break;
      case PerturbComponent::phi4:
        if (d.kind == SpectrumKind::phi4) out.values[e] = mu * rv + lambda * tv;
        break;
      case PerturbComponent::imaginary_parts:
        out.values[e] = {tv.real(), mu * rv.imag() + lambda * tv.imag()};
        break;
    }
  }
  return out;
}

// Reference spectra of a Gaussian process whose per-scale variances match
// the target. Components with known closed forms are set exactly (phi1 =
// pi/4, phi3 = 0, sign moments = 1/2, phi2 copied); the envelope
// correlations phi4 have no closed form and are Monte-Carlo averaged over
// stationary Gaussian surrogates whose spectrum is shaped to reproduce the
// target phi2, with the imaginary part zeroed (a stationary Gaussian
// process is time-reversible).
inline ScatteringSpectra gaussian_reference_spectra(const ScatteringSpectra& target,
                                                    const FilterBank& bank,
                                                    int num_realizations = 16,
                                                    std::uint64_t seed = 7) {
  if (target.index.num_scales != bank.num_scales)
    throw std::invalid_argument("gaussian_reference_spectra: bank does not match target index");
  const int j_max = bank.num_scales;
  const std::size_t n = bank.signal_length;

  rvec phi2(j_max, 0.0);
  for (std::size_t e = 0; e < target.index.entries.size(); ++e) {
    const auto& d = target.index.entries[e];
    if (d.kind == SpectrumKind::phi2) phi2[d.j - 1] = target.values[e].real();
  }

  // Solve for band weights c such that the shaped spectrum
  // A^2 = sum_k c_k m_k^2 reproduces the target per-scale variances.
  Eigen::MatrixXd gram(j_max, j_max);
  for (int a = 0; a < j_max; ++a)
    for (int b = a; b < j_max; ++b) {
      double g = 0.0;
      for (std::size_t t = 0; t < n; ++t)
        g += bank.multiplier[a][t] * bank.multiplier[a][t] * bank.multiplier[b][t] *
             bank.multiplier[b][t];
      gram(a, b) = gram(b, a) = g / static_cast<double>(n);
    }
  Eigen::VectorXd rhs(j_max);
  for (int a = 0; a < j_max; ++a) rhs(a) = phi2[a];
  Eigen::VectorXd c = (gram + 1e-12 * Eigen::MatrixXd::Identity(j_max, j_max)).ldlt().solve(rhs);
  rvec envelope(n, 0.0);
  for (std::size_t t = 1; t < n; ++t) {
    double a2 = 0.0;
    for (int k = 0; k < j_max; ++k)
      a2 += std::max(0.0, c(k)) * bank.multiplier[k][t] * bank.multiplier[k][t];
    envelope[t] = std::sqrt(a2);
  }
  for (std::size_t t = 1; t < n / 2; ++t) {
    const double sym = std::max(envelope[t], envelope[n - t]);
    envelope[t] = envelope[n - t] = sym;
  }
  double total = 0.0;
  for (double v : envelope) total += v;
  if (!(total > 0.0))
    throw std::domain_error("gaussian_reference_spectra: degenerate target variances");

  ScatteringSpectra ref;
  ref.index = target.index;
  ref.values.assign(target.values.size(), {});
  SpectraEngine engine(bank);
  for (int r = 0; r < num_realizations; ++r) {
    rvec white = normal_vector(n, derive_seed(seed, static_cast<std::uint64_t>(r)));
    cvec spec = fft_forward_real(white);
    for (std::size_t t = 0; t < n; ++t) spec[t] *= envelope[t];
    cvec shaped = fft_inverse(spec);
    rvec path(n);
    for (std::size_t t = 0; t < n; ++t) path[t] = shaped[t].real();
    ScatteringSpectra sample = engine.compute(path);
    for (std::size_t e = 0; e < ref.values.size(); ++e) ref.values[e] += sample.values[e];
  }
  const double inv = 1.0 / static_cast<double>(num_realizations);
  for (std::size_t e = 0; e < ref.values.size(); ++e) {
    const auto& d = target.index.entries[e];
    switch (d.kind) {
      case SpectrumKind::phi1:
        ref.values[e] = std::numbers::pi / 4.0;
        break;
      case SpectrumKind::phi2:
        ref.values[e] = phi2[d.j - 1];
        break;
      case SpectrumKind::phi3:
        ref.values[e] = 0.0;
        break;
      case SpectrumKind::phi4:
        ref.values[e] = std::complex<double>{ref.values[e].real() * inv, 0.0};
        break;
      case SpectrumKind::sign_moment:
        ref.values[e] = 0.5;
        break;
    }
  }
  return ref;
}

}  // namespace psmc
