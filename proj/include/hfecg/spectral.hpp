#pragma once

#include "hfecg/error.hpp"
#include "hfecg/types.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace hfecg {

namespace detail {

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Forward twiddles e^{-i 2 pi k / n}, k < n/2, evaluated directly rather than
// by recurrence.
template <typename Scalar>
std::vector<std::complex<Scalar>> radix2_twiddles(Eigen::Index n) {
  std::vector<std::complex<Scalar>> twiddle(static_cast<std::size_t>(n / 2));
  for (Eigen::Index k = 0; k < n / 2; ++k)
    twiddle[k] = std::polar(Scalar(1), -2 * std::numbers::pi_v<Scalar> *
                                           Scalar(k) / Scalar(n));
  return twiddle;
}

// Plain product; std::complex's operator* also handles infinities and NaNs,
// which costs a library call per butterfly.
template <typename Scalar>
std::complex<Scalar> multiply(std::complex<Scalar> a, std::complex<Scalar> b) {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

template <typename Scalar>
void radix2_fft(ComplexSignal<Scalar> &x, bool inverse,
                const std::vector<std::complex<Scalar>> &twiddle) {
  using Complex = std::complex<Scalar>;
  const Eigen::Index n = x.size();
  for (Eigen::Index i = 1, j = 0; i < n; ++i) {
    Eigen::Index bit = n >> 1;
    for (; j & bit; bit >>= 1)
      j ^= bit;
    j ^= bit;
    if (i < j)
      std::swap(x[i], x[j]);
  }
  for (Eigen::Index len = 2; len <= n; len <<= 1) {
    const Eigen::Index half = len / 2, stride = n / len;
    for (Eigen::Index start = 0; start < n; start += len) {
      for (Eigen::Index k = 0; k < half; ++k) {
        const Complex w = twiddle[k * stride];
        const Complex u = x[start + k];
        const Complex v = multiply(x[start + k + half], inverse ? std::conj(w) : w);
        x[start + k] = u + v;
        x[start + k + half] = u - v;
      }
    }
  }
}

template <typename Scalar>
void radix2_fft(ComplexSignal<Scalar> &x, bool inverse) {
  radix2_fft(x, inverse, radix2_twiddles<Scalar>(x.size()));
}

// Chirp-z (Bluestein) transform for arbitrary lengths.
template <typename Scalar>
void bluestein_fft(ComplexSignal<Scalar> &x, bool inverse) {
  const Eigen::Index n = x.size();
  Eigen::Index m = 1;
  while (m < 2 * n - 1)
    m <<= 1;
  const Scalar sign = inverse ? Scalar(1) : Scalar(-1);
  const std::int64_t period = 2 * static_cast<std::int64_t>(n);
  ComplexSignal<Scalar> chirp(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::int64_t kk = (static_cast<std::int64_t>(k) * k) % period;
    chirp[k] = std::polar(Scalar(1), sign * std::numbers::pi_v<Scalar> *
                                         Scalar(kk) / Scalar(n));
  }
  ComplexSignal<Scalar> a = ComplexSignal<Scalar>::Zero(m);
  ComplexSignal<Scalar> b = ComplexSignal<Scalar>::Zero(m);
  for (Eigen::Index k = 0; k < n; ++k)
    a[k] = multiply(x[k], chirp[k]);
  b[0] = std::conj(chirp[0]);
  for (Eigen::Index k = 1; k < n; ++k)
    b[k] = b[m - k] = std::conj(chirp[k]);
  const auto twiddle = radix2_twiddles<Scalar>(m);
  radix2_fft(a, false, twiddle);
  radix2_fft(b, false, twiddle);
  for (Eigen::Index k = 0; k < m; ++k)
    a[k] = multiply(a[k], b[k]);
  radix2_fft(a, true, twiddle);
  const Scalar scale = Scalar(1) / Scalar(m);
  for (Eigen::Index k = 0; k < n; ++k)
    x[k] = multiply(a[k], chirp[k]) * scale;
}

} // namespace detail

/// Unnormalized forward (e^{-i...}) or inverse (e^{+i...}) transform in place.
template <typename Scalar>
void fft_in_place(ComplexSignal<Scalar> &x, bool inverse = false) {
  if (x.size() <= 1)
    return;
  if (detail::is_power_of_two(x.size()))
    detail::radix2_fft(x, inverse);
  else
    detail::bluestein_fft(x, inverse);
}

template <typename Derived>
auto fft(const Eigen::MatrixBase<Derived> &x) {
  using Scalar = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  ComplexSignal<Scalar> out = x.template cast<std::complex<Scalar>>();
  fft_in_place(out, false);
  return out;
}

// Normalized by 1/N.
template <typename Derived>
auto ifft(const Eigen::MatrixBase<Derived> &c) {
  using Scalar = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  ComplexSignal<Scalar> out = c.template cast<std::complex<Scalar>>();
  fft_in_place(out, true);
  out /= Scalar(out.size());
  return out;
}

/// Coefficients c_k = sum_n x_n e^{-i 2 pi k n / N} and power P_k = |c_k|^2 / N.
template <typename Scalar> struct Spectrum {
  ComplexSignal<Scalar> coefficients;
  Signal<Scalar> power;
  Scalar sampling_rate{1};

  Eigen::Index size() const { return coefficients.size(); }
  Scalar frequency(Eigen::Index k) const {
    return Scalar(k) * sampling_rate / Scalar(size());
  }
};

template <typename Derived>
auto dft(const Eigen::MatrixBase<Derived> &signal,
         typename Derived::Scalar sampling_rate = 1) {
  using Scalar = typename Derived::Scalar;
  if (signal.size() < 1)
    throw DomainError("dft: empty signal");
  Spectrum<Scalar> spec;
  spec.coefficients = fft(signal);
  spec.power = spec.coefficients.cwiseAbs2() / Scalar(signal.size());
  spec.sampling_rate = sampling_rate;
  return spec;
}

template <typename Scalar>
Signal<Scalar> inverse_dft(const Spectrum<Scalar> &spec) {
  return ifft(spec.coefficients).real();
}

template <typename Scalar> struct SpectralPeak {
  Scalar power{};
  Scalar frequency_hz{};
  Eigen::Index bin = 0;
};

/// Maximum power over bins 0..floor(N/2). Bins within a relative 1e-10 of
/// the running maximum count as ties and the lowest bin wins.
template <typename Scalar>
SpectralPeak<Scalar> spectrum_peak(const Spectrum<Scalar> &spec) {
  const Eigen::Index n = spec.size();
  if (n < 2)
    throw DomainError("spectrum_peak: need at least 2 bins");
  SpectralPeak<Scalar> peak{spec.power[0], Scalar(0), 0};
  for (Eigen::Index k = 1; k <= n / 2; ++k) {
    if (spec.power[k] > peak.power + Scalar(1e-10) * peak.power) {
      peak.power = spec.power[k];
      peak.bin = k;
    }
  }
  peak.frequency_hz = spec.frequency(peak.bin);
  return peak;
}

/// Power-weighted mean frequency over bins 0..floor(N/2).
template <typename Scalar> Scalar spectral_centroid(const Spectrum<Scalar> &spec) {
  Scalar weighted{0}, total{0};
  for (Eigen::Index k = 0; k <= spec.size() / 2; ++k) {
    weighted += spec.frequency(k) * spec.power[k];
    total += spec.power[k];
  }
  if (total <= Scalar(0))
    throw DomainError("spectral_centroid: signal has no energy");
  return weighted / total;
}

/// Analytic signal x + iH(x) by the frequency-domain method: negative
/// frequencies zeroed, positive ones doubled, DC and Nyquist kept.
template <typename Derived>
auto hilbert_analytic(const Eigen::MatrixBase<Derived> &signal) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = signal.size();
  if (n < 2)
    throw DomainError("hilbert_analytic: need at least 2 samples");
  ComplexSignal<Scalar> c = fft(signal);
  const Eigen::Index positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (Eigen::Index k = 1; k < positive_end; ++k)
    c[k] *= Scalar(2);
  for (Eigen::Index k = (n % 2 == 0 ? n / 2 + 1 : positive_end); k < n; ++k)
    c[k] = 0;
  ComplexSignal<Scalar> z = ifft(c);
  z.real() = signal;
  return z;
}

template <typename Derived>
auto hilbert_transform(const Eigen::MatrixBase<Derived> &signal) {
  using Scalar = typename Derived::Scalar;
  Signal<Scalar> y = hilbert_analytic(signal).imag();
  return y;
}

/// Adds multiples of 2*pi wherever consecutive phases jump by more than pi.
template <typename Derived>
auto unwrap_phase(const Eigen::MatrixBase<Derived> &phase) {
  using Scalar = typename Derived::Scalar;
  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  Signal<Scalar> out = phase;
  Scalar correction{0};
  for (Eigen::Index i = 1; i < out.size(); ++i) {
    const Scalar jump = phase[i] - phase[i - 1];
    if (jump > std::numbers::pi_v<Scalar>)
      correction -= two_pi * std::ceil((jump - std::numbers::pi_v<Scalar>) / two_pi);
    else if (jump < -std::numbers::pi_v<Scalar>)
      correction += two_pi * std::ceil((-jump - std::numbers::pi_v<Scalar>) / two_pi);
    out[i] = phase[i] + correction;
  }
  return out;
}

// Fs / (2 pi) * diff(unwrap(angle(z))), length N - 1.
template <typename Derived>
auto instantaneous_frequency(const Eigen::MatrixBase<Derived> &signal,
                             typename Derived::Scalar sampling_rate) {
  using Scalar = typename Derived::Scalar;
  if (signal.size() < 3)
    throw DomainError("instantaneous_frequency: need at least 3 samples");
  if (signal.cwiseAbs().maxCoeff() == Scalar(0))
    throw DomainError("instantaneous_frequency: phase of an all-zero signal is undefined");
  const ComplexSignal<Scalar> z = hilbert_analytic(signal);
  Signal<Scalar> phase(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    phase[i] = std::arg(z[i]);
  const Signal<Scalar> unwrapped = unwrap_phase(phase);
  const Eigen::Index n = unwrapped.size();
  Signal<Scalar> freq =
      (unwrapped.tail(n - 1) - unwrapped.head(n - 1)) *
      (sampling_rate / (2 * std::numbers::pi_v<Scalar>));
  return freq;
}

template <typename Derived>
auto mean_instantaneous_frequency(const Eigen::MatrixBase<Derived> &signal,
                                  typename Derived::Scalar sampling_rate) {
  return instantaneous_frequency(signal, sampling_rate).mean();
}

} // namespace hfecg
