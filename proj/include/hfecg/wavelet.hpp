#pragma once

#include "hfecg/error.hpp"
#include "hfecg/types.hpp"

#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hfecg {

// symmetric: half-point symmetric continuation, coefficient length
//            floor((n + L - 1) / 2).
// periodic:  periodization, length n / 2; every level's input must be even.
enum class ExtensionMode { symmetric, periodic };

std::string_view to_string(ExtensionMode mode);
std::optional<ExtensionMode> parse_extension_mode(std::string_view text);

inline constexpr int kMaxLevels = 16;

/// Orthogonal two-channel filter bank. `lowpass` holds h_k, `highpass` the
/// quadrature mirror g_n = (-1)^n h_{L-1-n}. `center_frequency` is the
/// wavelet's dominant frequency as a fraction of the Nyquist frequency.
template <typename Scalar> struct WaveletBank {
  std::string name;
  Signal<Scalar> lowpass;
  Signal<Scalar> highpass;
  Scalar center_frequency{};

  Eigen::Index length() const { return lowpass.size(); }

  template <typename Other> WaveletBank<Other> cast() const {
    return {name, lowpass.template cast<Other>(),
            highpass.template cast<Other>(),
            static_cast<Other>(center_frequency)};
  }
};

template <typename Scalar>
Signal<Scalar> quadrature_mirror(const Signal<Scalar> &lowpass) {
  const Eigen::Index L = lowpass.size();
  Signal<Scalar> g(L);
  for (Eigen::Index n = 0; n < L; ++n)
    g[n] = (n % 2 == 0 ? Scalar(1) : Scalar(-1)) * lowpass[L - 1 - n];
  return g;
}

struct BankDeviation {
  double sum_error = 0;            // |sum h - sqrt(2)|
  double orthonormality_error = 0; // max_m |sum h_k h_{k+2m} - delta_m|
};

template <typename Scalar>
BankDeviation bank_deviation(const WaveletBank<Scalar> &bank) {
  const auto &h = bank.lowpass;
  const Eigen::Index L = h.size();
  BankDeviation dev;
  dev.sum_error = std::abs(static_cast<double>(h.sum()) - std::sqrt(2.0));
  for (Eigen::Index m = 0; 2 * m < L; ++m) {
    const double dot = static_cast<double>(
        h.head(L - 2 * m).dot(h.tail(L - 2 * m)));
    dev.orthonormality_error = std::max(
        dev.orthonormality_error, std::abs(dot - (m == 0 ? 1.0 : 0.0)));
  }
  return dev;
}

/// Builds a bank from low-pass taps and checks the orthogonality invariants
/// (sum within 1e-8 of sqrt(2), even-shift orthonormality within 1e-7).
template <typename Scalar>
WaveletBank<Scalar> make_bank(std::string name, Signal<Scalar> lowpass,
                              Scalar center_frequency) {
  if (lowpass.size() < 2 || lowpass.size() % 2 != 0)
    throw DomainError("wavelet bank '" + name +
                      "' needs an even number of taps (got " +
                      std::to_string(lowpass.size()) + ")");
  if (!std::isfinite(static_cast<double>(center_frequency)) ||
      center_frequency <= Scalar(0))
    throw DomainError("wavelet bank '" + name +
                      "' has a non-positive center frequency");
  WaveletBank<Scalar> bank{std::move(name), std::move(lowpass), {},
                           center_frequency};
  bank.highpass = quadrature_mirror(bank.lowpass);
  const auto dev = bank_deviation(bank);
  if (dev.sum_error > 1e-8)
    throw DomainError("wavelet bank '" + bank.name +
                      "': low-pass taps do not sum to sqrt(2)");
  if (dev.orthonormality_error > 1e-7)
    throw DomainError("wavelet bank '" + bank.name +
                      "': low-pass taps are not orthonormal under even shifts");
  return bank;
}

// Bank file: `# name=<id>`, `# center_frequency=<real>`, one low-pass tap per
// line.
WaveletBank<double> parse_bank(std::string_view text);
WaveletBank<double> load_bank(const std::filesystem::path &path);
std::string format_bank(const WaveletBank<double> &bank);

// Banks compiled into the library: "dmey" (102-tap discrete Meyer) and "haar".
WaveletBank<double> bundled_bank(std::string_view name);
std::vector<std::string> bundled_bank_names();
// A bundled name, or otherwise a path to a bank file.
WaveletBank<double> resolve_bank(std::string_view name_or_path);

/// Dominant frequency of the wavelet function sampled by `iterations` cascade
/// steps, in cycles per unit of support.
double cascade_center_frequency(const WaveletBank<double> &bank,
                                int iterations = 8);

inline Eigen::Index dwt_length(Eigen::Index n, Eigen::Index filter_length,
                               ExtensionMode mode) {
  return mode == ExtensionMode::symmetric ? (n + filter_length - 1) / 2 : n / 2;
}

// Deepest decomposition whose every level has at least two input samples
// (and an even count in periodic mode), capped at kMaxLevels.
inline int max_level(Eigen::Index n, Eigen::Index filter_length,
                     ExtensionMode mode) {
  int level = 0;
  while (level < kMaxLevels && n >= 2 &&
         (mode == ExtensionMode::symmetric || n % 2 == 0)) {
    n = dwt_length(n, filter_length, mode);
    ++level;
  }
  return level;
}

namespace detail {

inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index period = 2 * n;
  Eigen::Index r = i % period;
  if (r < 0)
    r += period;
  return r < n ? r : period - 1 - r;
}

// Input extended so that coefficient k reads ext.segment(2k, L).
template <typename Derived>
Signal<typename Derived::Scalar>
extend_for_analysis(const Eigen::MatrixBase<Derived> &x, Eigen::Index L,
                    ExtensionMode mode) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  const Eigen::Index K = dwt_length(n, L, mode);
  Signal<Scalar> ext(2 * (K - 1) + L);
  if (mode == ExtensionMode::symmetric) {
    const Eigen::Index offset = L - 2;
    for (Eigen::Index i = 0; i < ext.size(); ++i)
      ext[i] = x[reflect_index(i - offset, n)];
  } else {
    for (Eigen::Index i = 0; i < ext.size(); ++i)
      ext[i] = x[i % n];
  }
  return ext;
}

} // namespace detail

template <typename Scalar> struct DwtPair {
  Signal<Scalar> approx;
  Signal<Scalar> detail;
};

/// One analysis step: a_k = sum_n h_n S_{2k+n}, d_k = sum_n g_n S_{2k+n} on
/// the extended signal. In symmetric mode the extension starts L-2 samples
/// before the first input sample.
template <typename Derived, typename Scalar>
DwtPair<Scalar> dwt_step(const Eigen::MatrixBase<Derived> &signal,
                         const WaveletBank<Scalar> &bank, ExtensionMode mode) {
  static_assert(std::is_same_v<typename Derived::Scalar, Scalar>);
  const Eigen::Index n = signal.size();
  if (n < 1)
    throw DomainError("dwt_step: empty signal");
  if (mode == ExtensionMode::periodic && n % 2 != 0)
    throw DomainError("dwt_step: periodic mode needs an even length (got " +
                      std::to_string(n) + ")");
  const Eigen::Index L = bank.length();
  const Eigen::Index K = dwt_length(n, L, mode);
  const Signal<Scalar> ext = detail::extend_for_analysis(signal, L, mode);
  DwtPair<Scalar> out{Signal<Scalar>(K), Signal<Scalar>(K)};
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto window = ext.segment(2 * k, L);
    out.approx[k] = window.dot(bank.lowpass);
    out.detail[k] = window.dot(bank.highpass);
  }
  return out;
}

/// One synthesis step: S_n = sum_k (h_{n-2k} a_k + g_{n-2k} d_k), cropped to
/// `out_len` samples.
template <typename DerivedA, typename DerivedD, typename Scalar>
Signal<Scalar> idwt_step(const Eigen::MatrixBase<DerivedA> &approx,
                         const Eigen::MatrixBase<DerivedD> &detail,
                         const WaveletBank<Scalar> &bank, ExtensionMode mode,
                         Eigen::Index out_len) {
  const Eigen::Index L = bank.length();
  const Eigen::Index K = approx.size();
  if (out_len < 1 || detail.size() != K || dwt_length(out_len, L, mode) != K ||
      (mode == ExtensionMode::periodic && out_len % 2 != 0))
    throw DomainError("idwt_step: coefficient lengths " +
                      std::to_string(approx.size()) + "/" +
                      std::to_string(detail.size()) +
                      " are inconsistent with output length " +
                      std::to_string(out_len));
  Signal<Scalar> out = Signal<Scalar>::Zero(out_len);
  if (mode == ExtensionMode::symmetric) {
    const Eigen::Index offset = L - 2;
    for (Eigen::Index k = 0; k < K; ++k) {
      const Scalar a = approx[k], d = detail[k];
      for (Eigen::Index j = 0; j < L; ++j) {
        const Eigen::Index m = 2 * k + j - offset;
        if (m >= 0 && m < out_len)
          out[m] += bank.lowpass[j] * a + bank.highpass[j] * d;
      }
    }
  } else {
    for (Eigen::Index k = 0; k < K; ++k) {
      const Scalar a = approx[k], d = detail[k];
      for (Eigen::Index j = 0; j < L; ++j)
        out[(2 * k + j) % out_len] += bank.lowpass[j] * a + bank.highpass[j] * d;
    }
  }
  return out;
}

/// Coefficient sets {D1..DN, AN} of a multilevel decomposition.
/// `input_lengths[j]` is the length of the signal entering level j+1, so
/// `input_lengths[0]` is the original length.
template <typename Scalar> struct DecompositionTree {
  int levels = 0;
  std::vector<Signal<Scalar>> details;
  Signal<Scalar> approximation;
  std::vector<Eigen::Index> input_lengths;
  ExtensionMode mode = ExtensionMode::symmetric;
  std::string bank_name;

  Eigen::Index original_length() const { return input_lengths.front(); }
  const Signal<Scalar> &detail(int level) const { return details.at(level - 1); }
};

template <typename Derived, typename Scalar>
DecompositionTree<Scalar> wavedec(const Eigen::MatrixBase<Derived> &signal,
                                  int levels, const WaveletBank<Scalar> &bank,
                                  ExtensionMode mode = ExtensionMode::symmetric) {
  if (signal.size() < 1)
    throw DomainError("wavedec: empty signal");
  if (levels < 1)
    throw DomainError("wavedec: levels must be >= 1 (got " +
                      std::to_string(levels) + ")");
  const int feasible = max_level(signal.size(), bank.length(), mode);
  if (levels > feasible)
    throw DomainError("wavedec: " + std::to_string(levels) +
                      " levels requested for a signal of length " +
                      std::to_string(signal.size()) +
                      "; the maximum feasible level is " +
                      std::to_string(feasible));
  DecompositionTree<Scalar> tree;
  tree.levels = levels;
  tree.mode = mode;
  tree.bank_name = bank.name;
  Signal<Scalar> current = signal;
  for (int level = 1; level <= levels; ++level) {
    tree.input_lengths.push_back(current.size());
    auto step = dwt_step(current, bank, mode);
    tree.details.push_back(std::move(step.detail));
    current = std::move(step.approx);
  }
  tree.approximation = std::move(current);
  return tree;
}

/// Approximation coefficients A_level recovered from the tree (level <= N).
template <typename Scalar>
Signal<Scalar> approximation_coefficients(const DecompositionTree<Scalar> &tree,
                                          int level,
                                          const WaveletBank<Scalar> &bank) {
  if (level < 1 || level > tree.levels)
    throw DomainError("approximation level " + std::to_string(level) +
                      " outside 1.." + std::to_string(tree.levels));
  Signal<Scalar> a = tree.approximation;
  for (int j = tree.levels; j > level; --j)
    a = idwt_step(a, tree.detail(j), bank, tree.mode, tree.input_lengths[j - 1]);
  return a;
}

template <typename Scalar>
Signal<Scalar> waverec(const DecompositionTree<Scalar> &tree,
                       const WaveletBank<Scalar> &bank) {
  Signal<Scalar> a = tree.approximation;
  for (int j = tree.levels; j >= 1; --j)
    a = idwt_step(a, tree.detail(j), bank, tree.mode, tree.input_lengths[j - 1]);
  return a;
}

struct Band {
  enum class Kind { detail, approximation };
  Kind kind = Kind::detail;
  int level = 1;

  static Band d(int level) { return {Kind::detail, level}; }
  static Band a(int level) { return {Kind::approximation, level}; }
  friend bool operator==(const Band &, const Band &) = default;
};

std::string to_string(const Band &band);
// "D1".."D16", "A1".."A16" (case-insensitive).
Band parse_band(std::string_view text);

/// Signal component RecD_s or RecA_j: reconstruction from one coefficient set
/// with every other set zeroed. Returns original_length samples.
template <typename Scalar>
Signal<Scalar> reconstruct_component(const DecompositionTree<Scalar> &tree,
                                     const Band &band,
                                     const WaveletBank<Scalar> &bank) {
  if (band.level < 1 || band.level > tree.levels)
    throw DomainError("band " + to_string(band) +
                      " does not exist in a " + std::to_string(tree.levels) +
                      "-level decomposition");
  const int s = band.level;
  Signal<Scalar> current;
  if (band.kind == Band::Kind::detail) {
    const auto &d = tree.detail(s);
    current = idwt_step(Signal<Scalar>::Zero(d.size()), d, bank, tree.mode,
                        tree.input_lengths[s - 1]);
  } else {
    const Signal<Scalar> a = approximation_coefficients(tree, s, bank);
    current = idwt_step(a, Signal<Scalar>::Zero(a.size()), bank, tree.mode,
                        tree.input_lengths[s - 1]);
  }
  for (int j = s - 1; j >= 1; --j)
    current = idwt_step(current, Signal<Scalar>::Zero(tree.detail(j).size()),
                        bank, tree.mode, tree.input_lengths[j - 1]);
  return current;
}

struct BandInfo {
  double center_hz = 0;
  double low_hz = 0;  // nominal band [rate / 2^(level+1), rate / 2^level]
  double high_hz = 0;
};

template <typename Scalar>
BandInfo band_of_level(int level, double sampling_rate,
                       const WaveletBank<Scalar> &bank) {
  if (level < 1 || level > kMaxLevels)
    throw DomainError("band_of_level: level " + std::to_string(level) +
                      " outside 1.." + std::to_string(kMaxLevels));
  const double scale = std::ldexp(1.0, level - 1);
  return {static_cast<double>(bank.center_frequency) * (sampling_rate / 2) / scale,
          sampling_rate / (4 * scale), sampling_rate / (2 * scale)};
}

} // namespace hfecg
