#pragma once

#include "hfecg/error.hpp"
#include "hfecg/signal_io.hpp"
#include "hfecg/spectral.hpp"
#include "hfecg/wavelet.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hfecg {

// ---------------------------------------------------------------------------
// Per-component statistics. All take any Eigen vector expression.

template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived> &x) {
  if (x.size() < 1)
    throw DomainError("max_abs: empty input");
  return x.cwiseAbs().maxCoeff();
}

template <typename Derived>
auto l1_energy(const Eigen::MatrixBase<Derived> &x) {
  if (x.size() < 1)
    throw DomainError("l1_energy: empty input");
  return x.cwiseAbs().sum();
}

template <typename Derived>
auto l2_energy(const Eigen::MatrixBase<Derived> &x) {
  if (x.size() < 1)
    throw DomainError("l2_energy: empty input");
  return x.squaredNorm();
}

// L2 energy of `x` divided by the L2 energy of `whole`.
template <typename DerivedX, typename DerivedW>
auto relative_l2(const Eigen::MatrixBase<DerivedX> &x,
                 const Eigen::MatrixBase<DerivedW> &whole) {
  const auto denominator = l2_energy(whole);
  if (denominator == 0)
    throw DomainError("relative_l2: whole signal has zero energy");
  return l2_energy(x) / denominator;
}

// Sample variance (N - 1 denominator).
template <typename Derived>
auto dispersion(const Eigen::MatrixBase<Derived> &x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() < 2)
    throw DomainError("dispersion: need at least 2 samples");
  const Scalar mean = x.mean();
  return (x.array() - mean).square().sum() / Scalar(x.size() - 1);
}

/// E(X) = -sum x_k^2 ln(x_k^2), with 0 ln 0 = 0. Not normalized, so the value
/// can be negative and is not scale invariant.
template <typename Derived>
auto shannon_entropy(const Eigen::MatrixBase<Derived> &x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() < 1)
    throw DomainError("shannon_entropy: empty input");
  Scalar sum{0};
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const Scalar sq = x[k] * x[k];
    if (sq > Scalar(0))
      sum -= sq * std::log(sq);
  }
  return sum;
}

/// Classical rescaled-range estimate from the single ratio R/S = (N/2)^H.
/// R is the range of the cumulative demeaned sums, S the standard deviation
/// about the sample mean (1/N normalization).
template <typename Derived>
auto hurst_rs(const Eigen::MatrixBase<Derived> &x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  if (n < 16)
    throw DomainError("hurst_rs: need at least 16 samples (got " +
                      std::to_string(n) + ")");
  const Scalar mean = x.mean();
  Scalar cumulative{0}, high{0}, low{0}, sum_sq{0};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar dev = x[k] - mean;
    cumulative += dev;
    sum_sq += dev * dev;
    if (k == 0 || cumulative > high)
      high = cumulative;
    if (k == 0 || cumulative < low)
      low = cumulative;
  }
  const Scalar s = std::sqrt(sum_sq / Scalar(n));
  if (!(s > Scalar(0)))
    throw DomainError("hurst_rs: constant signal has zero standard deviation");
  return std::log((high - low) / s) / std::log(Scalar(n) / Scalar(2));
}

// ---------------------------------------------------------------------------
// Feature vector

inline constexpr int kComponentCount = 4;
inline constexpr std::size_t kFeatureCount = 21;

using FeatureValues = Eigen::Matrix<double, kFeatureCount, 1>;

// d<s>_max_abs, d<s>_l2_energy, d<s>_peak_power, d<s>_peak_freq_hz,
// d<s>_shannon_entropy for s = 1..4, then d4_hurst.
const std::array<std::string, kFeatureCount> &feature_names();
// Columns added by FeatureMode::extended (never used for classification).
const std::vector<std::string> &extended_feature_names();
// FNV-1a over the comma-joined canonical feature names.
std::uint64_t feature_order_hash();

enum class FeatureMode { standard21, extended };
std::string_view to_string(FeatureMode mode);
std::optional<FeatureMode> parse_feature_mode(std::string_view text);

struct FeatureVector {
  FeatureValues values = FeatureValues::Zero();
  std::vector<double> extended;
  std::string subject_id;
  std::string lead_name;
  int fragment_index = 0;
  GroupLabel group_label = GroupLabel::unlabeled;
};

/// Reconstructs RecD1..RecD4 from `tree` and computes the canonical 21
/// features (plus the extended set when requested).
FeatureVector extract_features(const Fragment &fragment,
                               const DecompositionTree<double> &tree,
                               const WaveletBank<double> &bank,
                               FeatureMode mode = FeatureMode::standard21);

// Feature table CSV: subject_id,lead,fragment_index,group_label, then the 21
// canonical columns, then extended columns when any row has them.
std::string format_feature_table(const std::vector<FeatureVector> &rows);
std::vector<FeatureVector> parse_feature_table(std::string_view text);
std::vector<FeatureVector> load_feature_table(const std::filesystem::path &path);

} // namespace hfecg
