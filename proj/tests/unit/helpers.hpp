#pragma once

#include "hfecg/signal_io.hpp"

#include <Eigen/Dense>

#include <random>

namespace testing {

inline Eigen::VectorXd gaussian_noise(Eigen::Index n, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  Eigen::VectorXd x(n);
  for (auto &v : x)
    v = normal(rng);
  return x;
}

inline hfecg::EcgRecord random_record(Eigen::Index n, int rate, std::uint64_t seed) {
  hfecg::EcgRecord r;
  r.sampling_rate = rate;
  r.subject_id = "s" + std::to_string(seed);
  for (std::size_t c = 0; c < hfecg::kChannelCount; ++c)
    r.channels[c] = gaussian_noise(n, seed * 31 + c);
  return r;
}

inline double max_abs_diff(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  return (a - b).cwiseAbs().maxCoeff();
}

} // namespace testing
