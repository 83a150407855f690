#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <string_view>

namespace hfecg {

template <typename Scalar> using Signal = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexSignal = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

// Class 1 of the two-class problem is `healthy`, class 2 is `sick`.
enum class GroupLabel { healthy, sick, unlabeled };

std::string_view to_string(GroupLabel label);
std::optional<GroupLabel> parse_group_label(std::string_view text);

// 0 for healthy, 1 for sick; unlabeled has no class index.
std::optional<int> class_index(GroupLabel label);

} // namespace hfecg
