#pragma once

#include "hfecg/error.hpp"
#include "hfecg/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hfecg {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Selective estimates of the class statistics and the scatter matrices
///   S_w = sum_k P_k Sigma_k,   S_b = sum_k P_k (M_k - M_0)(M_k - M_0)^T,
/// with Sigma_k normalized by N_k and P_k = N_k / N.
template <typename Scalar> struct ScatterModel {
  int class_count = 0;
  std::vector<Eigen::Index> sample_counts;
  std::vector<Vector<Scalar>> class_means;
  std::vector<Matrix<Scalar>> class_covariances;
  std::vector<Scalar> priors;
  Vector<Scalar> mixture_mean;
  Matrix<Scalar> within;
  Matrix<Scalar> between;

  Eigen::Index dimension() const { return mixture_mean.size(); }
};

/// Rows of `samples` are feature vectors; labels[i] in 0..c-1 is the class of
/// row i (0 = healthy, 1 = sick for the two-class problem).
template <typename Derived>
ScatterModel<typename Derived::Scalar>
fit_scatter(const Eigen::MatrixBase<Derived> &samples, std::span<const int> labels) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index N = samples.rows(), n = samples.cols();
  if (static_cast<Eigen::Index>(labels.size()) != N)
    throw DomainError("fit_scatter: " + std::to_string(labels.size()) +
                      " labels for " + std::to_string(N) + " samples");
  for (Eigen::Index i = 0; i < N; ++i) {
    if (!samples.row(i).allFinite())
      throw DataError("fit_scatter: non-finite feature in row " + std::to_string(i));
    if (labels[i] < 0)
      throw DomainError("fit_scatter: negative class label in row " + std::to_string(i));
  }
  const int c = N == 0 ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (c < 2)
    throw InsufficientDataError("fit_scatter: need at least 2 classes (got " +
                                std::to_string(c) + ")");

  ScatterModel<Scalar> model;
  model.class_count = c;
  model.sample_counts.assign(c, 0);
  model.class_means.assign(c, Vector<Scalar>::Zero(n));
  model.class_covariances.assign(c, Matrix<Scalar>::Zero(n, n));
  for (Eigen::Index i = 0; i < N; ++i) {
    ++model.sample_counts[labels[i]];
    model.class_means[labels[i]] += samples.row(i).transpose();
  }
  for (int k = 0; k < c; ++k) {
    if (model.sample_counts[k] < 2)
      throw InsufficientDataError("fit_scatter: class " + std::to_string(k + 1) +
                                  " has " + std::to_string(model.sample_counts[k]) +
                                  " samples; at least 2 are required");
    model.class_means[k] /= Scalar(model.sample_counts[k]);
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    const Vector<Scalar> dev = samples.row(i).transpose() - model.class_means[labels[i]];
    model.class_covariances[labels[i]].noalias() += dev * dev.transpose();
  }
  model.mixture_mean = Vector<Scalar>::Zero(n);
  model.within = Matrix<Scalar>::Zero(n, n);
  for (int k = 0; k < c; ++k) {
    model.class_covariances[k] /= Scalar(model.sample_counts[k]);
    model.priors.push_back(Scalar(model.sample_counts[k]) / Scalar(N));
    model.mixture_mean += model.priors[k] * model.class_means[k];
    model.within += model.priors[k] * model.class_covariances[k];
  }
  model.between = Matrix<Scalar>::Zero(n, n);
  for (int k = 0; k < c; ++k) {
    const Vector<Scalar> dev = model.class_means[k] - model.mixture_mean;
    model.between.noalias() += model.priors[k] * dev * dev.transpose();
  }
  // Symmetrize away rounding so the self-adjoint solvers see exact symmetry.
  model.within = ((model.within + model.within.transpose()) / Scalar(2)).eval();
  model.between = ((model.between + model.between.transpose()) / Scalar(2)).eval();
  return model;
}

inline constexpr double kRidgeConditionThreshold = 1e12;
inline constexpr double kRidgeEpsilon = 1e-10;
inline constexpr double kSingularConditionLimit = 1e14;

template <typename Scalar> struct RegularizedMatrix {
  Matrix<Scalar> matrix;
  Scalar ridge{0};              // added multiple of the identity
  Scalar condition_estimate{0}; // of the input, before any ridge
};

/// Adds eps * mean(diag) * I when the 2-norm condition number exceeds 1e12.
/// Throws NumericalError when the result is still singular.
template <typename Scalar>
RegularizedMatrix<Scalar> regularize_scatter(const Matrix<Scalar> &m,
                                             const std::string &what) {
  auto condition = [](const Matrix<Scalar> &a) {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(a, Eigen::EigenvaluesOnly);
    const Scalar lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    return lo > Scalar(0) ? hi / lo : std::numeric_limits<Scalar>::infinity();
  };
  RegularizedMatrix<Scalar> out{m, Scalar(0), condition(m)};
  if (!(out.condition_estimate > Scalar(kRidgeConditionThreshold)))
    return out;
  const Scalar mean_diag = m.diagonal().mean();
  out.ridge = Scalar(kRidgeEpsilon) * mean_diag;
  out.matrix.diagonal().array() += out.ridge;
  const Scalar after = condition(out.matrix);
  if (!(mean_diag > Scalar(0)) || !(after <= Scalar(kSingularConditionLimit)))
    throw NumericalError(what + " is singular beyond regularization (condition estimate " +
                         std::to_string(static_cast<double>(out.condition_estimate)) + ")");
  return out;
}

/// Eigen-decomposition of S_w^{-1} S_b: eigenvalues sorted descending, unit
/// eigenvectors as columns, A = first m columns.
template <typename Scalar> struct ReductionModel {
  Vector<Scalar> eigenvalues;
  Matrix<Scalar> eigenvectors;
  Matrix<Scalar> reduction;
  int dimensions = 0;
  Scalar saved_information{0}; // percent
  Scalar ridge{0};
  Scalar condition_estimate{0};
  // Dominant eigenvalue from power iteration, an independent route to
  // eigenvalues[0].
  Scalar power_eigenvalue{0};

  Eigen::Index input_dimension() const { return eigenvectors.rows(); }
};

inline constexpr double kAutoSavedInformationPercent = 85.0;

template <typename Scalar> struct DominantPair {
  Scalar eigenvalue{0};
  Vector<Scalar> eigenvector;
  int iterations = 0;
};

/// Power iteration on S_w^{-1} S_b, applied through a Cholesky solve.
template <typename Scalar>
DominantPair<Scalar> dominant_eigenpair(const Matrix<Scalar> &within,
                                        const Matrix<Scalar> &between,
                                        int max_iterations = 1000,
                                        Scalar tolerance = Scalar(1e-15)) {
  const Eigen::LDLT<Matrix<Scalar>> solver(within);
  auto apply = [&](const Vector<Scalar> &v) -> Vector<Scalar> {
    return solver.solve(between * v);
  };
  DominantPair<Scalar> out;
  Vector<Scalar> v = Vector<Scalar>::Ones(within.rows()).normalized();
  for (int it = 1; it <= max_iterations; ++it) {
    Vector<Scalar> w = apply(v);
    const Scalar norm = w.norm();
    out.iterations = it;
    if (!(norm > Scalar(0)))
      break;
    w /= norm;
    if (w.dot(v) < Scalar(0))
      w = -w;
    const Scalar change = (w - v).norm();
    v = std::move(w);
    if (change < tolerance)
      break;
  }
  out.eigenvalue = v.dot(apply(v));
  out.eigenvector = v;
  return out;
}

/// Eigenpairs of S_w^{-1} S_b through the generalized symmetric problem
/// S_b x = lambda S_w x. With `dimensions` empty the smallest m whose saved
/// information reaches 85 percent is chosen. Psi_1 is oriented so that
/// Psi_1^T (M_1 - M_2) > 0; the remaining vectors have a positive
/// largest-magnitude entry.
template <typename Scalar>
ReductionModel<Scalar> reduce(const ScatterModel<Scalar> &model,
                              std::optional<int> dimensions = std::nullopt) {
  const Eigen::Index n = model.dimension();
  if (dimensions && (*dimensions < 1 || *dimensions > n))
    throw DomainError("reduce: dimensions must be in 1.." + std::to_string(n));
  const auto reg = regularize_scatter(model.within, "S_w");

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix<Scalar>> ges(
      model.between, reg.matrix, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success)
    throw NumericalError("reduce: generalized eigen-solve failed");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return ges.eigenvalues()[a] > ges.eigenvalues()[b];
  });

  ReductionModel<Scalar> out;
  out.ridge = reg.ridge;
  out.condition_estimate = reg.condition_estimate;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = ges.eigenvalues()[order[i]];
    Vector<Scalar> v = ges.eigenvectors().col(order[i]).normalized();
    Scalar orientation;
    if (i == 0 && model.class_count >= 2) {
      orientation = v.dot(model.class_means[0] - model.class_means[1]);
    } else {
      Eigen::Index idx;
      v.cwiseAbs().maxCoeff(&idx);
      orientation = v[idx];
    }
    if (orientation < Scalar(0))
      v = -v;
    out.eigenvectors.col(i) = v;
  }

  const Scalar total = out.eigenvalues.sum();
  auto saved = [&](int m) {
    return total > Scalar(0) ? out.eigenvalues.head(m).sum() / total * Scalar(100)
                             : Scalar(0);
  };
  if (dimensions) {
    out.dimensions = *dimensions;
  } else {
    out.dimensions = static_cast<int>(n);
    for (int m = 1; m <= n; ++m) {
      if (saved(m) >= Scalar(kAutoSavedInformationPercent)) {
        out.dimensions = m;
        break;
      }
    }
  }
  out.saved_information = saved(out.dimensions);
  out.reduction = out.eigenvectors.leftCols(out.dimensions);
  out.power_eigenvalue = dominant_eigenpair(reg.matrix, model.between).eigenvalue;
  return out;
}

/// Z = A^T Y.
template <typename Scalar, typename Derived>
Vector<Scalar> project(const ReductionModel<Scalar> &reduction,
                       const Eigen::MatrixBase<Derived> &y) {
  if (y.size() != reduction.input_dimension())
    throw DomainError("project: feature vector has " + std::to_string(y.size()) +
                      " entries, reduction expects " +
                      std::to_string(reduction.input_dimension()));
  return reduction.reduction.transpose() * y;
}

// Row-wise projection of a sample matrix (N x n -> N x m).
template <typename Scalar, typename Derived>
Matrix<Scalar> project_rows(const ReductionModel<Scalar> &reduction,
                            const Eigen::MatrixBase<Derived> &samples) {
  if (samples.cols() != reduction.input_dimension())
    throw DomainError("project_rows: samples have " + std::to_string(samples.cols()) +
                      " columns, reduction expects " +
                      std::to_string(reduction.input_dimension()));
  return samples * reduction.reduction;
}

/// J_1 = tr(S_w^{-1} S_b), with the same regularization as reduce().
template <typename Scalar> Scalar j1_criterion(const ScatterModel<Scalar> &model) {
  const auto reg = regularize_scatter(model.within, "S_w");
  return reg.matrix.ldlt().solve(model.between).trace();
}

} // namespace hfecg
