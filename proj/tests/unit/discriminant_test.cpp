#include "helpers.hpp"

#include "hfecg/discriminant.hpp"

#include <doctest.h>

using namespace hfecg;

namespace {

struct Labeled {
  Eigen::MatrixXd samples;
  std::vector<int> labels;
};

// Two Gaussian classes in n dimensions with a random common covariance and
// shifted means.
Labeled gaussian_classes(Eigen::Index n, Eigen::Index n1, Eigen::Index n2, std::uint64_t seed,
                         double separation = 1.0) {
  const Eigen::MatrixXd mix =
      Eigen::Map<const Eigen::MatrixXd>(testing::gaussian_noise(n * n, seed).data(), n, n) +
      2.0 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd shift = separation * testing::gaussian_noise(n, seed + 1);
  Labeled out;
  out.samples.resize(n1 + n2, n);
  for (Eigen::Index i = 0; i < n1 + n2; ++i) {
    Eigen::VectorXd row = mix * testing::gaussian_noise(n, seed * 1000 + i + 7);
    if (i >= n1)
      row += shift;
    out.samples.row(i) = row.transpose();
    out.labels.push_back(i < n1 ? 0 : 1);
  }
  return out;
}

double abs_cosine(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

} // namespace

TEST_CASE("two classes of identical points") {
  Eigen::MatrixXd y(5, 2);
  y << 1, 2, 1, 2, 1, 2, -1, 0, -1, 0;
  const std::vector<int> labels{0, 0, 0, 1, 1};
  const auto m = fit_scatter(y, labels);
  CHECK(m.within.cwiseAbs().maxCoeff() == 0);
  CHECK(m.priors[0] == doctest::Approx(0.6));
  const Eigen::Vector2d diff(2, 2);
  // sum_k P_k (M_k - M_0)(M_k - M_0)^T reduces to P1 P2 (a - b)(a - b)^T.
  const Eigen::Matrix2d expect = 0.6 * 0.4 * diff * diff.transpose();
  CHECK((m.between - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("scatter invariants") {
  const auto data = gaussian_classes(6, 40, 55, 3);
  const auto m = fit_scatter(data.samples, data.labels);
  CHECK((m.within - m.within.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((m.between - m.between.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.within).eigenvalues().minCoeff() >= 0);
  CHECK(m.priors[0] + m.priors[1] == doctest::Approx(1).epsilon(1e-12));
  const Eigen::MatrixXd recomposed =
      m.priors[0] * m.class_covariances[0] + m.priors[1] * m.class_covariances[1];
  CHECK((m.within - recomposed).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m.between);
  lu.setThreshold(1e-10);
  CHECK(lu.rank() <= 1);

  // Class covariance against a direct 1/N_k estimate.
  Eigen::MatrixXd c0 = data.samples.topRows(40);
  const Eigen::RowVectorXd mean0 = c0.colwise().mean();
  c0.rowwise() -= mean0;
  CHECK((m.class_covariances[0] - c0.transpose() * c0 / 40.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mirrored equal classes have zero mixture mean") {
  Eigen::MatrixXd y(4, 2);
  y << 1, 2, 2, 1, -1, -2, -2, -1;
  const auto m = fit_scatter(y, std::vector<int>{0, 0, 1, 1});
  CHECK(m.mixture_mean.norm() < 1e-15);
}

TEST_CASE("scatter errors") {
  Eigen::MatrixXd y = Eigen::MatrixXd::Random(4, 3);
  CHECK_THROWS_AS(fit_scatter(y, std::vector<int>{0, 0, 0, 0}), InsufficientDataError);
  CHECK_THROWS_AS(fit_scatter(y, std::vector<int>{0, 0, 0, 1}), InsufficientDataError);
  y(2, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fit_scatter(y, std::vector<int>{0, 0, 1, 1}), DataError);
}

TEST_CASE("two-class reduction has rank-1 eigenstructure") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = gaussian_classes(21, 96, 120, seed);
    const auto m = fit_scatter(data.samples, data.labels);
    const auto r = reduce(m);
    CHECK(r.dimensions == 1);
    CHECK(r.saved_information >= 99.9);
    for (Eigen::Index i = 1; i < r.eigenvalues.size(); ++i) {
      CHECK(r.eigenvalues[i - 1] >= r.eigenvalues[i]);
      CHECK(std::abs(r.eigenvalues[i]) <= 1e-10 * r.eigenvalues[0]);
    }
    for (Eigen::Index i = 0; i < r.eigenvectors.cols(); ++i)
      CHECK(r.eigenvectors.col(i).norm() == doctest::Approx(1).epsilon(1e-10));
    const Eigen::VectorXd closed =
        m.within.ldlt().solve(Eigen::VectorXd(m.class_means[1] - m.class_means[0]));
    CHECK(abs_cosine(r.eigenvectors.col(0), closed) >= 1 - 1e-8);
    CHECK(r.eigenvectors.col(0).dot(m.class_means[0] - m.class_means[1]) > 0);
    CHECK(r.power_eigenvalue == doctest::Approx(r.eigenvalues[0]).epsilon(1e-8));
    CHECK(j1_criterion(m) == doctest::Approx(r.eigenvalues.sum()).epsilon(1e-8));
    CHECK(r.saved_information ==
          doctest::Approx(100 * r.eigenvalues[0] / r.eigenvalues.sum()).epsilon(1e-12));
  }
}

TEST_CASE("explicit dimensions and auto selection with three classes") {
  auto data = gaussian_classes(5, 30, 30, 11, 3.0);
  const auto extra = gaussian_classes(5, 30, 1, 12, 0.0);
  const Eigen::Index n = data.samples.rows();
  data.samples.conservativeResize(n + 30, Eigen::NoChange);
  data.samples.bottomRows(30) = extra.samples.topRows(30).rowwise() +
                                Eigen::RowVectorXd::Constant(5, -4.0);
  for (int i = 0; i < 30; ++i)
    data.labels.push_back(2);
  const auto m = fit_scatter(data.samples, data.labels);
  CHECK(m.class_count == 3);
  const auto r = reduce(m, 3);
  CHECK(r.dimensions == 3);
  CHECK(r.reduction.cols() == 3);
  CHECK(std::abs(r.eigenvalues[2]) <= 1e-8 * r.eigenvalues[0]);
  const auto a = reduce(m);
  double saved = 0;
  for (int k = 1; k <= a.dimensions; ++k) {
    saved = 100 * a.eigenvalues.head(k).sum() / a.eigenvalues.sum();
    if (k < a.dimensions)
      CHECK(saved < 85);
  }
  CHECK(saved >= 85);
  CHECK_THROWS_AS(reduce(m, 0), DomainError);
  CHECK_THROWS_AS(reduce(m, 6), DomainError);
}

TEST_CASE("projection") {
  const auto data = gaussian_classes(4, 20, 20, 21);
  const auto r = reduce(fit_scatter(data.samples, data.labels), 1);
  CHECK(project(r, Eigen::VectorXd(r.eigenvectors.col(0)))[0] == doctest::Approx(1));
  // A vector orthogonal to Psi_1.
  Eigen::VectorXd w = testing::gaussian_noise(4, 5);
  w -= w.dot(r.eigenvectors.col(0)) * r.eigenvectors.col(0);
  CHECK(std::abs(project(r, w)[0]) < 1e-14);
  const Eigen::VectorXd a = testing::gaussian_noise(4, 6), b = testing::gaussian_noise(4, 7);
  CHECK(project(r, Eigen::VectorXd(2 * a + b))[0] ==
        doctest::Approx(2 * project(r, a)[0] + project(r, b)[0]));
  CHECK_THROWS_AS(project(r, Eigen::VectorXd::Ones(3)), DomainError);
  const auto rows = project_rows(r, data.samples);
  CHECK(rows(7, 0) == doctest::Approx(project(r, Eigen::VectorXd(data.samples.row(7)))[0]));
}

TEST_CASE("J1 under re-coordination and with identical means") {
  const auto data = gaussian_classes(5, 50, 60, 31);
  const Eigen::MatrixXd T =
      Eigen::Map<const Eigen::MatrixXd>(testing::gaussian_noise(25, 99).data(), 5, 5) +
      3.0 * Eigen::MatrixXd::Identity(5, 5);
  const Eigen::MatrixXd transformed = data.samples * T.transpose();
  CHECK(j1_criterion(fit_scatter(transformed, data.labels)) ==
        doctest::Approx(j1_criterion(fit_scatter(data.samples, data.labels))).epsilon(1e-6));

  Eigen::MatrixXd same(4, 2);
  same << 1, 0, -1, 0, 0, 1, 0, -1;
  CHECK(j1_criterion(fit_scatter(same, std::vector<int>{0, 0, 1, 1})) == doctest::Approx(0));
}

TEST_CASE("near-singular S_w is regularized, singular beyond repair is an error") {
  auto data = gaussian_classes(4, 30, 30, 41);
  // Duplicate a column: S_w becomes singular, the ridge restores invertibility.
  Eigen::MatrixXd dup(data.samples.rows(), 5);
  dup << data.samples, data.samples.col(0);
  const auto r = reduce(fit_scatter(dup, data.labels));
  CHECK(r.ridge > 0);
  CHECK(r.eigenvalues.allFinite());

  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(6, 3);
  zero.bottomRows(3).setOnes();
  CHECK_THROWS_AS(reduce(fit_scatter(zero, std::vector<int>{0, 0, 0, 1, 1, 1})), NumericalError);
}
