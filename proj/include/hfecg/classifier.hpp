#pragma once

#include "hfecg/discriminant.hpp"
#include "hfecg/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hfecg {

struct ClassStatistics {
  Eigen::Index count = 0;
  double prior = 0;
  Eigen::VectorXd mean;       // M_i in the reduced space
  Eigen::MatrixXd covariance; // Sigma_i, 1/N_i normalization
  double eta = 0;             // E{h(Z) | class i}
  double sigma2 = 0;          // Var{h(Z) | class i}
};

/// h(Z) = V^T Z + v0 with class 1 (healthy) on the positive side.
struct ClassifierModel {
  Eigen::VectorXd V;
  double v0 = 0;
  std::optional<double> z0; // -v0 / V, one-dimensional models only
  std::array<ClassStatistics, 2> classes;
  double criterion = 0; // f = (P1 eta1^2 + P2 eta2^2) / (P1 s1^2 + P2 s2^2)
  double ridge = 0;

  Eigen::Index dimension() const { return V.size(); }
};

enum class PriorMode { proportional, equal };
std::string_view to_string(PriorMode mode);
std::optional<PriorMode> parse_prior_mode(std::string_view text);

double criterion_f(const Eigen::VectorXd &V, double v0,
                   const std::array<ClassStatistics, 2> &classes);

/// Closed-form training on reduced vectors (rows of `reduced`, labels 0/1):
///   V = [P1 Sigma1 + P2 Sigma2]^{-1} (M1 - M2),  v0 = -V^T (P1 M1 + P2 M2).
/// Priors default to the class proportions.
ClassifierModel train(const Eigen::MatrixXd &reduced, std::span<const int> labels,
                      std::optional<std::array<double, 2>> priors = std::nullopt);

enum class DecisionLabel { class1_healthy, class2_sick };
std::string_view to_string(DecisionLabel label);
GroupLabel to_group(DecisionLabel label);

struct Decision {
  std::string subject_id;
  std::string lead_name;
  int fragment_index = 0;
  Eigen::VectorXd z;
  double h = 0;
  DecisionLabel label = DecisionLabel::class2_sick;
};

// Signed distance (V^T Z + v0) / ||V||; equals Z - z0 when m = 1 and V > 0.
double decision_value(const ClassifierModel &model, const Eigen::VectorXd &z);

// class 1 iff h > 0; h == 0 goes to class 2.
Decision classify(const ClassifierModel &model, const Eigen::VectorXd &z,
                  std::string subject_id = {}, std::string lead_name = {},
                  int fragment_index = 0);

enum class AggregationMode { all_fragments, per_lead_mean };

struct PatientSummary {
  std::string subject_id;
  double mean_h = 0;
  DecisionLabel label = DecisionLabel::class2_sick;
  // Leads with a decision whose label differs from the majority label.
  std::vector<std::string> problem_leads;
  std::size_t value_count = 0;
};

PatientSummary aggregate_patient(std::span<const Decision> decisions,
                                 AggregationMode mode = AggregationMode::all_fragments);

struct HistogramBin {
  double low = 0;
  double high = 0;
  std::array<int, 2> counts{};
};

struct EvaluationReport {
  std::array<int, 2> totals{};
  std::array<int, 2> misclassified{};
  std::array<double, 2> rates{};
  std::optional<double> z0;
  // Histogram axis: "z" for one-dimensional models, "h" otherwise.
  std::string axis;
  std::vector<HistogramBin> bins;
};

EvaluationReport evaluate(const ClassifierModel &model, const Eigen::MatrixXd &reduced,
                          std::span<const int> labels, int bin_count = 20);

// `# key=value` summary lines, then bin_low,bin_high,count_class1,count_class2.
std::string format_report_csv(const EvaluationReport &report);
// Histograms of both classes as a standalone SVG document.
std::string format_report_svg(const EvaluationReport &report);

} // namespace hfecg
