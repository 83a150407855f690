#include "hfecg/classifier.hpp"

#include "hfecg/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace hfecg {

std::string_view to_string(PriorMode mode) {
  return mode == PriorMode::proportional ? "proportional" : "equal";
}

std::optional<PriorMode> parse_prior_mode(std::string_view text) {
  if (text == "proportional")
    return PriorMode::proportional;
  if (text == "equal")
    return PriorMode::equal;
  return std::nullopt;
}

std::string_view to_string(DecisionLabel label) {
  return label == DecisionLabel::class1_healthy ? "class1_healthy" : "class2_sick";
}

GroupLabel to_group(DecisionLabel label) {
  return label == DecisionLabel::class1_healthy ? GroupLabel::healthy : GroupLabel::sick;
}

double criterion_f(const Eigen::VectorXd &V, double v0,
                   const std::array<ClassStatistics, 2> &classes) {
  double num = 0, den = 0;
  for (const auto &c : classes) {
    const double eta = V.dot(c.mean) + v0;
    num += c.prior * eta * eta;
    den += c.prior * V.dot(c.covariance * V);
  }
  return num / den;
}

ClassifierModel train(const Eigen::MatrixXd &reduced, std::span<const int> labels,
                      std::optional<std::array<double, 2>> priors) {
  const Eigen::Index N = reduced.rows(), m = reduced.cols();
  if (static_cast<Eigen::Index>(labels.size()) != N)
    throw DomainError("train: " + std::to_string(labels.size()) + " labels for " +
                      std::to_string(N) + " samples");
  if (m < 1)
    throw DomainError("train: reduced vectors are empty");
  if (!reduced.allFinite())
    throw DataError("train: non-finite reduced feature");

  ClassifierModel model;
  for (auto &c : model.classes) {
    c.mean = Eigen::VectorXd::Zero(m);
    c.covariance = Eigen::MatrixXd::Zero(m, m);
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw DomainError("train: the classifier is two-class; label " +
                        std::to_string(labels[i]) + " in row " + std::to_string(i));
    auto &c = model.classes[labels[i]];
    ++c.count;
    c.mean += reduced.row(i).transpose();
  }
  for (std::size_t k = 0; k < 2; ++k) {
    if (model.classes[k].count == 0)
      throw DomainError("train: class " + std::to_string(k + 1) + " has no samples");
    if (model.classes[k].count < 2)
      throw InsufficientDataError("train: class " + std::to_string(k + 1) +
                                  " has 1 sample; at least 2 are required");
    model.classes[k].mean /= double(model.classes[k].count);
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    auto &c = model.classes[labels[i]];
    const Eigen::VectorXd dev = reduced.row(i).transpose() - c.mean;
    c.covariance.noalias() += dev * dev.transpose();
  }
  for (auto &c : model.classes)
    c.covariance /= double(c.count);

  if (priors) {
    const auto [p1, p2] = *priors;
    if (!(p1 > 0) || !(p2 > 0) || std::abs(p1 + p2 - 1) > 1e-12)
      throw DomainError("train: priors must be positive and sum to 1");
    model.classes[0].prior = p1;
    model.classes[1].prior = p2;
  } else {
    for (auto &c : model.classes)
      c.prior = double(c.count) / double(N);
  }

  const auto &c1 = model.classes[0];
  const auto &c2 = model.classes[1];
  Eigen::MatrixXd pooled = c1.prior * c1.covariance + c2.prior * c2.covariance;
  pooled = ((pooled + pooled.transpose()) / 2).eval();
  const auto reg = regularize_scatter(pooled, "pooled covariance");
  model.ridge = reg.ridge;
  model.V = reg.matrix.ldlt().solve(c1.mean - c2.mean);
  model.v0 = -model.V.dot(c1.prior * c1.mean + c2.prior * c2.mean);
  if (!model.V.allFinite() || !std::isfinite(model.v0))
    throw NumericalError("train: classifier coefficients are not finite");
  if (m == 1)
    model.z0 = -model.v0 / model.V[0];

  for (auto &c : model.classes) {
    c.eta = model.V.dot(c.mean) + model.v0;
    c.sigma2 = std::max(0.0, model.V.dot(c.covariance * model.V));
  }
  model.criterion = criterion_f(model.V, model.v0, model.classes);
  return model;
}

double decision_value(const ClassifierModel &model, const Eigen::VectorXd &z) {
  if (z.size() != model.V.size())
    throw DomainError("classify: reduced vector has " + std::to_string(z.size()) +
                      " entries, model expects " + std::to_string(model.V.size()));
  return (model.V.dot(z) + model.v0) / model.V.norm();
}

Decision classify(const ClassifierModel &model, const Eigen::VectorXd &z,
                  std::string subject_id, std::string lead_name, int fragment_index) {
  Decision d;
  d.subject_id = std::move(subject_id);
  d.lead_name = std::move(lead_name);
  d.fragment_index = fragment_index;
  d.z = z;
  d.h = decision_value(model, z);
  d.label = d.h > 0 ? DecisionLabel::class1_healthy : DecisionLabel::class2_sick;
  return d;
}

PatientSummary aggregate_patient(std::span<const Decision> decisions, AggregationMode mode) {
  if (decisions.empty())
    throw DomainError("aggregate_patient: no decisions");
  PatientSummary out;
  out.subject_id = decisions.front().subject_id;

  // Lead order follows first appearance.
  std::vector<std::string> leads;
  std::map<std::string, std::pair<double, int>> per_lead;
  for (const auto &d : decisions) {
    auto [it, inserted] = per_lead.try_emplace(d.lead_name, 0.0, 0);
    if (inserted)
      leads.push_back(d.lead_name);
    it->second.first += d.h;
    ++it->second.second;
  }

  double sum = 0;
  if (mode == AggregationMode::all_fragments) {
    for (const auto &d : decisions)
      sum += d.h;
    out.value_count = decisions.size();
  } else {
    for (const auto &lead : leads) {
      const auto &[s, n] = per_lead[lead];
      sum += s / n;
    }
    out.value_count = leads.size();
  }
  out.mean_h = sum / double(out.value_count);
  out.label = out.mean_h > 0 ? DecisionLabel::class1_healthy : DecisionLabel::class2_sick;

  std::size_t positive = 0;
  for (const auto &d : decisions)
    positive += d.h > 0;
  const std::size_t negative = decisions.size() - positive;
  // With no clear majority the aggregate label decides.
  const bool majority_positive = positive != negative
                                     ? positive > negative
                                     : out.label == DecisionLabel::class1_healthy;
  for (const auto &lead : leads) {
    const bool differs = std::any_of(decisions.begin(), decisions.end(), [&](const auto &d) {
      return d.lead_name == lead && (d.h > 0) != majority_positive;
    });
    if (differs)
      out.problem_leads.push_back(lead);
  }
  return out;
}

EvaluationReport evaluate(const ClassifierModel &model, const Eigen::MatrixXd &reduced,
                          std::span<const int> labels, int bin_count) {
  const Eigen::Index N = reduced.rows();
  if (N == 0)
    throw DomainError("evaluate: empty test set");
  if (static_cast<Eigen::Index>(labels.size()) != N)
    throw DomainError("evaluate: " + std::to_string(labels.size()) + " labels for " +
                      std::to_string(N) + " samples");
  if (bin_count < 1)
    throw DomainError("evaluate: bin count must be positive");

  EvaluationReport report;
  report.z0 = model.z0;
  const bool scalar_axis = model.dimension() == 1;
  report.axis = scalar_axis ? "z" : "h";

  std::vector<double> values(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const int label = labels[i];
    if (label != 0 && label != 1)
      throw DomainError("evaluate: label " + std::to_string(label) + " in row " +
                        std::to_string(i));
    const Eigen::VectorXd z = reduced.row(i).transpose();
    const auto d = classify(model, z);
    ++report.totals[label];
    if (class_index(to_group(d.label)) != label)
      ++report.misclassified[label];
    values[i] = scalar_axis ? z[0] : d.h;
  }
  for (std::size_t k = 0; k < 2; ++k)
    report.rates[k] = report.totals[k] ? double(report.misclassified[k]) / report.totals[k] : 0;

  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (scalar_axis && model.z0) {
    lo = std::min(lo, *model.z0);
    hi = std::max(hi, *model.z0);
  }
  if (!(hi > lo)) {
    const double pad = lo == 0 ? 0.5 : std::abs(lo) * 0.5;
    lo -= pad;
    hi += pad;
  }
  const double width = (hi - lo) / bin_count;
  report.bins.resize(bin_count);
  for (int b = 0; b < bin_count; ++b) {
    report.bins[b].low = lo + b * width;
    report.bins[b].high = b + 1 == bin_count ? hi : lo + (b + 1) * width;
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    int b = static_cast<int>(std::floor((values[i] - lo) / width));
    b = std::clamp(b, 0, bin_count - 1);
    ++report.bins[b].counts[labels[i]];
  }
  return report;
}

std::string format_report_csv(const EvaluationReport &report) {
  std::string out;
  auto kv = [&](const std::string &key, const std::string &value) {
    out += "# " + key + "=" + value + "\n";
  };
  kv("axis", report.axis);
  kv("threshold", report.z0 ? format_double(*report.z0) : std::string("none"));
  for (std::size_t k = 0; k < 2; ++k) {
    const std::string prefix = "class" + std::to_string(k + 1);
    kv(prefix + "_total", std::to_string(report.totals[k]));
    kv(prefix + "_misclassified", std::to_string(report.misclassified[k]));
    kv(prefix + "_rate", format_double(report.rates[k]));
  }
  out += "bin_low,bin_high,count_class1,count_class2\n";
  for (const auto &bin : report.bins)
    out += format_double(bin.low) + "," + format_double(bin.high) + "," +
           std::to_string(bin.counts[0]) + "," + std::to_string(bin.counts[1]) + "\n";
  return out;
}

std::string format_report_svg(const EvaluationReport &report) {
  constexpr double width = 640, height = 360, margin = 40;
  const double plot_w = width - 2 * margin, plot_h = height - 2 * margin;
  int peak = 1;
  for (const auto &bin : report.bins)
    peak = std::max({peak, bin.counts[0], bin.counts[1]});
  const double lo = report.bins.empty() ? 0 : report.bins.front().low;
  const double hi = report.bins.empty() ? 1 : report.bins.back().high;
  const double span = hi > lo ? hi - lo : 1;
  auto x_of = [&](double v) { return margin + (v - lo) / span * plot_w; };

  char buf[256];
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\" "
                    "viewBox=\"0 0 640 360\">\n"
                    "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const char *colours[2] = {"#2b6cb0", "#c53030"};
  for (const auto &bin : report.bins) {
    const double x0 = x_of(bin.low), bw = x_of(bin.high) - x0;
    for (int k = 0; k < 2; ++k) {
      const double h = plot_h * bin.counts[k] / peak;
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" "
                    "fill=\"%s\" fill-opacity=\"0.5\"/>\n",
                    x0 + k * bw / 2, margin + plot_h - h, bw / 2, h, colours[k]);
      out += buf;
    }
  }
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"black\"/>\n",
                margin, margin + plot_h, margin + plot_w, margin + plot_h);
  out += buf;
  const double threshold = report.axis == "z" && report.z0 ? *report.z0 : 0.0;
  if (threshold >= lo && threshold <= hi) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"black\" "
                  "stroke-dasharray=\"4 3\"/>\n",
                  x_of(threshold), margin, x_of(threshold), margin + plot_h);
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s: class 1 %d/%d, class 2 "
                "%d/%d misclassified</text>\n",
                margin, margin - 12, report.axis.c_str(), report.misclassified[0],
                report.totals[0], report.misclassified[1], report.totals[1]);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\">%s</text>\n"
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">%s</text>\n",
                margin, height - 12, format_double(lo).c_str(), margin + plot_w, height - 12,
                format_double(hi).c_str());
  out += buf;
  out += "</svg>\n";
  return out;
}

} // namespace hfecg
