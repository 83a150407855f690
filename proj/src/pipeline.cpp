#include "hfecg/pipeline.hpp"

#include "hfecg/text_io.hpp"

#include <map>

namespace hfecg {

void validate(const PipelineConfig &config) {
  if (config.bank.empty())
    throw DomainError("config: bank name is empty");
  if (config.levels < 1 || config.levels > 8)
    throw DomainError("config: levels must lie in [1, 8] (got " +
                      std::to_string(config.levels) + ")");
  if (!(config.fragment_duration_s > 0))
    throw DomainError("config: fragment duration must be positive");
  if (config.fragment_count < 1)
    throw DomainError("config: fragment count must be >= 1");
  if (config.dimensions && (*config.dimensions < 1 || *config.dimensions > static_cast<int>(kFeatureCount)))
    throw DomainError("config: dimensions must lie in [1, " + std::to_string(kFeatureCount) +
                      "]");
}

PipelineConfig parse_pipeline_config(std::string_view text, PipelineConfig base) {
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#')
      continue;
    const std::string where = "config line " + std::to_string(i + 1);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(where + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    auto integer = [&] {
      const auto v = parse_integer(value);
      if (!v || *v < -1'000'000 || *v > 1'000'000)
        throw ParseError(where + ": expected an integer for " + std::string(key));
      return static_cast<int>(*v);
    };
    auto bad_value = [&] {
      return ParseError(where + ": invalid value '" + std::string(value) + "' for " +
                        std::string(key));
    };
    if (key == "bank") {
      base.bank = std::string(value);
    } else if (key == "levels") {
      base.levels = integer();
    } else if (key == "fragment_duration_s") {
      const auto v = parse_double(value);
      if (!v)
        throw bad_value();
      base.fragment_duration_s = *v;
    } else if (key == "fragment_count") {
      base.fragment_count = integer();
    } else if (key == "feature_mode") {
      const auto m = parse_feature_mode(value);
      if (!m)
        throw bad_value();
      base.feature_mode = *m;
    } else if (key == "priors") {
      const auto m = parse_prior_mode(value);
      if (!m)
        throw bad_value();
      base.prior_mode = *m;
    } else if (key == "extension") {
      const auto m = parse_extension_mode(value);
      if (!m)
        throw bad_value();
      base.extension = *m;
    } else if (key == "dimensions") {
      if (value == "auto")
        base.dimensions.reset();
      else
        base.dimensions = integer();
    } else {
      throw ParseError(where + ": unknown key '" + std::string(key) + "'");
    }
  }
  validate(base);
  return base;
}

std::vector<FeatureVector> record_features(const EcgRecord &record,
                                           const PipelineConfig &config,
                                           const WaveletBank<double> &bank) {
  validate(config);
  const auto leads = derive_leads(record);
  const auto fragments =
      extract_fragments(leads, config.fragment_duration_s, config.fragment_count);
  std::vector<FeatureVector> out;
  out.reserve(fragments.size());
  for (const auto &fragment : fragments) {
    const auto tree = wavedec(fragment.samples, config.levels, bank, config.extension);
    out.push_back(extract_features(fragment, tree, bank, config.feature_mode));
  }
  return out;
}

namespace {

void require_finite(const FeatureVector &row, std::size_t index) {
  if (!row.values.allFinite())
    throw DataError("feature row " + std::to_string(index + 1) + " (" + row.subject_id + " " +
                    row.lead_name + " fragment " + std::to_string(row.fragment_index) +
                    ") has a non-finite feature");
}

} // namespace

LabeledMatrix labeled_matrix(const std::vector<FeatureVector> &rows) {
  LabeledMatrix out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].group_label == GroupLabel::unlabeled)
      continue;
    require_finite(rows[i], i);
    kept.push_back(i);
  }
  out.samples.resize(static_cast<Eigen::Index>(kept.size()), kFeatureCount);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    out.samples.row(static_cast<Eigen::Index>(r)) = rows[kept[r]].values.transpose();
    out.labels.push_back(*class_index(rows[kept[r]].group_label));
  }
  return out;
}

Eigen::MatrixXd feature_matrix(const std::vector<FeatureVector> &rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require_finite(rows[i], i);
    out.row(static_cast<Eigen::Index>(i)) = rows[i].values.transpose();
  }
  return out;
}

PipelineModel train_pipeline(const std::vector<FeatureVector> &training,
                             const PipelineConfig &config, const std::string &source,
                             int sampling_rate) {
  validate(config);
  const auto data = labeled_matrix(training);
  const auto scatter = fit_scatter(data.samples, data.labels);

  PipelineModel model;
  model.bank_name = config.bank;
  model.mode = config.extension;
  model.levels = config.levels;
  model.feature_names.assign(feature_names().begin(), feature_names().end());
  model.feature_order_hash = feature_order_hash();
  model.reduction = reduce(scatter, config.dimensions);

  const Eigen::MatrixXd reduced = project_rows(model.reduction, data.samples);
  std::optional<std::array<double, 2>> priors;
  if (config.prior_mode == PriorMode::equal)
    priors = std::array<double, 2>{0.5, 0.5};
  model.classifier = train(reduced, data.labels, priors);

  model.training.sample_counts = {scatter.sample_counts[0], scatter.sample_counts[1]};
  model.training.prior_mode = std::string(to_string(config.prior_mode));
  model.training.source = source;
  model.training.sampling_rate = sampling_rate;
  model.training.fragment_duration_s = config.fragment_duration_s;
  return model;
}

namespace {

void check_compatible(const PipelineModel &model) {
  if (model.feature_order_hash != feature_order_hash())
    throw FormatError("model feature order does not match this build's feature set");
}

} // namespace

std::vector<Decision> classify_rows(const PipelineModel &model,
                                    const std::vector<FeatureVector> &rows) {
  check_compatible(model);
  const Eigen::MatrixXd reduced = project_rows(model.reduction, feature_matrix(rows));
  std::vector<Decision> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.push_back(classify(model.classifier,
                           reduced.row(static_cast<Eigen::Index>(i)).transpose(),
                           rows[i].subject_id, rows[i].lead_name, rows[i].fragment_index));
  return out;
}

std::vector<PatientSummary> aggregate_subjects(const std::vector<Decision> &decisions,
                                               AggregationMode mode) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<Decision>> by_subject;
  for (const auto &d : decisions) {
    auto [it, inserted] = by_subject.try_emplace(d.subject_id);
    if (inserted)
      order.push_back(d.subject_id);
    it->second.push_back(d);
  }
  std::vector<PatientSummary> out;
  for (const auto &subject : order)
    out.push_back(aggregate_patient(by_subject[subject], mode));
  return out;
}

EvaluationReport evaluate_rows(const PipelineModel &model,
                               const std::vector<FeatureVector> &rows, int bin_count) {
  check_compatible(model);
  const auto data = labeled_matrix(rows);
  if (data.labels.empty())
    throw InsufficientDataError("evaluate: no labeled rows in the feature table");
  return evaluate(model.classifier, project_rows(model.reduction, data.samples), data.labels,
                  bin_count);
}

} // namespace hfecg
