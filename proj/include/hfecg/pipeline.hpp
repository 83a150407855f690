#pragma once

#include "hfecg/classifier.hpp"
#include "hfecg/features.hpp"
#include "hfecg/model_io.hpp"
#include "hfecg/signal_io.hpp"
#include "hfecg/wavelet.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hfecg {

struct PipelineConfig {
  std::string bank = "dmey";
  int levels = 4;
  double fragment_duration_s = 8;
  int fragment_count = 2;
  FeatureMode feature_mode = FeatureMode::standard21;
  PriorMode prior_mode = PriorMode::proportional;
  ExtensionMode extension = ExtensionMode::symmetric;
  // Empty means automatic selection.
  std::optional<int> dimensions;
};

void validate(const PipelineConfig &config);
// Flat key=value text; unknown keys are errors.
PipelineConfig parse_pipeline_config(std::string_view text,
                                     PipelineConfig base = {});

/// Derives leads, cuts fragments, decomposes each and extracts features.
std::vector<FeatureVector> record_features(const EcgRecord &record,
                                           const PipelineConfig &config,
                                           const WaveletBank<double> &bank);

struct LabeledMatrix {
  Eigen::MatrixXd samples; // N x 21
  std::vector<int> labels; // 0 healthy, 1 sick
};

// Rows with a group label only; throws DataError naming the row on
// non-finite values.
LabeledMatrix labeled_matrix(const std::vector<FeatureVector> &rows);
Eigen::MatrixXd feature_matrix(const std::vector<FeatureVector> &rows);

PipelineModel train_pipeline(const std::vector<FeatureVector> &training,
                             const PipelineConfig &config,
                             const std::string &source = {},
                             int sampling_rate = 0);

std::vector<Decision> classify_rows(const PipelineModel &model,
                                    const std::vector<FeatureVector> &rows);

// Summaries in first-appearance order of subjects.
std::vector<PatientSummary> aggregate_subjects(const std::vector<Decision> &decisions,
                                               AggregationMode mode);

EvaluationReport evaluate_rows(const PipelineModel &model,
                               const std::vector<FeatureVector> &rows,
                               int bin_count = 20);

} // namespace hfecg
