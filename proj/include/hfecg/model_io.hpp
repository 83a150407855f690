#pragma once

#include "hfecg/classifier.hpp"
#include "hfecg/discriminant.hpp"
#include "hfecg/wavelet.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hfecg {

struct TrainingMetadata {
  std::array<Eigen::Index, 2> sample_counts{};
  std::string prior_mode;
  std::string source;
  int sampling_rate = 0;
  double fragment_duration_s = 0;
};

/// Everything needed to classify a feature table: the reduction, the linear
/// classifier and the front-end settings the features were computed with.
struct PipelineModel {
  std::string bank_name;
  ExtensionMode mode = ExtensionMode::symmetric;
  int levels = 4;
  std::vector<std::string> feature_names;
  std::uint64_t feature_order_hash = 0;
  ReductionModel<double> reduction;
  ClassifierModel classifier;
  TrainingMetadata training;
};

std::string format_model_json(const PipelineModel &model);
PipelineModel parse_model_json(std::string_view text);
void save_model(const std::filesystem::path &path, const PipelineModel &model);
PipelineModel load_model(const std::filesystem::path &path);

} // namespace hfecg
