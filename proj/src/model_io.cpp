#include "hfecg/model_io.hpp"

#include "hfecg/error.hpp"
#include "hfecg/text_io.hpp"

#include <json.hpp>

#include <cstdio>

namespace hfecg {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json to_json(const Eigen::VectorXd &v) { return std::vector<double>(v.begin(), v.end()); }

Eigen::VectorXd vector_from(const json &j, std::string_view what) {
  if (!j.is_array())
    throw FormatError("model: '" + std::string(what) + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw FormatError("model: '" + std::string(what) + "' holds a non-number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

// Row-major list of rows.
json to_json(const Eigen::MatrixXd &m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    rows.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  return rows;
}

Eigen::MatrixXd matrix_from(const json &j, std::string_view what) {
  if (!j.is_array())
    throw FormatError("model: '" + std::string(what) + "' must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = vector_from(j[r], what);
    if (r == 0)
      m.resize(rows, row.size());
    else if (row.size() != m.cols())
      throw FormatError("model: '" + std::string(what) + "' has ragged rows");
    m.row(r) = row.transpose();
  }
  return m;
}

std::string hash_hex(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace

std::string format_model_json(const PipelineModel &model) {
  const auto &r = model.reduction;
  const auto &c = model.classifier;
  json j;
  j["format_version"] = kFormatVersion;
  j["bank"] = model.bank_name;
  j["extension_mode"] = std::string(to_string(model.mode));
  j["levels"] = model.levels;
  j["feature_names"] = model.feature_names;
  j["feature_order_hash"] = hash_hex(model.feature_order_hash);
  j["reduction"] = {
      {"dimensions", r.dimensions},
      {"eigenvalues", to_json(r.eigenvalues)},
      // Columns Psi_1..Psi_n, one array per eigenvector.
      {"eigenvectors", to_json(Eigen::MatrixXd(r.eigenvectors.transpose()))},
      {"saved_information_percent", r.saved_information},
      {"ridge", r.ridge},
      {"condition_estimate", r.condition_estimate},
      {"power_eigenvalue", r.power_eigenvalue},
  };
  json classes = json::array();
  for (const auto &s : c.classes)
    classes.push_back({{"count", s.count},
                       {"prior", s.prior},
                       {"mean", to_json(s.mean)},
                       {"covariance", to_json(s.covariance)},
                       {"eta", s.eta},
                       {"sigma2", s.sigma2}});
  j["classifier"] = {{"V", to_json(c.V)},         {"v0", c.v0},
                     {"z0", c.z0 ? json(*c.z0) : json(nullptr)},
                     {"criterion_f", c.criterion}, {"ridge", c.ridge},
                     {"classes", classes}};
  j["training"] = {{"sample_counts", model.training.sample_counts},
                   {"prior_mode", model.training.prior_mode},
                   {"source", model.training.source},
                   {"sampling_rate", model.training.sampling_rate},
                   {"fragment_duration_s", model.training.fragment_duration_s}};
  return j.dump(2) + "\n";
}

PipelineModel parse_model_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kFormatVersion)
      throw FormatError("model: unsupported format_version " +
                        j.at("format_version").dump());
    PipelineModel model;
    model.bank_name = j.at("bank").get<std::string>();
    const auto mode = parse_extension_mode(j.at("extension_mode").get<std::string>());
    if (!mode)
      throw FormatError("model: unknown extension_mode " + j.at("extension_mode").dump());
    model.mode = *mode;
    model.levels = j.at("levels").get<int>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const auto hash = j.at("feature_order_hash").get<std::string>();
    std::size_t used = 0;
    model.feature_order_hash = std::stoull(hash, &used, 16);
    if (used != hash.size())
      throw FormatError("model: malformed feature_order_hash");

    const auto &jr = j.at("reduction");
    auto &r = model.reduction;
    r.dimensions = jr.at("dimensions").get<int>();
    r.eigenvalues = vector_from(jr.at("eigenvalues"), "eigenvalues");
    r.eigenvectors = matrix_from(jr.at("eigenvectors"), "eigenvectors").transpose();
    const auto n = r.eigenvalues.size();
    if (r.eigenvectors.rows() != n || r.eigenvectors.cols() != n)
      throw FormatError("model: eigenvectors do not match " + std::to_string(n) +
                        " eigenvalues");
    if (r.dimensions < 1 || r.dimensions > n)
      throw FormatError("model: reduction dimensions out of range");
    if (static_cast<Eigen::Index>(model.feature_names.size()) != n)
      throw FormatError("model: feature_names do not match the reduction dimension");
    r.reduction = r.eigenvectors.leftCols(r.dimensions);
    r.saved_information = jr.at("saved_information_percent").get<double>();
    r.ridge = jr.at("ridge").get<double>();
    r.condition_estimate = jr.at("condition_estimate").get<double>();
    r.power_eigenvalue = jr.at("power_eigenvalue").get<double>();

    const auto &jc = j.at("classifier");
    auto &c = model.classifier;
    c.V = vector_from(jc.at("V"), "V");
    if (c.V.size() != r.dimensions)
      throw FormatError("model: V has " + std::to_string(c.V.size()) +
                        " entries, reduction keeps " + std::to_string(r.dimensions));
    c.v0 = jc.at("v0").get<double>();
    if (!jc.at("z0").is_null())
      c.z0 = jc.at("z0").get<double>();
    c.criterion = jc.at("criterion_f").get<double>();
    c.ridge = jc.at("ridge").get<double>();
    const auto &classes = jc.at("classes");
    if (!classes.is_array() || classes.size() != 2)
      throw FormatError("model: classifier needs exactly 2 classes");
    for (std::size_t k = 0; k < 2; ++k) {
      const auto &js = classes[k];
      auto &s = c.classes[k];
      s.count = js.at("count").get<Eigen::Index>();
      s.prior = js.at("prior").get<double>();
      s.mean = vector_from(js.at("mean"), "mean");
      s.covariance = matrix_from(js.at("covariance"), "covariance");
      s.eta = js.at("eta").get<double>();
      s.sigma2 = js.at("sigma2").get<double>();
    }

    const auto &jt = j.at("training");
    model.training.sample_counts = jt.at("sample_counts").get<std::array<Eigen::Index, 2>>();
    model.training.prior_mode = jt.at("prior_mode").get<std::string>();
    model.training.source = jt.at("source").get<std::string>();
    model.training.sampling_rate = jt.at("sampling_rate").get<int>();
    model.training.fragment_duration_s = jt.at("fragment_duration_s").get<double>();
    return model;
  } catch (const json::exception &e) {
    throw FormatError(std::string("model: ") + e.what());
  } catch (const std::invalid_argument &) {
    throw FormatError("model: malformed feature_order_hash");
  } catch (const std::out_of_range &) {
    throw FormatError("model: malformed feature_order_hash");
  }
}

void save_model(const std::filesystem::path &path, const PipelineModel &model) {
  write_file_atomic(path, format_model_json(model));
}

PipelineModel load_model(const std::filesystem::path &path) {
  return parse_model_json(read_text_file(path));
}

} // namespace hfecg
