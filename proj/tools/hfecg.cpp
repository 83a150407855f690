// Command-line driver for the ECG classification pipeline.

#include "hfecg/pipeline.hpp"
#include "hfecg/spectral.hpp"
#include "hfecg/synthgen.hpp"
#include "hfecg/text_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace hfecg;

namespace {

enum ExitCode {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kParse = 5,
  kLengthMismatch = 6,
  kInsufficientData = 7,
  kDomain = 8,
  kData = 9,
  kNumerical = 10,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::io: return kIo;
  case ErrorKind::format: return kFormat;
  case ErrorKind::parse: return kParse;
  case ErrorKind::length_mismatch: return kLengthMismatch;
  case ErrorKind::insufficient_data: return kInsufficientData;
  case ErrorKind::domain: return kDomain;
  case ErrorKind::data: return kData;
  case ErrorKind::numerical: return kNumerical;
  }
  return kInternal;
}

// One line, quotes and control characters escaped.
std::string quoted(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\')
      out += '\\', out += c;
    else if (c == '\n')
      out += "\\n";
    else if (static_cast<unsigned char>(c) < 0x20)
      out += ' ';
    else
      out += c;
  }
  return out + "\"";
}

int report(std::string_view code, std::string_view message, int status) {
  std::cerr << "error: code=" << code << " message=" << quoted(message) << "\n";
  return status;
}

// Options shared by the subcommands that compute features.
struct FrontEnd {
  std::string config_path;
  std::string bank;
  int levels = 0;
  double fragment_duration_s = 0;
  int fragment_count = 0;
  std::string extension;

  void add_to(CLI::App &cmd) {
    cmd.add_option("--config", config_path, "Pipeline config file (key=value)")
        ->check(CLI::ExistingFile);
    cmd.add_option("--bank", bank, "Bundled bank name (dmey, haar) or bank file path");
    cmd.add_option("--levels", levels, "Decomposition levels (default 4)");
    cmd.add_option("--fragment-duration", fragment_duration_s,
                   "Fragment duration in seconds (default 8)");
    cmd.add_option("--fragment-count", fragment_count, "Fragments per lead (default 2)");
    cmd.add_option("--extension", extension, "Extension mode: symmetric or periodic");
  }

  PipelineConfig resolve() const {
    PipelineConfig config;
    if (!config_path.empty())
      config = parse_pipeline_config(read_text_file(config_path));
    if (!bank.empty())
      config.bank = bank;
    if (levels != 0)
      config.levels = levels;
    if (fragment_duration_s != 0)
      config.fragment_duration_s = fragment_duration_s;
    if (fragment_count != 0)
      config.fragment_count = fragment_count;
    if (!extension.empty()) {
      const auto mode = parse_extension_mode(extension);
      if (!mode)
        throw DomainError("unknown extension mode '" + extension + "'");
      config.extension = *mode;
    }
    validate(config);
    return config;
  }
};

std::string fragment_stem(const Fragment &f) {
  return f.subject_id + "_" + std::string(to_string(f.lead)) + "_f" +
         std::to_string(f.fragment_index);
}

int cmd_synth(const std::string &config_path, const std::string &out_dir, int subjects,
              int first_subject) {
  const auto config = parse_synth_config(read_text_file(config_path));
  const int count = subjects > 0 ? subjects : config.subjects_per_class;
  const auto records =
      generate_population(config.healthy, config.sick, count, count, first_subject);
  fs::create_directories(out_dir);
  std::string manifest = "subject_id,group_label,file\n";
  for (const auto &record : records) {
    const std::string name = record.subject_id + ".csv";
    write_file_atomic(fs::path(out_dir) / name, format_record_csv(record));
    manifest += record.subject_id + "," + std::string(to_string(record.group_label)) + "," +
                name + "\n";
  }
  write_file_atomic(fs::path(out_dir) / "subjects.csv", manifest);
  std::cout << "wrote " << records.size() << " records to " << out_dir << "\n";
  return kOk;
}

int cmd_decompose(const std::string &input, const std::string &out_dir,
                  const FrontEnd &front) {
  const auto config = front.resolve();
  const auto bank = resolve_bank(config.bank);
  const auto record = load_record(input);
  const auto fragments = extract_fragments(derive_leads(record), config.fragment_duration_s,
                                           config.fragment_count);
  const fs::path out(out_dir);
  fs::create_directories(out / "components");

  std::string coefficients = "subject_id,lead,fragment_index,band,index,value\n";
  std::string manifest =
      "subject_id,lead,fragment_index,band,coefficient_count,center_hz,low_hz,high_hz,"
      "component_file\n";
  for (const auto &f : fragments) {
    const auto tree = wavedec(f.samples, config.levels, bank, config.extension);
    const std::string stem = fragment_stem(f);
    const std::string component_file = "components/" + stem + ".csv";
    const std::string prefix = f.subject_id + "," + std::string(to_string(f.lead)) + "," +
                               std::to_string(f.fragment_index) + ",";

    std::vector<Band> bands;
    for (int s = 1; s <= tree.levels; ++s)
      bands.push_back(Band::d(s));
    bands.push_back(Band::a(tree.levels));

    std::vector<Eigen::VectorXd> components;
    std::string header = "sample";
    for (const auto &band : bands) {
      components.push_back(reconstruct_component(tree, band, bank));
      header += "," + to_string(band);
      const Eigen::VectorXd coeffs =
          band.kind == Band::Kind::detail
              ? tree.detail(band.level)
              : Eigen::VectorXd(approximation_coefficients(tree, band.level, bank));
      for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        coefficients += prefix + to_string(band) + "," + std::to_string(k) + "," +
                        format_double(coeffs[k]) + "\n";
      const auto info = band_of_level(band.level, f.sampling_rate, bank);
      // The approximation band runs from 0 up to the low edge of its level.
      const double low = band.kind == Band::Kind::detail ? info.low_hz : 0.0;
      const double high = band.kind == Band::Kind::detail ? info.high_hz : info.low_hz;
      const double centre = band.kind == Band::Kind::detail ? info.center_hz : high / 2;
      manifest += prefix + to_string(band) + "," + std::to_string(coeffs.size()) + "," +
                  format_double(centre) + "," + format_double(low) + "," +
                  format_double(high) + "," + component_file + "\n";
    }
    std::string table = header + "\n";
    for (Eigen::Index i = 0; i < f.samples.size(); ++i) {
      table += std::to_string(i);
      for (const auto &c : components)
        table += "," + format_double(c[i]);
      table += "\n";
    }
    write_file_atomic(out / component_file, table);
  }
  write_file_atomic(out / "coefficients.csv", coefficients);
  write_file_atomic(out / "coefficients_manifest.csv", manifest);
  write_file_atomic(out / "fragments.csv", format_fragment_manifest(fragments));
  std::cout << "decomposed " << fragments.size() << " fragments (" << config.levels
            << " levels, " << bank.name << ") into " << out_dir << "\n";
  return kOk;
}

int cmd_features(const std::vector<std::string> &inputs, const std::string &output,
                 const FrontEnd &front, bool extended) {
  auto config = front.resolve();
  if (extended)
    config.feature_mode = FeatureMode::extended;
  const auto bank = resolve_bank(config.bank);
  std::vector<FeatureVector> rows;
  for (const auto &path : inputs) {
    auto record = load_record(path);
    if (record.subject_id.empty())
      record.subject_id = fs::path(path).stem().string();
    auto part = record_features(record, config, bank);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  write_file_atomic(output, format_feature_table(rows));
  std::cout << "wrote " << rows.size() << " feature rows to " << output << "\n";
  return kOk;
}

int cmd_train(const std::string &input, const std::string &output, const FrontEnd &front,
              const std::string &priors, const std::string &dimensions, int sampling_rate) {
  auto config = front.resolve();
  if (!priors.empty()) {
    const auto mode = parse_prior_mode(priors);
    if (!mode)
      throw DomainError("unknown prior mode '" + priors + "'");
    config.prior_mode = *mode;
  }
  if (!dimensions.empty()) {
    if (dimensions == "auto") {
      config.dimensions.reset();
    } else {
      const auto m = parse_integer(dimensions);
      if (!m)
        throw DomainError("dimensions must be an integer or 'auto'");
      config.dimensions = static_cast<int>(*m);
    }
    validate(config);
  }
  const auto rows = load_feature_table(input);
  const auto model = train_pipeline(rows, config, fs::path(input).filename().string(),
                                    sampling_rate);
  save_model(output, model);
  const auto &r = model.reduction;
  std::cout << "trained on " << model.training.sample_counts[0] << " + "
            << model.training.sample_counts[1] << " rows: m=" << r.dimensions
            << " lambda1=" << format_double(r.eigenvalues[0])
            << " saved_information=" << format_double(r.saved_information) << "%";
  if (model.classifier.z0)
    std::cout << " z0=" << format_double(*model.classifier.z0);
  std::cout << "\n";
  return kOk;
}

int cmd_classify(const std::string &model_path, const std::string &input,
                 const std::string &output, const std::string &patients_path,
                 bool per_lead_mean) {
  const auto model = load_model(model_path);
  const auto rows = load_feature_table(input);
  const auto decisions = classify_rows(model, rows);

  std::string table = "subject_id,lead,fragment_index,";
  for (Eigen::Index i = 0; i < model.classifier.dimension(); ++i)
    table += "z" + std::to_string(i + 1) + ",";
  table += "h,label\n";
  for (const auto &d : decisions) {
    table += d.subject_id + "," + d.lead_name + "," + std::to_string(d.fragment_index) + ",";
    for (double z : d.z)
      table += format_double(z) + ",";
    table += format_double(d.h) + "," + std::string(to_string(d.label)) + "\n";
  }
  write_file_atomic(output, table);

  const auto summaries = aggregate_subjects(
      decisions, per_lead_mean ? AggregationMode::per_lead_mean : AggregationMode::all_fragments);
  std::string patients = "subject_id,mean_h,label,value_count,problem_leads\n";
  for (const auto &s : summaries) {
    std::string leads;
    for (const auto &l : s.problem_leads)
      leads += (leads.empty() ? "" : ";") + l;
    patients += s.subject_id + "," + format_double(s.mean_h) + "," +
                std::string(to_string(s.label)) + "," + std::to_string(s.value_count) + "," +
                leads + "\n";
    std::cout << s.subject_id << ": mean_h=" << format_double(s.mean_h) << " "
              << to_string(s.label)
              << (s.problem_leads.empty() ? "" : " problem_leads=" + leads) << "\n";
  }
  if (!patients_path.empty())
    write_file_atomic(patients_path, patients);
  return kOk;
}

int cmd_evaluate(const std::string &model_path, const std::string &input,
                 const std::string &output, int bins, const std::string &svg_path) {
  const auto model = load_model(model_path);
  const auto report = evaluate_rows(model, load_feature_table(input), bins);
  write_file_atomic(output, format_report_csv(report));
  if (!svg_path.empty())
    write_file_atomic(svg_path, format_report_svg(report));
  for (std::size_t k = 0; k < 2; ++k)
    std::cout << "class" << k + 1 << ": " << report.misclassified[k] << "/" << report.totals[k]
              << " misclassified (" << format_double(100 * report.rates[k]) << "%)\n";
  if (report.z0)
    std::cout << "threshold z0=" << format_double(*report.z0) << "\n";
  return kOk;
}

int cmd_spectrum(const std::string &input, const std::string &output, const std::string &lead,
                 int fragment, const std::string &band_name, const FrontEnd &front) {
  const auto config = front.resolve();
  const auto parsed_lead = parse_lead(lead);
  if (!parsed_lead)
    throw DomainError("unknown lead '" + lead + "'");
  if (fragment < 0 || fragment >= config.fragment_count)
    throw DomainError("fragment index must lie in [0, " +
                      std::to_string(config.fragment_count - 1) + "]");
  const auto record = load_record(input);
  const auto fragments = extract_fragments(derive_leads(record), config.fragment_duration_s,
                                           config.fragment_count);
  const auto it = std::find_if(fragments.begin(), fragments.end(), [&](const Fragment &f) {
    return f.lead == *parsed_lead && f.fragment_index == fragment;
  });
  Eigen::VectorXd signal = it->samples;
  if (band_name != "raw") {
    const auto bank = resolve_bank(config.bank);
    const auto tree = wavedec(signal, config.levels, bank, config.extension);
    signal = reconstruct_component(tree, parse_band(band_name), bank);
  }
  const auto spectrum = dft(signal, double(record.sampling_rate));
  std::string table = "bin,frequency_hz,power\n";
  for (Eigen::Index k = 0; k <= spectrum.size() / 2; ++k)
    table += std::to_string(k) + "," + format_double(spectrum.frequency(k)) + "," +
             format_double(spectrum.power[k]) + "\n";
  write_file_atomic(output, table);
  const auto peak = spectrum_peak(spectrum);
  std::cout << lead << " fragment " << fragment << " " << band_name
            << ": peak_freq_hz=" << format_double(peak.frequency_hz)
            << " peak_power=" << format_double(peak.power)
            << " centroid_hz=" << format_double(spectral_centroid(spectrum)) << "\n";
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"High-frequency ECG component analysis and classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hfecg 1.0");

  auto *synth = app.add_subcommand("synth", "Generate a labeled synthetic population");
  std::string synth_config, synth_out;
  int synth_subjects = 0, synth_first = 1;
  synth->add_option("--config", synth_config, "Synthesis config (key=value)")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out-dir", synth_out, "Directory for record CSVs")->required();
  synth->add_option("--subjects", synth_subjects, "Subjects per class (overrides config)");
  synth->add_option("--first-subject", synth_first,
                    "Number of the first subject; shifts ids and seeds");

  auto *decompose = app.add_subcommand("decompose", "Wavelet components of every lead fragment");
  std::string decompose_in, decompose_out;
  FrontEnd decompose_front;
  decompose->add_option("input", decompose_in, "Record CSV")->required();
  decompose->add_option("--out-dir", decompose_out, "Output directory")->required();
  decompose_front.add_to(*decompose);

  auto *features = app.add_subcommand("features", "Feature table for one or more records");
  std::vector<std::string> features_in;
  std::string features_out;
  bool extended = false;
  FrontEnd features_front;
  features->add_option("inputs", features_in, "Record CSVs")->required();
  features->add_option("--out", features_out, "Feature table CSV")->required();
  features->add_flag("--extended", extended, "Append the extended feature columns");
  features_front.add_to(*features);

  auto *train = app.add_subcommand("train", "Fit the reduction and the linear classifier");
  std::string train_in, train_out, priors, dimensions;
  int train_rate = 0;
  FrontEnd train_front;
  train->add_option("input", train_in, "Labeled feature table")->required();
  train->add_option("--out", train_out, "Model JSON")->required();
  train->add_option("--priors", priors, "proportional (default) or equal");
  train->add_option("--dimensions", dimensions, "Reduced dimension m, or auto");
  train->add_option("--rate", train_rate, "Sampling rate recorded in the model metadata");
  train_front.add_to(*train);

  auto *classify = app.add_subcommand("classify", "Per-lead decisions and patient summaries");
  std::string classify_model, classify_in, classify_out, patients_out;
  bool per_lead_mean = false;
  classify->add_option("model", classify_model, "Model JSON")->required();
  classify->add_option("input", classify_in, "Feature table")->required();
  classify->add_option("--out", classify_out, "Decisions CSV")->required();
  classify->add_option("--patients", patients_out, "Patient summary CSV");
  classify->add_flag("--per-lead-mean", per_lead_mean,
                     "Average fragments within each lead before averaging leads");

  auto *evaluate = app.add_subcommand("evaluate", "Misclassification rates and histograms");
  std::string evaluate_model, evaluate_in, evaluate_out, svg_out;
  int bins = 20;
  evaluate->add_option("model", evaluate_model, "Model JSON")->required();
  evaluate->add_option("input", evaluate_in, "Labeled feature table")->required();
  evaluate->add_option("--out", evaluate_out, "Report CSV")->required();
  evaluate->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);
  evaluate->add_option("--svg", svg_out, "Also write an SVG histogram");

  auto *spectrum = app.add_subcommand("spectrum", "Power spectrum of one lead fragment");
  std::string spectrum_in, spectrum_out, lead = "II", band = "raw";
  int fragment = 0;
  FrontEnd spectrum_front;
  spectrum->add_option("input", spectrum_in, "Record CSV")->required();
  spectrum->add_option("--out", spectrum_out, "Spectrum CSV")->required();
  spectrum->add_option("--lead", lead, "Lead name (default II)");
  spectrum->add_option("--fragment", fragment, "Fragment index (default 0)");
  spectrum->add_option("--component", band, "raw, or a component such as D1 or A4");
  spectrum_front.add_to(*spectrum);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return report("usage", e.what(), kUsage);
  }

  try {
    if (*synth)
      return cmd_synth(synth_config, synth_out, synth_subjects, synth_first);
    if (*decompose)
      return cmd_decompose(decompose_in, decompose_out, decompose_front);
    if (*features)
      return cmd_features(features_in, features_out, features_front, extended);
    if (*train)
      return cmd_train(train_in, train_out, train_front, priors, dimensions, train_rate);
    if (*classify)
      return cmd_classify(classify_model, classify_in, classify_out, patients_out,
                          per_lead_mean);
    if (*evaluate)
      return cmd_evaluate(evaluate_model, evaluate_in, evaluate_out, bins, svg_out);
    if (*spectrum)
      return cmd_spectrum(spectrum_in, spectrum_out, lead, fragment, band, spectrum_front);
  } catch (const Error &e) {
    return report(to_string(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const fs::filesystem_error &e) {
    return report("io", e.what(), kIo);
  } catch (const std::exception &e) {
    return report("internal", e.what(), kInternal);
  }
  return kUsage;
}
