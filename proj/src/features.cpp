#include "hfecg/features.hpp"

#include "hfecg/text_io.hpp"

#include <map>

namespace hfecg {

namespace {

constexpr std::array<std::string_view, 5> kPerComponent = {
    "max_abs", "l2_energy", "peak_power", "peak_freq_hz", "shannon_entropy"};
constexpr std::array<std::string_view, 4> kExtendedPerComponent = {
    "variance", "l1_energy", "relative_l2", "mean_inst_freq_hz"};
constexpr std::array<std::string_view, 4> kIdentityColumns = {
    "subject_id", "lead", "fragment_index", "group_label"};

std::string component_prefix(int s) { return "d" + std::to_string(s) + "_"; }

} // namespace

const std::array<std::string, kFeatureCount> &feature_names() {
  static const auto names = [] {
    std::array<std::string, kFeatureCount> out;
    std::size_t i = 0;
    for (int s = 1; s <= kComponentCount; ++s)
      for (auto f : kPerComponent)
        out[i++] = component_prefix(s) + std::string(f);
    out[i] = "d4_hurst";
    return out;
  }();
  return names;
}

const std::vector<std::string> &extended_feature_names() {
  static const auto names = [] {
    std::vector<std::string> out;
    for (int s = 1; s <= kComponentCount; ++s)
      for (auto f : kExtendedPerComponent)
        out.push_back(component_prefix(s) + std::string(f));
    for (int s = 1; s < kComponentCount; ++s)
      out.push_back(component_prefix(s) + "hurst");
    return out;
  }();
  return names;
}

std::uint64_t feature_order_hash() {
  std::uint64_t hash = 14695981039346656037ull;
  bool first = true;
  for (const auto &name : feature_names()) {
    std::string_view piece = name;
    if (!first) {
      hash ^= static_cast<unsigned char>(',');
      hash *= 1099511628211ull;
    }
    first = false;
    for (char c : piece) {
      hash ^= static_cast<unsigned char>(c);
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::standard21 ? "standard21" : "extended";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view text) {
  if (text == "standard21" || text == "standard")
    return FeatureMode::standard21;
  if (text == "extended")
    return FeatureMode::extended;
  return std::nullopt;
}

FeatureVector extract_features(const Fragment &fragment,
                               const DecompositionTree<double> &tree,
                               const WaveletBank<double> &bank, FeatureMode mode) {
  if (tree.levels != kComponentCount)
    throw DomainError("extract_features: need a " + std::to_string(kComponentCount) +
                      "-level decomposition (got " + std::to_string(tree.levels) + ")");
  if (tree.original_length() != fragment.samples.size())
    throw DomainError("extract_features: decomposition length does not match the fragment");

  FeatureVector fv;
  fv.subject_id = fragment.subject_id;
  fv.lead_name = std::string(to_string(fragment.lead));
  fv.fragment_index = fragment.fragment_index;
  fv.group_label = fragment.group_label;

  const double rate = fragment.sampling_rate;
  std::array<Eigen::VectorXd, kComponentCount> components;
  for (int s = 1; s <= kComponentCount; ++s) {
    const Eigen::VectorXd rec = reconstruct_component(tree, Band::d(s), bank);
    const auto spectrum = dft(rec, rate);
    const auto peak = spectrum_peak(spectrum);
    const Eigen::Index base = (s - 1) * static_cast<Eigen::Index>(kPerComponent.size());
    fv.values[base + 0] = max_abs(rec);
    fv.values[base + 1] = l2_energy(rec);
    fv.values[base + 2] = peak.power;
    fv.values[base + 3] = peak.frequency_hz;
    fv.values[base + 4] = shannon_entropy(rec);
    components[s - 1] = rec;
  }
  fv.values[kFeatureCount - 1] = hurst_rs(components[kComponentCount - 1]);

  if (mode == FeatureMode::extended) {
    for (const auto &rec : components) {
      fv.extended.push_back(dispersion(rec));
      fv.extended.push_back(l1_energy(rec));
      fv.extended.push_back(relative_l2(rec, fragment.samples));
      fv.extended.push_back(mean_instantaneous_frequency(rec, rate));
    }
    for (int s = 0; s < kComponentCount - 1; ++s)
      fv.extended.push_back(hurst_rs(components[s]));
  }
  return fv;
}

std::string format_feature_table(const std::vector<FeatureVector> &rows) {
  bool extended = false;
  for (const auto &row : rows)
    extended = extended || !row.extended.empty();
  for (const auto &row : rows)
    if (extended && row.extended.size() != extended_feature_names().size())
      throw DomainError("feature table mixes standard and extended rows");

  std::string out;
  for (auto column : kIdentityColumns) {
    out += column;
    out += ',';
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    out += feature_names()[i] + (i + 1 < kFeatureCount || extended ? "," : "");
  if (extended) {
    const auto &names = extended_feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
      out += names[i] + (i + 1 < names.size() ? "," : "");
  }
  out += '\n';
  for (const auto &row : rows) {
    out += row.subject_id + "," + row.lead_name + "," + std::to_string(row.fragment_index) +
           "," + std::string(to_string(row.group_label));
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      out += "," + format_double(row.values[static_cast<Eigen::Index>(i)]);
    for (double v : row.extended)
      out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<FeatureVector> parse_feature_table(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t line_no = 0;
  while (line_no < lines.size() &&
         (trim(lines[line_no]).empty() || trim(lines[line_no]).front() == '#'))
    ++line_no;
  if (line_no == lines.size())
    throw FormatError("feature table has no header");

  std::map<std::string, std::size_t, std::less<>> column_of;
  const auto header = split(lines[line_no], ',');
  for (std::size_t j = 0; j < header.size(); ++j) {
    const auto name = std::string(trim(header[j]));
    if (!column_of.emplace(name, j).second)
      throw FormatError("duplicate feature table column '" + name + "'");
  }
  auto require = [&](std::string_view name) {
    const auto it = column_of.find(name);
    if (it == column_of.end())
      throw FormatError("feature table lacks column '" + std::string(name) + "'");
    return it->second;
  };
  std::array<std::size_t, 4> identity{};
  for (std::size_t i = 0; i < kIdentityColumns.size(); ++i)
    identity[i] = require(kIdentityColumns[i]);
  std::array<std::size_t, kFeatureCount> feature_cols{};
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    feature_cols[i] = require(feature_names()[i]);
  std::vector<std::size_t> extended_cols;
  for (const auto &name : extended_feature_names())
    if (const auto it = column_of.find(name); it != column_of.end())
      extended_cols.push_back(it->second);
  if (!extended_cols.empty() && extended_cols.size() != extended_feature_names().size())
    throw FormatError("feature table has a partial set of extended columns");

  std::vector<FeatureVector> rows;
  for (++line_no; line_no < lines.size(); ++line_no) {
    const auto line = trim(lines[line_no]);
    if (line.empty() || line.front() == '#')
      continue;
    const auto cells = split(line, ',');
    const std::string where = "feature table line " + std::to_string(line_no + 1);
    if (cells.size() != header.size())
      throw ParseError(where + ": " + std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(header.size()));
    auto number = [&](std::size_t col) {
      const auto v = parse_double(cells[col]);
      if (!v)
        throw ParseError(where + ": non-numeric value '" + std::string(trim(cells[col])) +
                         "' in column " + std::string(trim(header[col])));
      return *v;
    };
    FeatureVector fv;
    fv.subject_id = std::string(trim(cells[identity[0]]));
    fv.lead_name = std::string(trim(cells[identity[1]]));
    const auto index = parse_integer(cells[identity[2]]);
    if (!index)
      throw ParseError(where + ": invalid fragment_index");
    fv.fragment_index = static_cast<int>(*index);
    const auto label = parse_group_label(trim(cells[identity[3]]));
    if (!label)
      throw ParseError(where + ": unknown group_label '" +
                       std::string(trim(cells[identity[3]])) + "'");
    fv.group_label = *label;
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      fv.values[static_cast<Eigen::Index>(i)] = number(feature_cols[i]);
    for (auto col : extended_cols)
      fv.extended.push_back(number(col));
    rows.push_back(std::move(fv));
  }
  return rows;
}

std::vector<FeatureVector> load_feature_table(const std::filesystem::path &path) {
  return parse_feature_table(read_text_file(path));
}

} // namespace hfecg
