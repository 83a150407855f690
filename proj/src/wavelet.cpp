#include "hfecg/wavelet.hpp"

#include "hfecg/spectral.hpp"
#include "hfecg/text_io.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <utility>

namespace hfecg {

namespace detail {
extern const std::array<std::pair<std::string_view, std::string_view>, 2> kBundledBanks;
}

std::string_view to_string(ExtensionMode mode) {
  return mode == ExtensionMode::symmetric ? "symmetric" : "periodic";
}

std::optional<ExtensionMode> parse_extension_mode(std::string_view text) {
  if (text == "symmetric" || text == "sym")
    return ExtensionMode::symmetric;
  if (text == "periodic" || text == "per")
    return ExtensionMode::periodic;
  return std::nullopt;
}

std::string to_string(const Band &band) {
  return (band.kind == Band::Kind::detail ? "D" : "A") + std::to_string(band.level);
}

Band parse_band(std::string_view text) {
  text = trim(text);
  if (text.size() >= 2) {
    const char kind = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    const auto level = parse_integer(text.substr(1));
    if ((kind == 'D' || kind == 'A') && level && *level >= 1 && *level <= kMaxLevels)
      return {kind == 'D' ? Band::Kind::detail : Band::Kind::approximation,
              static_cast<int>(*level)};
  }
  throw DomainError("unknown band '" + std::string(text) + "'");
}

WaveletBank<double> parse_bank(std::string_view text) {
  std::string name;
  std::optional<double> center;
  std::vector<double> taps;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty())
      continue;
    if (line.front() == '#') {
      if (const auto kv = parse_comment_pair(line)) {
        if (kv->first == "name")
          name = std::string(kv->second);
        else if (kv->first == "center_frequency") {
          center = parse_double(kv->second);
          if (!center)
            throw ParseError("bank line " + std::to_string(i + 1) +
                             ": invalid center_frequency");
        }
      }
      continue;
    }
    const auto v = parse_double(line);
    if (!v)
      throw ParseError("bank line " + std::to_string(i + 1) + ": non-numeric tap '" +
                       std::string(line) + "'");
    taps.push_back(*v);
  }
  if (name.empty())
    throw FormatError("bank file lacks a '# name=' line");
  if (!center)
    throw FormatError("bank '" + name + "' lacks a '# center_frequency=' line");
  return make_bank(name,
                   Signal<double>(Eigen::Map<const Eigen::VectorXd>(
                       taps.data(), static_cast<Eigen::Index>(taps.size()))),
                   *center);
}

WaveletBank<double> load_bank(const std::filesystem::path &path) {
  return parse_bank(read_text_file(path));
}

std::string format_bank(const WaveletBank<double> &bank) {
  char buffer[64];
  std::string out = "# name=" + bank.name + "\n";
  std::snprintf(buffer, sizeof buffer, "%.17e", bank.center_frequency);
  out += "# center_frequency=" + std::string(buffer) + "\n";
  for (Eigen::Index k = 0; k < bank.length(); ++k) {
    std::snprintf(buffer, sizeof buffer, "%.17e", bank.lowpass[k]);
    out += std::string(buffer) + "\n";
  }
  return out;
}

WaveletBank<double> bundled_bank(std::string_view name) {
  for (const auto &[id, text] : detail::kBundledBanks)
    if (id == name)
      return parse_bank(text);
  throw DomainError("unknown wavelet bank '" + std::string(name) + "'");
}

std::vector<std::string> bundled_bank_names() {
  std::vector<std::string> names;
  for (const auto &entry : detail::kBundledBanks)
    names.emplace_back(entry.first);
  return names;
}

WaveletBank<double> resolve_bank(std::string_view name_or_path) {
  for (const auto &entry : detail::kBundledBanks)
    if (entry.first == name_or_path)
      return bundled_bank(name_or_path);
  const std::filesystem::path path{std::string(name_or_path)};
  if (std::filesystem::exists(path))
    return load_bank(path);
  throw DomainError("unknown wavelet bank '" + std::string(name_or_path) +
                    "' (not bundled and no such file)");
}

double cascade_center_frequency(const WaveletBank<double> &bank, int iterations) {
  if (iterations < 1 || iterations > 14)
    throw DomainError("cascade_center_frequency: iterations must be in 1..14");
  const Eigen::Index L = bank.length();
  const double root2 = std::sqrt(2.0);
  // One high-pass synthesis step followed by low-pass steps.
  Eigen::VectorXd psi = root2 * bank.highpass;
  for (int it = 1; it < iterations; ++it) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(2 * (psi.size() - 1) + L);
    for (Eigen::Index i = 0; i < psi.size(); ++i)
      next.segment(2 * i, L) += root2 * psi[i] * bank.lowpass;
    psi = std::move(next);
  }
  const Eigen::Index grid = (L - 1) << iterations;
  Eigen::VectorXd sampled = Eigen::VectorXd::Zero(grid);
  const Eigen::Index keep = std::min(grid, psi.size());
  sampled.head(keep) = psi.head(keep);
  sampled.array() -= sampled.mean();
  const Eigen::VectorXd magnitude = fft(sampled).cwiseAbs();
  Eigen::Index k;
  magnitude.maxCoeff(&k);
  if (2 * k > grid)
    k = grid - k;
  const double support = static_cast<double>(grid - 1) / std::ldexp(1.0, iterations);
  return static_cast<double>(k) / support;
}

} // namespace hfecg
