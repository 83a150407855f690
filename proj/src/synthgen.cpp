#include "hfecg/synthgen.hpp"

#include "hfecg/error.hpp"
#include "hfecg/spectral.hpp"
#include "hfecg/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace hfecg {

namespace {

// Relative electrode gains for L, F, C1..C6.
constexpr std::array<double, kChannelCount> kChannelGain = {0.6, 1.0, 0.5, 0.8,
                                                            1.1, 1.3, 1.2, 0.9};

void check(bool ok, const std::string &message) {
  if (!ok)
    throw DomainError("synth spec: " + message);
}

void check_wave(const WaveShape &w, const char *name) {
  check(std::isfinite(w.amplitude) && w.amplitude >= 0,
        std::string(name) + " amplitude must be >= 0");
  check(std::isfinite(w.width_s) && w.width_s > 0, std::string(name) + " width must be > 0");
  check(std::isfinite(w.offset_s), std::string(name) + " offset must be finite");
}

double gaussian(double x, double width) { return std::exp(-0.5 * (x / width) * (x / width)); }

} // namespace

void validate(const SynthSpec &spec) {
  check(spec.rate > 0, "rate must be positive");
  check(std::isfinite(spec.duration_s) && spec.duration_s > 0, "duration must be positive");
  check(std::isfinite(spec.heart_rate_bpm) && spec.heart_rate_bpm > 0,
        "heart rate must be positive");
  check(spec.heart_rate_jitter_bpm >= 0 && spec.heart_rate_jitter_bpm < spec.heart_rate_bpm,
        "heart rate jitter must lie in [0, heart_rate_bpm)");
  check_wave(spec.p, "P");
  check_wave(spec.qrs, "QRS");
  check_wave(spec.t, "T");
  check(std::isfinite(spec.hf_gate_width_s) && spec.hf_gate_width_s > 0,
        "hf gate width must be > 0");
  check(std::isfinite(spec.noise_sigma) && spec.noise_sigma >= 0, "noise sigma must be >= 0");
  for (const auto &band : spec.hf_bands) {
    check(std::isfinite(band.amplitude) && band.amplitude >= 0, "hf amplitude must be >= 0");
    check(std::isfinite(band.bandwidth_hz) && band.bandwidth_hz > 0,
          "hf bandwidth must be > 0");
    check(band.center_hz > 0 && spec.rate > 2 * band.center_hz,
          "hf center " + format_double(band.center_hz) + " Hz must lie in (0, rate/2)");
  }
  check(sample_count(spec) >= 2, "record would have fewer than 2 samples");
}

Eigen::Index sample_count(const SynthSpec &spec) {
  return static_cast<Eigen::Index>(std::llround(spec.duration_s * spec.rate));
}

std::vector<Eigen::Index> beat_positions(const SynthSpec &spec, double heart_rate_bpm) {
  const Eigen::Index n = sample_count(spec);
  const double period = 60.0 / heart_rate_bpm * spec.rate;
  std::vector<Eigen::Index> beats;
  for (int k = 0;; ++k) {
    const auto pos = static_cast<Eigen::Index>(std::llround(period * (k + 0.5)));
    if (pos >= n)
      break;
    beats.push_back(pos);
  }
  return beats;
}

Eigen::VectorXd beat_waveform(const SynthSpec &spec, double heart_rate_bpm) {
  const Eigen::Index n = sample_count(spec);
  const double rate = spec.rate;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (const auto r : beat_positions(spec, heart_rate_bpm)) {
    for (const WaveShape *w : {&spec.p, &spec.qrs, &spec.t}) {
      const double centre = r + w->offset_s * rate;
      const double width = w->width_s * rate;
      const auto lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(centre - 6 * width));
      const auto hi = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(centre + 6 * width));
      for (Eigen::Index i = lo; i <= hi; ++i)
        out[i] += w->amplitude * gaussian(double(i) - centre, width);
    }
  }
  return out;
}

Eigen::VectorXd hf_component(const SynthSpec &spec, const std::vector<Eigen::Index> &beats,
                             std::mt19937_64 &rng) {
  const Eigen::Index n = sample_count(spec);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  if (spec.hf_bands.empty())
    return out;

  Eigen::VectorXd gate = Eigen::VectorXd::Zero(n);
  const double gate_width = spec.hf_gate_width_s * spec.rate;
  for (const auto r : beats) {
    const auto lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(r - 6 * gate_width));
    const auto hi = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(r + 6 * gate_width));
    for (Eigen::Index i = lo; i <= hi; ++i)
      gate[i] += gaussian(double(i - r), gate_width);
  }

  std::normal_distribution<double> normal;
  for (const auto &band : spec.hf_bands) {
    Eigen::VectorXcd spectrum(n);
    for (Eigen::Index i = 0; i < n; ++i)
      spectrum[i] = normal(rng);
    fft_in_place(spectrum);
    const double lo = band.center_hz - band.bandwidth_hz / 2;
    const double hi = band.center_hz + band.bandwidth_hz / 2;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double f = double(std::min(k, n - k)) * spec.rate / double(n);
      if (f < lo || f > hi)
        spectrum[k] = 0;
    }
    const Eigen::VectorXd noise = ifft(spectrum).real();
    const double rms = std::sqrt(noise.squaredNorm() / double(n));
    if (rms > 0)
      out += band.amplitude / rms * noise.cwiseProduct(gate);
  }
  return out;
}

EcgRecord generate_record(const SynthSpec &spec, GroupLabel label, std::string subject_id,
                          std::uint64_t subject_seed) {
  validate(spec);
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(subject_seed),
                    static_cast<std::uint32_t>(subject_seed >> 32)};
  std::mt19937_64 rng(seq);

  double bpm = spec.heart_rate_bpm;
  if (spec.heart_rate_jitter_bpm > 0)
    bpm = std::uniform_real_distribution<double>(bpm - spec.heart_rate_jitter_bpm,
                                                 bpm + spec.heart_rate_jitter_bpm)(rng);
  const auto beats = beat_positions(spec, bpm);
  const Eigen::VectorXd beat = beat_waveform(spec, bpm);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);

  EcgRecord record;
  record.sampling_rate = spec.rate;
  record.subject_id = std::move(subject_id);
  record.group_label = label;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    // Each electrode sees its own high-frequency realization.
    Eigen::VectorXd x = kChannelGain[c] * (beat + hf_component(spec, beats, rng));
    if (spec.noise_sigma > 0)
      for (auto &v : x)
        v += noise(rng);
    record.channels[c] = std::move(x);
  }
  return record;
}

std::vector<EcgRecord> generate_population(const SynthSpec &spec_class1,
                                           const SynthSpec &spec_class2, int subjects_class1,
                                           int subjects_class2, int first_subject) {
  if (subjects_class1 < 1 || subjects_class2 < 1)
    throw DomainError("generate_population: need at least one subject per class");
  if (first_subject < 1)
    throw DomainError("generate_population: subject numbering starts at 1");
  validate(spec_class1);
  validate(spec_class2);
  std::vector<EcgRecord> out;
  auto emit = [&](const SynthSpec &spec, GroupLabel label, int count) {
    const std::uint64_t class_bits = std::uint64_t(*class_index(label) + 1) << 32;
    for (int i = first_subject; i < first_subject + count; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "%s-%02d", label == GroupLabel::healthy ? "healthy" : "sick",
                    i);
      out.push_back(generate_record(spec, label, id, class_bits | std::uint64_t(i)));
    }
  };
  emit(spec_class1, GroupLabel::healthy, subjects_class1);
  emit(spec_class2, GroupLabel::sick, subjects_class2);
  return out;
}

std::vector<EcgRecord> generate_population(const SynthSpec &spec_class1,
                                           const SynthSpec &spec_class2,
                                           int subjects_per_class) {
  return generate_population(spec_class1, spec_class2, subjects_per_class, subjects_per_class);
}

namespace {

double number_value(std::string_view value, const std::string &where) {
  const auto v = parse_double(value);
  if (!v)
    throw ParseError(where + ": expected a number, got '" + std::string(value) + "'");
  return *v;
}

HfBand parse_band(std::string_view value, const std::string &where) {
  const auto parts = split(value, ':');
  if (parts.size() != 3)
    throw ParseError(where + ": hf_band must be center:amplitude:bandwidth");
  return {number_value(trim(parts[0]), where), number_value(trim(parts[1]), where),
          number_value(trim(parts[2]), where)};
}

// Returns false for an unknown key.
bool apply_key(SynthSpec &spec, std::string_view key, std::string_view value,
               const std::string &where) {
  auto num = [&] { return number_value(value, where); };
  auto integer = [&] {
    const auto v = parse_integer(value);
    if (!v)
      throw ParseError(where + ": expected an integer, got '" + std::string(value) + "'");
    return *v;
  };
  auto wave = [&](std::string_view prefix, WaveShape &w) {
    if (!key.starts_with(prefix))
      return false;
    const auto field = key.substr(prefix.size());
    if (field == "amplitude")
      w.amplitude = num();
    else if (field == "width_s")
      w.width_s = num();
    else if (field == "offset_s")
      w.offset_s = num();
    else
      return false;
    return true;
  };
  if (key == "rate") {
    const auto r = integer();
    if (r <= 0 || r > 1'000'000)
      throw ParseError(where + ": rate out of range");
    spec.rate = static_cast<int>(r);
  } else if (key == "duration_s") {
    spec.duration_s = num();
  } else if (key == "heart_rate_bpm") {
    spec.heart_rate_bpm = num();
  } else if (key == "heart_rate_jitter_bpm") {
    spec.heart_rate_jitter_bpm = num();
  } else if (key == "hf_band") {
    spec.hf_bands.push_back(parse_band(value, where));
  } else if (key == "hf_gate_width_s") {
    spec.hf_gate_width_s = num();
  } else if (key == "noise_sigma") {
    spec.noise_sigma = num();
  } else if (key == "seed") {
    const auto s = integer();
    if (s < 0)
      throw ParseError(where + ": seed must be non-negative");
    spec.seed = static_cast<std::uint64_t>(s);
  } else {
    return wave("p.", spec.p) || wave("qrs.", spec.qrs) || wave("t.", spec.t);
  }
  return true;
}

} // namespace

SynthConfig parse_synth_config(std::string_view text) {
  SynthConfig config;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#')
      continue;
    const std::string where = "synth config line " + std::to_string(i + 1);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(where + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "subjects_per_class") {
      const auto n = parse_integer(value);
      if (!n || *n < 1)
        throw ParseError(where + ": subjects_per_class must be a positive integer");
      config.subjects_per_class = static_cast<int>(*n);
      continue;
    }
    bool known;
    if (key.starts_with("healthy."))
      known = apply_key(config.healthy, key.substr(8), value, where);
    else if (key.starts_with("sick."))
      known = apply_key(config.sick, key.substr(5), value, where);
    else
      known = apply_key(config.healthy, key, value, where) &&
              apply_key(config.sick, key, value, where);
    if (!known)
      throw ParseError(where + ": unknown key '" + std::string(key) + "'");
  }
  validate(config.healthy);
  validate(config.sick);
  return config;
}

} // namespace hfecg
