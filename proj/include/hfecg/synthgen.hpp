#pragma once

#include "hfecg/signal_io.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace hfecg {

// Gaussian bump centred `offset_s` after the R peak.
struct WaveShape {
  double amplitude = 0;
  double width_s = 0;
  double offset_s = 0;
};

// Band-limited noise centred on `center_hz`, gated to the QRS windows.
struct HfBand {
  double center_hz = 0;
  double amplitude = 0;
  double bandwidth_hz = 0;
};

struct SynthSpec {
  int rate = 1028;
  double duration_s = 30;
  double heart_rate_bpm = 70;
  // Each subject's rate is drawn uniformly from bpm +/- jitter.
  double heart_rate_jitter_bpm = 0;
  WaveShape p{0.15, 0.025, -0.2};
  WaveShape qrs{1.0, 0.01, 0.0};
  WaveShape t{0.3, 0.04, 0.3};
  std::vector<HfBand> hf_bands;
  double hf_gate_width_s = 0.04;
  double noise_sigma = 0;
  std::uint64_t seed = 1;
};

// Throws DomainError on an invalid spec.
void validate(const SynthSpec &spec);

Eigen::Index sample_count(const SynthSpec &spec);

// Sample index of every R peak for a given heart rate.
std::vector<Eigen::Index> beat_positions(const SynthSpec &spec, double heart_rate_bpm);

// P-QRS-T morphology without high-frequency content or noise.
Eigen::VectorXd beat_waveform(const SynthSpec &spec, double heart_rate_bpm);

/// Gated band-limited noise for every band of `spec`, one realization.
Eigen::VectorXd hf_component(const SynthSpec &spec,
                             const std::vector<Eigen::Index> &beats,
                             std::mt19937_64 &rng);

EcgRecord generate_record(const SynthSpec &spec, GroupLabel label,
                          std::string subject_id, std::uint64_t subject_seed);

/// Subjects `healthy-01..` from spec_class1 then `sick-01..` from spec_class2.
/// `first_subject` offsets the numbering (and the seeds) so that disjoint
/// train and test populations can share one spec.
std::vector<EcgRecord> generate_population(const SynthSpec &spec_class1,
                                           const SynthSpec &spec_class2,
                                           int subjects_class1, int subjects_class2,
                                           int first_subject = 1);
std::vector<EcgRecord> generate_population(const SynthSpec &spec_class1,
                                           const SynthSpec &spec_class2,
                                           int subjects_per_class);

struct SynthConfig {
  SynthSpec healthy;
  SynthSpec sick;
  int subjects_per_class = 4;
};

/// Flat key=value text. Unprefixed keys set both classes, `healthy.` and
/// `sick.` prefixes set one. `hf_band=<center>:<amplitude>:<bandwidth>` may
/// repeat.
SynthConfig parse_synth_config(std::string_view text);

} // namespace hfecg
