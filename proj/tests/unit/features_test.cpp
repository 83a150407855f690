#include "helpers.hpp"

#include "hfecg/features.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hfecg;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

Fragment tone_fragment(double hz, int rate, Eigen::Index n, double amplitude = 1.0) {
  Fragment f;
  f.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    f.samples[i] = amplitude * std::sin(2 * std::numbers::pi * hz * double(i) / rate);
  f.sampling_rate = rate;
  f.lead = Lead::V2;
  f.subject_id = "t";
  f.fragment_index = 1;
  f.group_label = GroupLabel::healthy;
  return f;
}

Fragment noise_fragment(std::uint64_t seed, Eigen::Index n = 2056) {
  Fragment f;
  f.samples = testing::gaussian_noise(n, seed);
  f.sampling_rate = 1028;
  f.subject_id = "n" + std::to_string(seed);
  f.group_label = seed % 2 ? GroupLabel::sick : GroupLabel::healthy;
  return f;
}

FeatureVector features_of(const Fragment &f, FeatureMode mode = FeatureMode::standard21) {
  const auto bank = bundled_bank("dmey");
  return extract_features(f, wavedec(f.samples, 4, bank), bank, mode);
}

} // namespace

TEST_CASE("energies") {
  const auto x = vec({3, -4});
  CHECK(l1_energy(x) == 7);
  CHECK(l2_energy(x) == 25);
  CHECK(max_abs(x) == 4);
  CHECK(relative_l2(x, x) == 1);
  CHECK_THROWS_AS(relative_l2(x, Eigen::VectorXd::Zero(2)), DomainError);
  CHECK(dispersion(vec({1, 2, 3, 4})) == doctest::Approx(5.0 / 3));
}

TEST_CASE("relative energies of periodic components sum to one") {
  const auto bank = bundled_bank("dmey");
  const Eigen::VectorXd s = testing::gaussian_noise(1024, 8);
  const auto tree = wavedec(s, 4, bank, ExtensionMode::periodic);
  double total = relative_l2(reconstruct_component(tree, Band::a(4), bank), s);
  for (int j = 1; j <= 4; ++j)
    total += relative_l2(reconstruct_component(tree, Band::d(j), bank), s);
  CHECK(total == doctest::Approx(1).epsilon(1e-6));
}

TEST_CASE("shannon entropy") {
  CHECK(shannon_entropy(vec({1, 0, 0})) == 0);
  CHECK(shannon_entropy(vec({1 / std::sqrt(2.0), 1 / std::sqrt(2.0)})) ==
        doctest::Approx(std::log(2.0)));
  const double e = std::exp(1.0);
  CHECK(shannon_entropy(vec({e, 0})) == doctest::Approx(-2 * e * e));
}

TEST_CASE("hurst exponent") {
  Eigen::VectorXd ramp(1024), alternating(1024);
  for (Eigen::Index i = 0; i < 1024; ++i) {
    ramp[i] = double(i);
    alternating[i] = i % 2 ? -1 : 1;
  }
  CHECK(hurst_rs(ramp) > 0.9);
  CHECK(hurst_rs(alternating) < 0.5);
  CHECK_THROWS_AS(hurst_rs(Eigen::VectorXd::Constant(64, 1.0)), DomainError);
  CHECK_THROWS_AS(hurst_rs(Eigen::VectorXd::Ones(15)), DomainError);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double h = hurst_rs(testing::gaussian_noise(2048, seed));
    CHECK(h > 0);
    CHECK(h < 1.5);
  }
}

TEST_CASE("hurst follows R/S = (N/2)^H") {
  const Eigen::VectorXd x = testing::gaussian_noise(100, 12);
  const double mean = x.mean();
  double c = 0, hi = -1e300, lo = 1e300;
  for (double v : x) {
    c += v - mean;
    hi = std::max(hi, c);
    lo = std::min(lo, c);
  }
  const double s = std::sqrt((x.array() - mean).square().mean());
  CHECK(std::pow(50.0, hurst_rs(x)) == doctest::Approx((hi - lo) / s).epsilon(1e-12));
}

TEST_CASE("feature names are frozen") {
  const auto &names = feature_names();
  CHECK(names.size() == 21);
  CHECK(names[0] == "d1_max_abs");
  CHECK(names[4] == "d1_shannon_entropy");
  CHECK(names[18] == "d4_peak_freq_hz");
  CHECK(names[20] == "d4_hurst");
  CHECK(extended_feature_names().size() == 19);
  CHECK(feature_order_hash() == feature_order_hash());
}

TEST_CASE("tone in the level-1 band shows up in the D1 block") {
  const auto fv = features_of(tone_fragment(300, 1028, 2056));
  const double bin = 1028.0 / 2056;
  CHECK(std::abs(fv.values[3] - 300) <= bin);
  CHECK(fv.values.allFinite());
  CHECK(fv.lead_name == "V2");
  CHECK(fv.fragment_index == 1);
}

TEST_CASE("zero fragment fails in the Hurst feature") {
  Fragment f = tone_fragment(10, 1028, 1028, 0.0);
  CHECK_THROWS_AS(features_of(f), DomainError);
}

TEST_CASE("feature invariants and scaling") {
  const auto f = noise_fragment(3);
  const auto a = features_of(f);
  const auto again = features_of(f);
  CHECK(a.values == again.values);
  for (int s = 0; s < 4; ++s) {
    CHECK(a.values[5 * s + 1] >= 0);
    CHECK(a.values[5 * s + 2] >= 0);
    CHECK(a.values[5 * s + 3] >= 0);
    CHECK(a.values[5 * s + 3] <= 514);
  }
  Fragment scaled = f;
  scaled.samples *= -3.0;
  const auto b = features_of(scaled);
  for (int s = 0; s < 4; ++s) {
    CHECK(b.values[5 * s] == doctest::Approx(3 * a.values[5 * s]).epsilon(1e-10));
    CHECK(b.values[5 * s + 1] == doctest::Approx(9 * a.values[5 * s + 1]).epsilon(1e-10));
    CHECK(b.values[5 * s + 3] == a.values[5 * s + 3]);
  }
  CHECK(b.values[20] == doctest::Approx(a.values[20]).epsilon(1e-10));
  // The entropy formula is not normalized, so it is not scale invariant.
  CHECK(std::abs(b.values[4] - a.values[4]) > 1e-3);
}

TEST_CASE("extended features") {
  const auto f = noise_fragment(4);
  const auto fv = features_of(f, FeatureMode::extended);
  REQUIRE(fv.extended.size() == extended_feature_names().size());
  const auto bank = bundled_bank("dmey");
  const auto d2 = reconstruct_component(wavedec(f.samples, 4, bank), Band::d(2), bank);
  CHECK(fv.extended[4] == doctest::Approx(dispersion(d2)));
  CHECK(fv.extended[5] == doctest::Approx(l1_energy(d2)));
  CHECK(fv.extended[6] == doctest::Approx(relative_l2(d2, f.samples)));
  CHECK(fv.extended[7] == doctest::Approx(mean_instantaneous_frequency(d2, 1028.0)));
  CHECK(fv.extended[16] == doctest::Approx(hurst_rs(
                               reconstruct_component(wavedec(f.samples, 4, bank), Band::d(1), bank))));
  CHECK(features_of(f).values == fv.values);
}

TEST_CASE("feature table round trips exactly") {
  std::vector<FeatureVector> rows;
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    rows.push_back(features_of(noise_fragment(seed), FeatureMode::extended));
  rows[1].group_label = GroupLabel::unlabeled;
  const auto text = format_feature_table(rows);
  const auto back = parse_feature_table(text);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].values == rows[i].values);
    CHECK(back[i].extended == rows[i].extended);
    CHECK(back[i].subject_id == rows[i].subject_id);
    CHECK(back[i].group_label == rows[i].group_label);
  }
  CHECK(format_feature_table(back) == text);
}

TEST_CASE("feature table errors") {
  const auto text = format_feature_table({features_of(noise_fragment(1))});
  std::string missing = text;
  missing.replace(missing.find("d4_hurst"), 8, "d4_other");
  CHECK_THROWS_AS(parse_feature_table(missing), FormatError);
  std::string bad = text;
  const auto pos = bad.find('\n') + 1;
  const auto cell = bad.find(",0,", pos);
  REQUIRE(cell != std::string::npos);
  const auto comma = bad.find(',', cell + 3);
  bad.replace(cell + 3, comma - cell - 3, "abc");
  CHECK_THROWS_AS(parse_feature_table(bad), ParseError);
  CHECK_THROWS_AS(parse_feature_table(""), FormatError);
}
