#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "somqe/errors.hpp"
#include "somqe/synth.hpp"

using namespace somqe;

namespace {

SynthSpec small(SynthMode mode, std::size_t side, std::vector<double> fractions) {
  SynthSpec spec = SynthSpec::defaults(mode);
  spec.width = spec.height = side;
  spec.fractions = std::move(fractions);
  return spec;
}

// Counts pixels exactly equal to the planted value, valid with zero noise.
std::size_t exact_altered(const ImageGrid& img, const SynthSpec& spec) {
  std::size_t n = 0;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const auto px = img.pixel(p);
    if (std::equal(px.begin(), px.end(), spec.altered_value.begin())) ++n;
  }
  return n;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("default fractions and ids") {
  const auto f = default_fractions();
  REQUIRE(f.size() == 17);
  CHECK(f.front() == 0.0);
  CHECK(f.back() == 0.4);
  CHECK(f[1] == 0.025);
  CHECK(synth_id(0.25) == "synth_f0.250");
  CHECK(synth_id(0.025) == "synth_f0.025");
  for (std::size_t i = 1; i < f.size(); ++i) CHECK(synth_id(f[i - 1]) < synth_id(f[i]));
}

TEST_CASE("spec validation") {
  auto spec = small(SynthMode::Grayscale, 8, {0.1, 0.2});
  CHECK_NOTHROW(spec.validate());
  auto bad = spec;
  bad.fractions = {0.2, 0.2};
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = spec;
  bad.fractions = {1.1};
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = spec;
  bad.texture_noise = 0.05;  // distance 0.5 is not > 10 * 0.05
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = spec;
  bad.base_value = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = spec;
  bad.altered_value = {1.2};
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = spec;
  bad.width = 0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
}

TEST_CASE("planted counts are exact") {
  for (const auto placement : {Placement::Scattered, Placement::Blobs}) {
    auto spec = small(SynthMode::Grayscale, 10, {0.0, 0.25, 1.0});
    spec.texture_noise = 0.0;
    spec.placement = placement;
    const auto series = generate_series(spec);
    CHECK(exact_altered(series[0], spec) == 0);
    CHECK(exact_altered(series[1], spec) == 25);
    CHECK(exact_altered(series[2], spec) == 100);
    CHECK(oracle_fraction(series[0], spec) == 0.0);
    CHECK(oracle_fraction(series[2], spec) == 1.0);
  }
}

TEST_CASE("oracle recovers the planted fraction under jitter") {
  for (const auto mode : {SynthMode::Grayscale, SynthMode::BlueYellow}) {
    for (const auto placement : {Placement::Scattered, Placement::Blobs}) {
      auto spec = small(mode, 100, {0.4});
      spec.placement = placement;
      CHECK(oracle_fraction(generate_image(spec, 0), spec) == 0.4);
    }
  }

  auto spec = small(SynthMode::BlueYellow, 37, default_fractions());
  spec.seed = 2024;
  const auto series = generate_series(spec);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double planted = static_cast<double>(planted_count(spec.fractions[k], 37, 37)) / (37.0 * 37.0);
    CHECK(oracle_fraction(series[k], spec) == planted);
    CHECK(series[k].id() == synth_id(spec.fractions[k]));
    CHECK(series[k].channels() == 3);
  }
}

TEST_CASE("generation is deterministic and seed-dependent") {
  auto spec = small(SynthMode::Grayscale, 24, {0.1, 0.3});
  CHECK(generate_series(spec) == generate_series(spec));
  auto other = spec;
  other.seed = spec.seed + 1;
  CHECK_FALSE(generate_series(spec)[1] == generate_series(other)[1]);
  // Each image depends only on (seed, index).
  CHECK(generate_image(spec, 1) == generate_series(spec)[1]);
}

TEST_CASE("jitter is bounded and intensities stay in range") {
  auto spec = small(SynthMode::Grayscale, 32, {0.5});
  spec.base_value = {0.0};
  spec.altered_value = {1.0};
  spec.texture_noise = 0.05;
  const auto img = generate_image(spec, 0);
  for (double v : img.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK((v <= 0.05 || v >= 0.95));
  }
}

TEST_CASE("oracle contract") {
  const auto spec = small(SynthMode::Grayscale, 8, {0.5});
  const auto img = generate_image(spec, 0);
  auto wrong = small(SynthMode::BlueYellow, 8, {0.5});
  CHECK_THROWS_AS(oracle_fraction(img, wrong), ContractError);
  auto wrong_size = small(SynthMode::Grayscale, 9, {0.5});
  CHECK_THROWS_AS(oracle_fraction(img, wrong_size), ContractError);
  CHECK_THROWS_AS(generate_image(spec, 1), ContractError);
}

TEST_CASE("manifest") {
  const auto spec = SynthSpec::defaults(SynthMode::BlueYellow);
  const auto m = synth_manifest(spec);
  CHECK(m["images"].size() == 17);
  CHECK(m["images"][4]["file"] == "synth_f0.100.ppm");
  CHECK(m["images"][4]["planted_count"] == planted_count(0.1, 512, 512));
  CHECK(m["spec"]["mode"] == "blue-yellow");
}

}
