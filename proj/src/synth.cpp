#include "somqe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "somqe/errors.hpp"
#include "somqe/rng.hpp"

namespace somqe {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) d += (a[c] - b[c]) * (a[c] - b[c]);
  return d;
}

void plant_scattered(std::vector<std::uint8_t>& altered, std::size_t count, Xoshiro256& rng) {
  std::vector<std::uint32_t> order(altered.size());
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(order.size() - i);
    std::swap(order[i], order[j]);
    altered[order[i]] = 1;
  }
}

// Discs around random centers, filled in raster order until the count is hit.
void plant_blobs(std::vector<std::uint8_t>& altered, std::size_t count,
                 std::size_t width, std::size_t height, Xoshiro256& rng) {
  const auto max_radius = static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, std::min(width, height) / 16));
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);
  std::size_t remaining = count;
  int misses = 0;
  while (remaining > 0 && misses < 1000) {
    const auto cx = static_cast<std::ptrdiff_t>(rng.below(width));
    const auto cy = static_cast<std::ptrdiff_t>(rng.below(height));
    const auto r = 1 + static_cast<std::ptrdiff_t>(rng.below(static_cast<std::uint64_t>(max_radius)));
    std::size_t added = 0;
    for (std::ptrdiff_t y = std::max<std::ptrdiff_t>(0, cy - r); y <= std::min(h - 1, cy + r) && remaining > 0; ++y) {
      for (std::ptrdiff_t x = std::max<std::ptrdiff_t>(0, cx - r); x <= std::min(w - 1, cx + r) && remaining > 0; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
        auto& cell = altered[static_cast<std::size_t>(y * w + x)];
        if (!cell) {
          cell = 1;
          ++added;
          --remaining;
        }
      }
    }
    misses = added == 0 ? misses + 1 : 0;
  }
  for (std::size_t i = 0; i < altered.size() && remaining > 0; ++i) {
    if (!altered[i]) {
      altered[i] = 1;
      --remaining;
    }
  }
}

}  // namespace

SynthSpec SynthSpec::defaults(SynthMode mode) {
  SynthSpec spec;
  spec.mode = mode;
  if (mode == SynthMode::BlueYellow) {
    spec.base_value = {0.10, 0.20, 0.75};
    spec.altered_value = {0.95, 0.85, 0.10};
  }
  spec.fractions = default_fractions();
  return spec;
}

void SynthSpec::validate() const {
  if (width == 0 || height == 0) throw ContractError("synth dimensions must be positive");
  const auto n = static_cast<std::size_t>(channels());
  if (base_value.size() != n || altered_value.size() != n)
    throw ContractError(fmt::format("synth values must have {} components", n));
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!std::all_of(base_value.begin(), base_value.end(), in_unit) ||
      !std::all_of(altered_value.begin(), altered_value.end(), in_unit))
    throw ContractError("synth values must lie in [0,1]");
  if (fractions.empty()) throw ContractError("synth series needs at least one fraction");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!in_unit(fractions[i])) throw ContractError("synth fractions must lie in [0,1]");
    if (i > 0 && !(fractions[i] > fractions[i - 1]))
      throw ContractError("synth fractions must be strictly increasing");
  }
  if (!std::isfinite(texture_noise) || texture_noise < 0.0)
    throw ContractError("texture noise must be non-negative");
  if (!(std::sqrt(squared_distance(base_value, altered_value)) > 10.0 * texture_noise))
    throw ContractError("base and altered values must be more than 10x texture noise apart");
}

std::vector<double> default_fractions() {
  std::vector<double> f(17);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) / 40.0;
  return f;
}

std::string synth_id(double fraction) { return fmt::format("synth_f{:.3f}", fraction); }

std::size_t planted_count(double fraction, std::size_t width, std::size_t height) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(width * height)));
}

ImageGrid generate_image(const SynthSpec& spec, std::size_t index) {
  spec.validate();
  if (index >= spec.fractions.size()) throw ContractError("synth image index out of range");

  const double fraction = spec.fractions[index];
  const std::size_t pixels = spec.width * spec.height;
  const std::size_t count = planted_count(fraction, spec.width, spec.height);
  Xoshiro256 rng(substream_seed(spec.seed, index));

  std::vector<std::uint8_t> altered(pixels, 0);
  if (spec.placement == Placement::Scattered)
    plant_scattered(altered, count, rng);
  else
    plant_blobs(altered, count, spec.width, spec.height, rng);

  const int channels = spec.channels();
  std::vector<double> data;
  data.reserve(pixels * channels);
  for (std::size_t p = 0; p < pixels; ++p) {
    const auto& value = altered[p] ? spec.altered_value : spec.base_value;
    for (int c = 0; c < channels; ++c) {
      const double jitter = spec.texture_noise * (2.0 * rng.uniform01() - 1.0);
      data.push_back(std::clamp(value[c] + jitter, 0.0, 1.0));
    }
  }
  return ImageGrid(spec.width, spec.height, channels, std::move(data), synth_id(fraction));
}

std::vector<ImageGrid> generate_series(const SynthSpec& spec) {
  spec.validate();
  std::vector<ImageGrid> series;
  series.reserve(spec.fractions.size());
  for (std::size_t k = 0; k < spec.fractions.size(); ++k) series.push_back(generate_image(spec, k));
  return series;
}

double oracle_fraction(const ImageGrid& img, const SynthSpec& spec) {
  if (img.channels() != spec.channels())
    throw ContractError("image channel count does not match synth mode");
  if (img.width() != spec.width || img.height() != spec.height)
    throw ContractError("image dimensions do not match synth spec");
  std::size_t nearer_altered = 0;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const auto px = img.pixel(p);
    if (squared_distance(px, spec.altered_value) < squared_distance(px, spec.base_value))
      ++nearer_altered;
  }
  return static_cast<double>(nearer_altered) / static_cast<double>(img.pixel_count());
}

nlohmann::json synth_manifest(const SynthSpec& spec) {
  const std::string ext = spec.mode == SynthMode::Grayscale ? ".pgm" : ".ppm";
  nlohmann::json images = nlohmann::json::array();
  for (double f : spec.fractions) {
    const std::size_t count = planted_count(f, spec.width, spec.height);
    images.push_back({{"id", synth_id(f)},
                      {"file", synth_id(f) + ext},
                      {"fraction", f},
                      {"planted_count", count},
                      {"planted_fraction",
                       static_cast<double>(count) / static_cast<double>(spec.width * spec.height)}});
  }
  return {{"schema_version", 1},
          {"spec",
           {{"width", spec.width},
            {"height", spec.height},
            {"mode", spec.mode == SynthMode::Grayscale ? "grayscale" : "blue-yellow"},
            {"base_value", spec.base_value},
            {"altered_value", spec.altered_value},
            {"fractions", spec.fractions},
            {"texture_noise", spec.texture_noise},
            {"placement", spec.placement == Placement::Scattered ? "scattered" : "blobs"},
            {"seed", spec.seed}}},
          {"images", std::move(images)}};
}

}  // namespace somqe
