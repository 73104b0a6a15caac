#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "somqe/image.hpp"

namespace somqe {

enum class SynthMode { Grayscale, BlueYellow };
enum class Placement { Scattered, Blobs };

/// Parameters of a ground-truth image series: each image has exactly
/// round(f * W * H) pixels set to `altered_value`, the rest to `base_value`,
/// plus uniform per-component jitter in [-texture_noise, texture_noise].
struct SynthSpec {
  std::size_t width = 512;
  std::size_t height = 512;
  SynthMode mode = SynthMode::Grayscale;
  std::vector<double> base_value{0.35};
  std::vector<double> altered_value{0.85};
  std::vector<double> fractions;
  double texture_noise = 0.02;
  Placement placement = Placement::Scattered;
  std::uint64_t seed = 1;

  /// Defaults for `mode` with the 17 fractions 0.000, 0.025, ..., 0.400.
  static SynthSpec defaults(SynthMode mode);

  int channels() const noexcept { return mode == SynthMode::Grayscale ? 1 : 3; }

  /// Throws ContractError on any violated invariant, including
  /// ||altered - base|| <= 10 * texture_noise.
  void validate() const;
};

/// 0.000, 0.025, ..., 0.400.
std::vector<double> default_fractions();

/// "synth_f0.250" style id; ids sort in fraction order.
std::string synth_id(double fraction);

std::size_t planted_count(double fraction, std::size_t width, std::size_t height);

/// Image `index` of the series, generated from its own substream.
ImageGrid generate_image(const SynthSpec& spec, std::size_t index);

std::vector<ImageGrid> generate_series(const SynthSpec& spec);

/// Share of pixels strictly nearer to altered_value than to base_value.
double oracle_fraction(const ImageGrid& img, const SynthSpec& spec);

nlohmann::json synth_manifest(const SynthSpec& spec);

}  // namespace somqe
