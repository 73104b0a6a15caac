#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "somqe/classify.hpp"
#include "somqe/image.hpp"
#include "somqe/som.hpp"

namespace somqe {

enum class ColorMode { AsIs, ForceGray };

/// Everything the classify pipeline needs besides the images themselves.
struct PipelineOptions {
  std::size_t rows = 4;
  std::size_t cols = 4;
  TrainConfig train;
  std::optional<std::size_t> target_width;   // default: reference width
  std::optional<std::size_t> target_height;  // default: reference height
  ColorMode color = ColorMode::AsIs;
  bool match_contrast = false;
  std::string reference = "first";           // image id or "first"
  QeOptions qe;
};

/// PNG/PGM/PPM files directly inside `dir`, decoded and sorted by id.
/// Throws IoError when `dir` is not a readable directory.
std::vector<ImageGrid> load_series(const std::filesystem::path& dir, unsigned threads = 1);

/// Index of the reference image: the given id, or the lexicographically
/// smallest id for "first". Throws ConfigError if the id is absent.
std::size_t select_reference(const std::vector<ImageGrid>& images, const std::string& reference);

/// resize -> match_contrast (optional) -> grayscale (optional), applied to
/// every image against the reference. Throws ConfigError on mixed channel
/// counts in AsIs mode.
std::vector<ImageGrid> preprocess(const std::vector<ImageGrid>& images,
                                  std::size_t reference_index,
                                  const PipelineOptions& options);

/// Preprocesses, trains on the reference (unless `pretrained` is given),
/// scores every image including the reference, and ranks the result.
ClassificationReport classify_series(const std::vector<ImageGrid>& images,
                                     const PipelineOptions& options,
                                     const SomLattice* pretrained = nullptr,
                                     std::vector<ImageGrid>* preprocessed = nullptr);

SomLattice train_on(const ImageGrid& image, const PipelineOptions& options);

}  // namespace somqe
