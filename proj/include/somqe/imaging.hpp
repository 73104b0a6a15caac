#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "somqe/image.hpp"

namespace somqe {

/// Decodes a PNG (8/16-bit gray, gray+alpha, RGB, RGBA or palette), binary
/// PGM (P5) or binary PPM (P6). Intensities are divided by the source's
/// maximum code value; alpha is dropped. The id is the filename stem.
///
/// Throws IoError if the file cannot be read and FormatError if the content
/// is not a supported image.
ImageGrid load_image(const std::filesystem::path& path);

/// Decodes an in-memory PNG/PGM/PPM buffer. `id` becomes the image id.
ImageGrid decode_image(std::span<const std::uint8_t> bytes, std::string id = {});

/// Encodes as 8-bit P5 (1 channel) or P6 (3 channels), rounding x*255.
std::vector<std::uint8_t> encode_pnm(const ImageGrid& img);

/// Writes encode_pnm(img) to `path`. Throws IoError on failure.
void save_pnm(const ImageGrid& img, const std::filesystem::path& path);

/// Rec. 601 luma: 0.299 R + 0.587 G + 0.114 B. Grayscale input is returned
/// unchanged.
ImageGrid to_grayscale(const ImageGrid& img);

/// Bilinear resampling with pixel-center alignment and edge clamping.
/// Returns an exact copy when the target size equals the source size.
ImageGrid resize(const ImageGrid& img, std::size_t target_width,
                 std::size_t target_height);

/// Per-channel affine remap so that mean and standard deviation match
/// `reference`, then clamp to [0,1]. Channels whose std is below 1e-9 only
/// get the mean shift. Throws ContractError on channel-count mismatch.
ImageGrid match_contrast(const ImageGrid& img, const ImageGrid& reference);

}  // namespace somqe
