#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace somqe {

/// Row-major raster of pixel vectors with intensities in [0,1].
///
/// Pixels are stored interleaved: component `c` of pixel `p` lives at
/// `data()[p * channels() + c]`. Channel count is 1 (grayscale) or 3 (RGB).
class ImageGrid {
 public:
  ImageGrid() = default;

  /// Throws ContractError if any invariant does not hold.
  ImageGrid(std::size_t width, std::size_t height, int channels,
            std::vector<double> data, std::string id = {});

  /// Image with every pixel equal to `value` (value.size() is the channel count).
  static ImageGrid filled(std::size_t width, std::size_t height,
                          std::span<const double> value, std::string id = {});

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }
  bool empty() const noexcept { return pixel_count() == 0; }

  const std::string& id() const noexcept { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  std::span<const double> data() const noexcept { return data_; }

  std::span<const double> pixel(std::size_t index) const noexcept {
    return {data_.data() + index * static_cast<std::size_t>(channels_),
            static_cast<std::size_t>(channels_)};
  }
  std::span<const double> pixel(std::size_t x, std::size_t y) const noexcept {
    return pixel(y * width_ + x);
  }

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  int channels_ = 1;
  std::vector<double> data_;
  std::string id_;
};

}  // namespace somqe
