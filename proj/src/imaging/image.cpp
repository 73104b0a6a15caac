#include "somqe/image.hpp"

#include <cmath>
#include <fmt/format.h>

#include "somqe/errors.hpp"

namespace somqe {

ImageGrid::ImageGrid(std::size_t width, std::size_t height, int channels,
                     std::vector<double> data, std::string id)
    : width_(width),
      height_(height),
      channels_(channels),
      data_(std::move(data)),
      id_(std::move(id)) {
  if (width_ == 0 || height_ == 0)
    throw ContractError("image dimensions must be positive");
  if (channels_ != 1 && channels_ != 3)
    throw ContractError(fmt::format("unsupported channel count {}", channels_));
  if (data_.size() != width_ * height_ * static_cast<std::size_t>(channels_))
    throw ContractError(fmt::format("pixel buffer holds {} values, expected {}",
                                    data_.size(),
                                    width_ * height_ * channels_));
  for (double v : data_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw ContractError("pixel intensity outside [0,1]");
  }
}

ImageGrid ImageGrid::filled(std::size_t width, std::size_t height,
                            std::span<const double> value, std::string id) {
  std::vector<double> data;
  data.reserve(width * height * value.size());
  for (std::size_t i = 0; i < width * height; ++i)
    data.insert(data.end(), value.begin(), value.end());
  return ImageGrid(width, height, static_cast<int>(value.size()),
                   std::move(data), std::move(id));
}

}  // namespace somqe
