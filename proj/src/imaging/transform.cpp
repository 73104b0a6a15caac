#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "somqe/errors.hpp"
#include "somqe/imaging.hpp"

namespace somqe {
namespace {

struct ChannelStats {
  double mean = 0.0;
  double stddev = 0.0;
};

ChannelStats channel_stats(const ImageGrid& img, int channel) {
  const auto data = img.data();
  const std::size_t stride = static_cast<std::size_t>(img.channels());
  const double n = static_cast<double>(img.pixel_count());
  double sum = 0.0;
  for (std::size_t i = channel; i < data.size(); i += stride) sum += data[i];
  const double mean = sum / n;
  double sq = 0.0;
  for (std::size_t i = channel; i < data.size(); i += stride) {
    const double d = data[i] - mean;
    sq += d * d;
  }
  return {mean, std::sqrt(sq / n)};
}

// Source coordinate of target sample `t` under pixel-center alignment.
struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

std::vector<Tap> bilinear_taps(std::size_t source, std::size_t target) {
  std::vector<Tap> taps(target);
  const double scale = static_cast<double>(source) / static_cast<double>(target);
  const double last = static_cast<double>(source - 1);
  for (std::size_t t = 0; t < target; ++t) {
    const double s = std::clamp((static_cast<double>(t) + 0.5) * scale - 0.5, 0.0, last);
    const auto lo = static_cast<std::size_t>(std::floor(s));
    taps[t] = {lo, std::min(lo + 1, source - 1), s - static_cast<double>(lo)};
  }
  return taps;
}

}  // namespace

ImageGrid to_grayscale(const ImageGrid& img) {
  if (img.channels() == 1) return img;
  std::vector<double> luma(img.pixel_count());
  for (std::size_t p = 0; p < luma.size(); ++p) {
    const auto px = img.pixel(p);
    luma[p] = std::clamp(0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2], 0.0, 1.0);
  }
  return ImageGrid(img.width(), img.height(), 1, std::move(luma), img.id());
}

ImageGrid resize(const ImageGrid& img, std::size_t target_width,
                 std::size_t target_height) {
  if (target_width == 0 || target_height == 0)
    throw ContractError("resize target dimensions must be positive");
  if (target_width == img.width() && target_height == img.height()) return img;

  const auto xs = bilinear_taps(img.width(), target_width);
  const auto ys = bilinear_taps(img.height(), target_height);
  const int channels = img.channels();
  std::vector<double> out(target_width * target_height * channels);

  auto* dst = out.data();
  for (const Tap& ty : ys) {
    for (const Tap& tx : xs) {
      const auto p00 = img.pixel(tx.lo, ty.lo);
      const auto p10 = img.pixel(tx.hi, ty.lo);
      const auto p01 = img.pixel(tx.lo, ty.hi);
      const auto p11 = img.pixel(tx.hi, ty.hi);
      for (int c = 0; c < channels; ++c) {
        const double top = p00[c] + tx.frac * (p10[c] - p00[c]);
        const double bottom = p01[c] + tx.frac * (p11[c] - p01[c]);
        *dst++ = std::clamp(top + ty.frac * (bottom - top), 0.0, 1.0);
      }
    }
  }
  return ImageGrid(target_width, target_height, channels, std::move(out), img.id());
}

ImageGrid match_contrast(const ImageGrid& img, const ImageGrid& reference) {
  if (img.channels() != reference.channels())
    throw ContractError(fmt::format("channel mismatch: {} vs reference {}",
                                    img.channels(), reference.channels()));
  const int channels = img.channels();
  std::vector<double> gain(channels), offset(channels);
  for (int c = 0; c < channels; ++c) {
    const ChannelStats src = channel_stats(img, c);
    const ChannelStats ref = channel_stats(reference, c);
    gain[c] = src.stddev < 1e-9 ? 1.0 : ref.stddev / src.stddev;
    offset[c] = ref.mean - gain[c] * src.mean;
  }

  const auto data = img.data();
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t c = i % static_cast<std::size_t>(channels);
    out[i] = std::clamp(gain[c] * data[i] + offset[c], 0.0, 1.0);
  }
  return ImageGrid(img.width(), img.height(), channels, std::move(out), img.id());
}

}  // namespace somqe
