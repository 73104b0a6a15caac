#pragma once

#include <png.h>
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "somqe/image.hpp"

namespace testing_support {

// Writes a PNG with libpng's write API; `samples` are raw row-major samples
// (two bytes big-endian per sample when bit_depth is 16).
inline void write_png(const std::filesystem::path& path, int width, int height,
                      int color_type, int bit_depth, const std::vector<std::uint8_t>& samples,
                      const std::vector<png_color>& palette = {}) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot create test PNG");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("libpng write failed");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (!palette.empty())
    png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
  png_write_info(png, info);
  const std::size_t row_bytes = samples.size() / height;
  for (int y = 0; y < height; ++y)
    png_write_row(png, samples.data() + y * row_bytes);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

inline somqe::ImageGrid random_image(std::mt19937_64& gen, std::size_t w, std::size_t h, int channels,
                                     std::string id = "random") {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> data(w * h * channels);
  for (auto& v : data) v = u(gen);
  return somqe::ImageGrid(w, h, channels, std::move(data), std::move(id));
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("somqe_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
