#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "somqe/errors.hpp"
#include "somqe/imaging.hpp"

namespace somqe {
namespace {

struct PngSource {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

struct PngDecodeState {
  std::string error;
  std::size_t width = 0;
  std::size_t height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> raw;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->bytes.size() - src->offset < length) png_error(png, "truncated PNG stream");
  std::memcpy(out, src->bytes.data() + src->offset, length);
  src->offset += length;
}

void png_on_error(png_structp png, png_const_charp message) {
  auto* state = static_cast<PngDecodeState*>(png_get_error_ptr(png));
  state->error = message;
  std::longjmp(png_jmpbuf(png), 1);
}

void png_on_warning(png_structp, png_const_charp) {}

// No C++ object with a non-trivial destructor may live in this frame:
// libpng reports errors by longjmp-ing back to the setjmp below.
bool png_decode_raw(PngSource& src, PngDecodeState& state) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state,
                                           png_on_error, png_on_warning);
  if (!png) {
    state.error = "out of memory";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    state.error = "out of memory";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }

  png_set_read_fn(png, &src, png_read_from_memory);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
    bit_depth = 8;
  } else if (bit_depth != 8 && bit_depth != 16) {
    state.error = "unsupported PNG bit depth";
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  if (width == 0 || height == 0 || (channels != 1 && channels != 3)) {
    state.error = "unsupported PNG layout";
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }

  state.width = width;
  state.height = height;
  state.channels = channels;
  state.bit_depth = bit_depth;
  state.raw.resize(row_bytes * height);
  for (png_uint_32 y = 0; y < height; ++y)
    png_read_row(png, state.raw.data() + y * row_bytes, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

ImageGrid decode_png(std::span<const std::uint8_t> bytes, std::string id) {
  PngSource src{bytes};
  PngDecodeState state;
  if (!png_decode_raw(src, state))
    throw FormatError(fmt::format("PNG decode failed: {}", state.error));

  const std::size_t samples = state.width * state.height * state.channels;
  std::vector<double> data(samples);
  if (state.bit_depth == 8) {
    for (std::size_t i = 0; i < samples; ++i) data[i] = state.raw[i] / 255.0;
  } else {
    for (std::size_t i = 0; i < samples; ++i) {
      const unsigned code = (unsigned{state.raw[2 * i]} << 8) | state.raw[2 * i + 1];
      data[i] = code / 65535.0;
    }
  }
  return ImageGrid(state.width, state.height, state.channels, std::move(data),
                   std::move(id));
}

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t read_uint() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !is_digit(bytes_[pos_]))
      throw FormatError("malformed PNM header");
    std::size_t value = 0;
    while (pos_ < bytes_.size() && is_digit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (std::size_t{1} << 31)) throw FormatError("PNM header value too large");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
      throw FormatError("malformed PNM header");
    return pos_ + 1;
  }

 private:
  static bool is_digit(std::uint8_t c) { return c >= '0' && c <= '9'; }
  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

ImageGrid decode_pnm(std::span<const std::uint8_t> bytes, std::string id) {
  const int channels = bytes[1] == '5' ? 1 : 3;
  PnmHeaderReader header(bytes);
  const std::size_t width = header.read_uint();
  const std::size_t height = header.read_uint();
  const std::size_t maxval = header.read_uint();
  const std::size_t offset = header.raster_offset();

  if (width == 0 || height == 0) throw FormatError("PNM image has zero dimension");
  if (maxval == 0 || maxval > 65535) throw FormatError("unsupported PNM maxval");

  const std::size_t samples = width * height * channels;
  const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
  if (bytes.size() - offset < samples * sample_bytes)
    throw FormatError("truncated PNM raster");

  const auto* raster = bytes.data() + offset;
  const double scale = static_cast<double>(maxval);
  std::vector<double> data(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const unsigned code = sample_bytes == 1
                              ? unsigned{raster[i]}
                              : (unsigned{raster[2 * i]} << 8) | raster[2 * i + 1];
    if (code > maxval) throw FormatError("PNM sample exceeds maxval");
    data[i] = code / scale;
  }
  return ImageGrid(width, height, channels, std::move(data), std::move(id));
}

}  // namespace

ImageGrid decode_image(std::span<const std::uint8_t> bytes, std::string id) {
  static constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (bytes.size() >= 8 && std::equal(bytes.begin(), bytes.begin() + 8, kPngSignature))
    return decode_png(bytes, std::move(id));
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
    return decode_pnm(bytes, std::move(id));
  throw FormatError("unsupported image format");
}

ImageGrid load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError(fmt::format("cannot read {}", path.string()));
  try {
    return decode_image(bytes, path.stem().string());
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<std::uint8_t> encode_pnm(const ImageGrid& img) {
  const std::string header = fmt::format("{}\n{} {}\n255\n",
                                         img.channels() == 1 ? "P5" : "P6",
                                         img.width(), img.height());
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.data().size());
  for (double v : img.data())
    out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  return out;
}

void save_pnm(const ImageGrid& img, const std::filesystem::path& path) {
  const auto bytes = encode_pnm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot create {}", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
}

}  // namespace somqe
