#include "somqe/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <set>

#include <fmt/format.h>

#include "somqe/errors.hpp"
#include "somqe/imaging.hpp"
#include "somqe/parallel.hpp"

namespace somqe {
namespace {

bool is_image_file(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::vector<ImageGrid> load_series(const std::filesystem::path& dir, unsigned threads) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IoError(fmt::format("input directory {} does not exist", dir.string()));

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  if (ec) throw IoError(fmt::format("cannot list {}: {}", dir.string(), ec.message()));
  std::sort(files.begin(), files.end());

  std::vector<ImageGrid> images(files.size());
  parallel_for(files.size(), threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) images[i] = load_image(files[i]);
  });

  std::sort(images.begin(), images.end(),
            [](const ImageGrid& a, const ImageGrid& b) { return a.id() < b.id(); });
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (images[i].id() == images[i - 1].id())
      throw ConfigError(fmt::format("duplicate image id '{}' in {}", images[i].id(), dir.string()));
  }
  return images;
}

std::size_t select_reference(const std::vector<ImageGrid>& images, const std::string& reference) {
  if (images.empty()) throw ConfigError("no images to choose a reference from");
  if (reference == "first") {
    const auto it = std::min_element(images.begin(), images.end(),
                                     [](const ImageGrid& a, const ImageGrid& b) { return a.id() < b.id(); });
    return static_cast<std::size_t>(it - images.begin());
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].id() == reference) return i;
  }
  throw ConfigError(fmt::format("reference image '{}' not found", reference));
}

std::vector<ImageGrid> preprocess(const std::vector<ImageGrid>& images,
                                  std::size_t reference_index,
                                  const PipelineOptions& options) {
  const ImageGrid& ref = images.at(reference_index);
  if (options.color == ColorMode::AsIs) {
    for (const auto& img : images) {
      if (img.channels() != ref.channels())
        throw ConfigError(fmt::format(
            "'{}' has {} channels but reference '{}' has {}; use --color-mode gray",
            img.id(), img.channels(), ref.id(), ref.channels()));
    }
  }
  const std::size_t width = options.target_width.value_or(ref.width());
  const std::size_t height = options.target_height.value_or(ref.height());

  // Mixed channel counts (ForceGray only) are reduced to gray before
  // contrast matching; otherwise the order is resize, contrast, gray.
  const bool mixed = std::any_of(images.begin(), images.end(), [&](const ImageGrid& img) {
    return img.channels() != ref.channels();
  });
  auto resized = [&](const ImageGrid& img) {
    ImageGrid out = resize(img, width, height);
    return mixed ? to_grayscale(out) : out;
  };
  const ImageGrid contrast_ref = resized(ref);

  std::vector<ImageGrid> out(images.size());
  parallel_for(images.size(), options.qe.threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) {
      ImageGrid img = resized(images[i]);
      if (options.match_contrast) img = match_contrast(img, contrast_ref);
      if (options.color == ColorMode::ForceGray) img = to_grayscale(img);
      out[i] = std::move(img);
    }
  });
  return out;
}

SomLattice train_on(const ImageGrid& image, const PipelineOptions& options) {
  options.train.validate();
  return train(init_lattice(options.rows, options.cols, image, options.train), image,
               options.train);
}

ClassificationReport classify_series(const std::vector<ImageGrid>& images,
                                     const PipelineOptions& options,
                                     const SomLattice* pretrained,
                                     std::vector<ImageGrid>* preprocessed) {
  if (images.size() < 2) throw ConfigError("need at least 2 images");
  options.train.validate();
  const std::size_t ref_index = select_reference(images, options.reference);
  std::vector<ImageGrid> prepared = preprocess(images, ref_index, options);
  const ImageGrid& ref = prepared[ref_index];

  const auto train_start = std::chrono::steady_clock::now();
  const SomLattice lattice = pretrained ? *pretrained : train_on(ref, options);
  const double train_ms = pretrained ? 0.0 : elapsed_ms(train_start);
  if (lattice.dim() != ref.channels())
    throw ConfigError(fmt::format("lattice dim {} does not match image channels {}",
                                  lattice.dim(), ref.channels()));

  std::vector<double> per_image_ms;
  const auto score_start = std::chrono::steady_clock::now();
  auto scores = score_series(lattice, prepared, ref.id(), options.qe, &per_image_ms);
  const double score_ms = elapsed_ms(score_start);

  ClassificationReport report = rank(std::move(scores));
  report.reference_id = ref.id();
  report.lattice_summary = lattice_summary(lattice, options.train);
  report.timings = {train_ms, score_ms, std::move(per_image_ms)};
  if (preprocessed) *preprocessed = std::move(prepared);
  return report;
}

}  // namespace somqe
