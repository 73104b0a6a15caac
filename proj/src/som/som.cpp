#include "somqe/som.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "somqe/errors.hpp"
#include "somqe/parallel.hpp"
#include "somqe/rng.hpp"

namespace somqe {
namespace {

void require_dim(const SomLattice& lattice, int channels) {
  if (channels != lattice.dim())
    throw ContractError(fmt::format("image has {} channels, lattice expects {}",
                                    channels, lattice.dim()));
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() == 1) return values[0];
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace

void TrainConfig::validate() const {
  if (!(alpha_end > 0.0 && alpha_end <= alpha_start && alpha_start <= 1.0))
    throw ConfigError(fmt::format(
        "learning rates must satisfy 0 < alpha_end <= alpha_start <= 1 (got {} and {})",
        alpha_start, alpha_end));
  if (radius < 0) throw ConfigError("radius must be non-negative");
}

double TrainConfig::alpha(std::uint64_t step) const noexcept {
  if (iterations <= 1) return alpha_start;
  return alpha_start + (alpha_end - alpha_start) * static_cast<double>(step) /
                           static_cast<double>(iterations - 1);
}

SomLattice::SomLattice(std::size_t rows, std::size_t cols, int dim, int radius,
                       std::vector<double> weights,
                       std::optional<std::string> trained_on)
    : rows_(rows),
      cols_(cols),
      dim_(dim),
      radius_(radius),
      weights_(std::move(weights)),
      trained_on_(std::move(trained_on)) {
  if (rows_ == 0 || cols_ == 0) throw ContractError("lattice must have at least one neuron");
  if (dim_ != 1 && dim_ != 3) throw ContractError(fmt::format("unsupported lattice dim {}", dim_));
  if (radius_ < 0) throw ContractError("lattice radius must be non-negative");
  if (weights_.size() != rows_ * cols_ * static_cast<std::size_t>(dim_))
    throw ContractError("lattice weight count does not match rows * cols * dim");
  if (!std::all_of(weights_.begin(), weights_.end(), [](double w) { return std::isfinite(w); }))
    throw ContractError("lattice weights must be finite");
}

std::uint64_t init_draws(std::size_t neurons, int dim, InitMode mode) noexcept {
  return mode == InitMode::SamplePixels ? neurons : neurons * static_cast<std::size_t>(dim);
}

SomLattice init_lattice(std::size_t rows, std::size_t cols,
                        const ImageGrid& training_image,
                        const TrainConfig& config) {
  config.validate();
  if (training_image.empty()) throw ContractError("training image is empty");
  if (rows == 0 || cols == 0) throw ContractError("lattice must have at least one neuron");

  const int dim = training_image.channels();
  const std::size_t neurons = rows * cols;
  Xoshiro256 rng(config.seed);
  std::vector<double> weights;
  weights.reserve(neurons * dim);
  for (std::size_t k = 0; k < neurons; ++k) {
    if (config.init_mode == InitMode::SamplePixels) {
      const auto px = training_image.pixel(rng.below(training_image.pixel_count()));
      weights.insert(weights.end(), px.begin(), px.end());
    } else {
      for (int c = 0; c < dim; ++c) weights.push_back(rng.uniform01());
    }
  }
  return SomLattice(rows, cols, dim, config.radius, std::move(weights));
}

std::size_t bmu(const SomLattice& lattice, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(lattice.dim()))
    throw ContractError(fmt::format("input has {} components, lattice expects {}",
                                    x.size(), lattice.dim()));
  double best_dist = 0.0;
  std::uint32_t best = 0;
  kernels::nearest_scalar({x.data(), 1, lattice.weights().data(), lattice.size(),
                           lattice.dim(), &best, &best_dist});
  return best;
}

SomLattice train(SomLattice lattice, const ImageGrid& img, const TrainConfig& config) {
  config.validate();
  require_dim(lattice, img.channels());
  if (img.empty()) throw ContractError("training image is empty");

  Xoshiro256 rng(config.seed);
  rng.discard(init_draws(lattice.size(), lattice.dim(), config.init_mode));

  const auto rows = static_cast<std::ptrdiff_t>(lattice.rows_);
  const auto cols = static_cast<std::ptrdiff_t>(lattice.cols_);
  const std::ptrdiff_t radius = lattice.radius_;
  const std::size_t dim = static_cast<std::size_t>(lattice.dim_);
  double* weights = lattice.weights_.data();

  for (std::uint64_t t = 0; t < config.iterations; ++t) {
    const auto x = img.pixel(rng.below(img.pixel_count()));
    const auto winner = static_cast<std::ptrdiff_t>(bmu(lattice, x));
    const std::ptrdiff_t wr = winner / cols;
    const std::ptrdiff_t wc = winner % cols;
    const double alpha = config.alpha(t);
    for (std::ptrdiff_t r = std::max<std::ptrdiff_t>(0, wr - radius);
         r <= std::min(rows - 1, wr + radius); ++r) {
      for (std::ptrdiff_t c = std::max<std::ptrdiff_t>(0, wc - radius);
           c <= std::min(cols - 1, wc + radius); ++c) {
        double* w = weights + static_cast<std::size_t>(r * cols + c) * dim;
        for (std::size_t k = 0; k < dim; ++k) w[k] = w[k] + alpha * (x[k] - w[k]);
      }
    }
  }
  lattice.trained_on_ = img.id();
  return lattice;
}

double quantization_error(const SomLattice& lattice, const ImageGrid& img,
                          const QeOptions& options) {
  require_dim(lattice, img.channels());
  if (img.empty()) throw ContractError("cannot score an empty image");

  const kernels::NearestFn nearest = kernels::get(options.kernel.value_or(kernels::preferred()));
  const std::size_t pixels = img.pixel_count();
  const std::size_t dim = static_cast<std::size_t>(img.channels());
  const std::size_t blocks = (pixels + kQeBlock - 1) / kQeBlock;
  std::vector<double> block_sums(blocks);

  parallel_for(blocks, options.threads, [&](std::size_t first, std::size_t last) {
    std::vector<double> dist2(kQeBlock);
    for (std::size_t b = first; b < last; ++b) {
      const std::size_t begin = b * kQeBlock;
      const std::size_t count = std::min(kQeBlock, pixels - begin);
      nearest({img.data().data() + begin * dim, count, lattice.weights().data(),
               lattice.size(), lattice.dim(), nullptr, dist2.data()});
      double sum = 0.0;
      for (std::size_t i = 0; i < count; ++i) sum += std::sqrt(dist2[i]);
      block_sums[b] = sum;
    }
  });
  return pairwise_sum(block_sums) / static_cast<double>(pixels);
}

nlohmann::json lattice_to_json(const SomLattice& lattice) {
  nlohmann::json weights = nlohmann::json::array();
  for (std::size_t r = 0; r < lattice.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < lattice.cols(); ++c) {
      const auto w = lattice.weight(r * lattice.cols() + c);
      row.push_back(std::vector<double>(w.begin(), w.end()));
    }
    weights.push_back(std::move(row));
  }
  nlohmann::json doc;
  doc["schema_version"] = kLatticeSchemaVersion;
  doc["rows"] = lattice.rows();
  doc["cols"] = lattice.cols();
  doc["dim"] = lattice.dim();
  doc["radius"] = lattice.radius();
  doc["trained_on"] = lattice.trained_on() ? nlohmann::json(*lattice.trained_on())
                                           : nlohmann::json(nullptr);
  doc["weights"] = std::move(weights);
  return doc;
}

SomLattice lattice_from_json(const nlohmann::json& doc) {
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kLatticeSchemaVersion)
      throw FormatError(fmt::format("unsupported lattice schema_version {}", version));
    const auto rows = doc.at("rows").get<std::size_t>();
    const auto cols = doc.at("cols").get<std::size_t>();
    const int dim = doc.at("dim").get<int>();
    const int radius = doc.at("radius").get<int>();
    std::optional<std::string> trained_on;
    if (const auto& t = doc.at("trained_on"); !t.is_null()) trained_on = t.get<std::string>();

    const auto& grid = doc.at("weights");
    if (!grid.is_array() || grid.size() != rows)
      throw FormatError("lattice weights do not match rows");
    std::vector<double> weights;
    for (const auto& row : grid) {
      if (!row.is_array() || row.size() != cols)
        throw FormatError("lattice weights do not match cols");
      for (const auto& w : row) {
        if (!w.is_array() || w.size() != static_cast<std::size_t>(dim))
          throw FormatError("lattice weight vector does not match dim");
        for (const auto& v : w) weights.push_back(v.get<double>());
      }
    }
    return SomLattice(rows, cols, dim, radius, std::move(weights), std::move(trained_on));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("malformed lattice document: {}", e.what()));
  } catch (const ContractError& e) {
    throw FormatError(fmt::format("invalid lattice document: {}", e.what()));
  }
}

void save_lattice(const SomLattice& lattice, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot create {}", path.string()));
  out << lattice_to_json(lattice).dump(2) << '\n';
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
}

SomLattice load_lattice(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return lattice_from_json(doc);
}

}  // namespace somqe
