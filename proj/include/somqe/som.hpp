#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "somqe/image.hpp"
#include "somqe/kernels.hpp"

namespace somqe {

enum class InitMode { SamplePixels, UniformRandom };

/// Hyperparameters for online winner-take-all training.
struct TrainConfig {
  std::uint64_t iterations = 10'000;
  double alpha_start = 0.5;
  double alpha_end = 0.01;
  int radius = 1;
  std::uint64_t seed = 42;
  InitMode init_mode = InitMode::UniformRandom;

  /// Throws ConfigError unless 0 < alpha_end <= alpha_start <= 1 and radius >= 0.
  void validate() const;

  /// Learning rate at step t: linear from alpha_start (t=0) to alpha_end (t=T-1).
  double alpha(std::uint64_t step) const noexcept;
};

/// Fixed-size rectangular lattice of codebook vectors.
///
/// Neuron (r, c) has flat index r * cols + c. The neuron count and the
/// neighborhood radius never change after construction.
class SomLattice {
 public:
  SomLattice(std::size_t rows, std::size_t cols, int dim, int radius,
             std::vector<double> weights,
             std::optional<std::string> trained_on = std::nullopt);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  int dim() const noexcept { return dim_; }
  int radius() const noexcept { return radius_; }
  const std::optional<std::string>& trained_on() const noexcept { return trained_on_; }

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> weight(std::size_t neuron) const noexcept {
    return {weights_.data() + neuron * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }

  friend bool operator==(const SomLattice&, const SomLattice&) = default;

 private:
  friend SomLattice train(SomLattice, const ImageGrid&, const TrainConfig&);

  std::size_t rows_;
  std::size_t cols_;
  int dim_;
  int radius_;
  std::vector<double> weights_;
  std::optional<std::string> trained_on_;
};

/// Number of generator draws init_lattice consumes; train skips this many
/// before sampling so that init + train form one continuous stream.
std::uint64_t init_draws(std::size_t neurons, int dim, InitMode mode) noexcept;

SomLattice init_lattice(std::size_t rows, std::size_t cols,
                        const ImageGrid& training_image,
                        const TrainConfig& config);

/// Lowest flat index minimizing squared Euclidean distance to x.
std::size_t bmu(const SomLattice& lattice, std::span<const double> x);

/// T sequential steps: sample a pixel, find its BMU b, and move every neuron
/// within Chebyshev grid distance `radius` of b by alpha(t) * (x - w).
SomLattice train(SomLattice lattice, const ImageGrid& img,
                 const TrainConfig& config);

struct QeOptions {
  unsigned threads = 1;
  std::optional<kernels::Kind> kernel;  // default: kernels::preferred()
};

/// Pixels per reduction block. Block sums are accumulated left to right and
/// then combined by a fixed pairwise tree, so the result does not depend on
/// the thread count or kernel.
inline constexpr std::size_t kQeBlock = 4096;

/// Mean over pixels of ||x - w_bmu(x)||.
double quantization_error(const SomLattice& lattice, const ImageGrid& img,
                          const QeOptions& options = {});

inline constexpr int kLatticeSchemaVersion = 1;

nlohmann::json lattice_to_json(const SomLattice& lattice);
/// Throws FormatError on a malformed or unsupported document.
SomLattice lattice_from_json(const nlohmann::json& doc);

void save_lattice(const SomLattice& lattice, const std::filesystem::path& path);
SomLattice load_lattice(const std::filesystem::path& path);

}  // namespace somqe
