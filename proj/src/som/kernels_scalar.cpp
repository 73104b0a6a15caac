#include <limits>

#include "somqe/kernels.hpp"

namespace somqe::kernels {

void nearest_scalar(const NearestArgs& args) {
  const std::size_t dim = static_cast<std::size_t>(args.dim);
  for (std::size_t p = 0; p < args.count; ++p) {
    const double* x = args.pixels + p * dim;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_index = 0;
    for (std::size_t k = 0; k < args.neurons; ++k) {
      const double* w = args.weights + k * dim;
      double d = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = x[c] - w[c];
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        best_index = static_cast<std::uint32_t>(k);
      }
    }
    args.dist2[p] = best;
    if (args.index) args.index[p] = best_index;
  }
}

}  // namespace somqe::kernels
