#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

// Nearest-codeword search over a block of pixels.
//
// Every kernel computes, for each pixel p, the lowest neuron index k
// minimizing ((x0-w0)^2 + (x1-w1)^2) + (x2-w2)^2 (left-to-right sums over
// the components, no fused multiply-add) and that minimum. Implementations
// are required to agree bit-for-bit with the scalar reference.

namespace somqe::kernels {

enum class Kind { Scalar, Avx2 };

struct NearestArgs {
  const double* pixels;   // count * dim, interleaved
  std::size_t count;
  const double* weights;  // neurons * dim, interleaved
  std::size_t neurons;
  int dim;                // 1 or 3
  std::uint32_t* index;   // count outputs, may be null
  double* dist2;          // count outputs
};

using NearestFn = void (*)(const NearestArgs&);

void nearest_scalar(const NearestArgs& args);
#if defined(__x86_64__) || defined(_M_X64)
void nearest_avx2(const NearestArgs& args);
#endif

/// True when the running CPU can execute `kind`.
bool supported(Kind kind) noexcept;

/// Kernel for `kind`; throws ContractError if it is not supported.
NearestFn get(Kind kind);

/// Kind used when none is requested: SOMQE_KERNEL (scalar|avx2) if set and
/// supported, else the widest supported variant.
Kind preferred() noexcept;

std::string_view name(Kind kind) noexcept;
std::optional<Kind> parse(std::string_view text) noexcept;

}  // namespace somqe::kernels
