#include <cstdlib>

#include <fmt/format.h>

#include "somqe/errors.hpp"
#include "somqe/kernels.hpp"

namespace somqe::kernels {

bool supported(Kind kind) noexcept {
  switch (kind) {
    case Kind::Scalar:
      return true;
    case Kind::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

NearestFn get(Kind kind) {
  if (!supported(kind))
    throw ContractError(fmt::format("kernel '{}' is not supported on this CPU", name(kind)));
  switch (kind) {
    case Kind::Scalar:
      return nearest_scalar;
    case Kind::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return nearest_avx2;
#else
      break;
#endif
  }
  return nearest_scalar;
}

Kind preferred() noexcept {
  if (const char* env = std::getenv("SOMQE_KERNEL")) {
    if (auto kind = parse(env); kind && supported(*kind)) return *kind;
  }
  return supported(Kind::Avx2) ? Kind::Avx2 : Kind::Scalar;
}

std::string_view name(Kind kind) noexcept {
  switch (kind) {
    case Kind::Scalar:
      return "scalar";
    case Kind::Avx2:
      return "avx2";
  }
  return "unknown";
}

std::optional<Kind> parse(std::string_view text) noexcept {
  if (text == "scalar") return Kind::Scalar;
  if (text == "avx2") return Kind::Avx2;
  return std::nullopt;
}

}  // namespace somqe::kernels
