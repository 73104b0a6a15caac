#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <limits>

#include "somqe/kernels.hpp"

namespace somqe::kernels {
namespace {

#define SOMQE_AVX2 __attribute__((target("avx2")))

// Lanes hold four pixels; component c of lane j comes from x[j * dim + c].
SOMQE_AVX2 inline __m256d load_component(const double* x, std::size_t dim,
                                         std::size_t c) {
  return _mm256_set_pd(x[3 * dim + c], x[2 * dim + c], x[dim + c], x[c]);
}

SOMQE_AVX2 inline void store_result(const NearestArgs& args, std::size_t p,
                                    __m256d best, __m256d best_index) {
  _mm256_storeu_pd(args.dist2 + p, best);
  if (args.index) {
    const __m128i idx = _mm256_cvtpd_epi32(best_index);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(args.index + p), idx);
  }
}

// Strict less-than while scanning neurons upward keeps the lowest index
// on ties, same as the scalar loop.
template <int Dim>
SOMQE_AVX2 void nearest_block(const NearestArgs& args, std::size_t count) {
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t p = 0;
  for (; p + 8 <= count; p += 8) {
    const double* xa = args.pixels + p * Dim;
    const double* xb = xa + 4 * Dim;
    __m256d xa_c[Dim], xb_c[Dim];
    for (int c = 0; c < Dim; ++c) {
      xa_c[c] = load_component(xa, Dim, c);
      xb_c[c] = load_component(xb, Dim, c);
    }
    __m256d best_a = inf, best_b = inf;
    __m256d idx_a = _mm256_setzero_pd(), idx_b = _mm256_setzero_pd();
    for (std::size_t k = 0; k < args.neurons; ++k) {
      const double* w = args.weights + k * Dim;
      __m256d diff = _mm256_sub_pd(xa_c[0], _mm256_set1_pd(w[0]));
      __m256d diff_b = _mm256_sub_pd(xb_c[0], _mm256_set1_pd(w[0]));
      __m256d da = _mm256_mul_pd(diff, diff);
      __m256d db = _mm256_mul_pd(diff_b, diff_b);
      for (int c = 1; c < Dim; ++c) {
        const __m256d wc = _mm256_set1_pd(w[c]);
        diff = _mm256_sub_pd(xa_c[c], wc);
        diff_b = _mm256_sub_pd(xb_c[c], wc);
        da = _mm256_add_pd(da, _mm256_mul_pd(diff, diff));
        db = _mm256_add_pd(db, _mm256_mul_pd(diff_b, diff_b));
      }
      const __m256d kk = _mm256_set1_pd(static_cast<double>(k));
      const __m256d lt_a = _mm256_cmp_pd(da, best_a, _CMP_LT_OQ);
      const __m256d lt_b = _mm256_cmp_pd(db, best_b, _CMP_LT_OQ);
      best_a = _mm256_blendv_pd(best_a, da, lt_a);
      best_b = _mm256_blendv_pd(best_b, db, lt_b);
      idx_a = _mm256_blendv_pd(idx_a, kk, lt_a);
      idx_b = _mm256_blendv_pd(idx_b, kk, lt_b);
    }
    store_result(args, p, best_a, idx_a);
    store_result(args, p + 4, best_b, idx_b);
  }
  if (p < count) {
    NearestArgs tail = args;
    tail.pixels = args.pixels + p * Dim;
    tail.count = count - p;
    tail.dist2 = args.dist2 + p;
    tail.index = args.index ? args.index + p : nullptr;
    nearest_scalar(tail);
  }
}

#undef SOMQE_AVX2

}  // namespace

void nearest_avx2(const NearestArgs& args) {
  switch (args.dim) {
    case 1:
      nearest_block<1>(args, args.count);
      break;
    case 3:
      nearest_block<3>(args, args.count);
      break;
    default:
      nearest_scalar(args);
  }
}

}  // namespace somqe::kernels

#endif
