// Compiled with -mavx2 -mfma -mpopcnt. Only reached through the dispatch table
// after a CPUID check.

#include "semhash/kernels.hpp"

#include <immintrin.h>

#include <bit>
#include <cmath>

namespace semhash::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        i += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

// No FMA here: mul then add rounds exactly like the scalar loop.
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sparse_dot_avx2(const std::uint32_t* ids, const double* vals, std::size_t nnz,
                       const double* dense) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= nnz; k += 4) {
        const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ids + k));
        const __m256d gathered = _mm256_i32gather_pd(dense, idx, 8);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), gathered, acc);
    }
    double sum = hsum(acc);
    for (; k < nnz; ++k) sum += vals[k] * dense[ids[k]];
    return sum;
}

inline __m256i popcount_epi64(__m256i v) {
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
    return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

void hamming_avx2(const std::uint64_t* codes, std::size_t count, std::size_t words,
                  const std::uint64_t* center, std::uint32_t* out) {
    std::size_t d = 0;
    if (words == 1) {
        const __m256i c = _mm256_set1_epi64x(static_cast<long long>(center[0]));
        alignas(32) std::uint64_t lanes[4];
        for (; d + 4 <= count; d += 4) {
            const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(codes + d));
            _mm256_store_si256(reinterpret_cast<__m256i*>(lanes),
                               popcount_epi64(_mm256_xor_si256(v, c)));
            out[d] = static_cast<std::uint32_t>(lanes[0]);
            out[d + 1] = static_cast<std::uint32_t>(lanes[1]);
            out[d + 2] = static_cast<std::uint32_t>(lanes[2]);
            out[d + 3] = static_cast<std::uint32_t>(lanes[3]);
        }
    }
    for (; d < count; ++d) {
        const std::uint64_t* code = codes + d * words;
        std::uint32_t dist = 0;
        for (std::size_t w = 0; w < words; ++w) dist += std::popcount(code[w] ^ center[w]);
        out[d] = dist;
    }
}

// Same operation order as the scalar kernel; sqrt and div are correctly
// rounded, so results match it bit for bit.
void adadelta_avx2(double* param, const double* grad, double* grad_sq, double* step_sq,
                   std::size_t n, double rho, double epsilon, double learning_rate) {
    const __m256d vrho = _mm256_set1_pd(rho);
    const __m256d vone_minus = _mm256_set1_pd(1.0 - rho);
    const __m256d veps = _mm256_set1_pd(epsilon);
    const __m256d vlr = _mm256_set1_pd(learning_rate);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d g = _mm256_loadu_pd(grad + i);
        __m256d gs = _mm256_add_pd(_mm256_mul_pd(vrho, _mm256_loadu_pd(grad_sq + i)),
                                   _mm256_mul_pd(vone_minus, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(grad_sq + i, gs);
        const __m256d ss = _mm256_loadu_pd(step_sq + i);
        const __m256d step = _mm256_mul_pd(
            _mm256_div_pd(_mm256_sqrt_pd(_mm256_add_pd(ss, veps)), _mm256_sqrt_pd(_mm256_add_pd(gs, veps))),
            g);
        _mm256_storeu_pd(step_sq + i, _mm256_add_pd(_mm256_mul_pd(vrho, ss),
                                                    _mm256_mul_pd(vone_minus, _mm256_mul_pd(step, step))));
        _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), _mm256_mul_pd(vlr, step)));
    }
    const double one_minus_rho = 1.0 - rho;
    for (; i < n; ++i) {
        const double g = grad[i];
        grad_sq[i] = rho * grad_sq[i] + one_minus_rho * (g * g);
        const double step = std::sqrt(step_sq[i] + epsilon) / std::sqrt(grad_sq[i] + epsilon) * g;
        step_sq[i] = rho * step_sq[i] + one_minus_rho * (step * step);
        param[i] -= learning_rate * step;
    }
}

}  // namespace

const KernelTable& avx2_table() noexcept {
    static const KernelTable table{"avx2",          Isa::avx2,       dot_avx2,
                                   axpy_avx2,       sparse_dot_avx2, hamming_avx2,
                                   adadelta_avx2};
    return table;
}

}  // namespace semhash::kernels
