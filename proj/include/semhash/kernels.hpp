#pragma once

// Data-parallel inner loops used by the network, the RBM, the ranker and the
// hash index. Every kernel has a scalar reference implementation; an AVX2
// variant is selected at runtime when the CPU supports it.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace semhash::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
    const char* name;
    Isa isa;

    // sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // sum_k vals[k] * dense[ids[k]]
    double (*sparse_dot)(const std::uint32_t* ids, const double* vals, std::size_t nnz,
                         const double* dense);
    // out[d] = popcount(codes[d] ^ center) over `words` 64-bit words per code
    void (*hamming_distances)(const std::uint64_t* codes, std::size_t count, std::size_t words,
                              const std::uint64_t* center, std::uint32_t* out);
    // Adadelta step over n parameters; accumulators updated in place.
    void (*adadelta_update)(double* param, const double* grad, double* grad_sq, double* step_sq,
                            std::size_t n, double rho, double epsilon, double learning_rate);
};

const KernelTable& scalar_table() noexcept;
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table() noexcept;
#endif

bool isa_supported(Isa isa) noexcept;

/// Table in use. First call picks the best supported ISA, unless the
/// SEMHASH_KERNELS environment variable names one ("scalar", "avx2").
const KernelTable& active() noexcept;

/// Force a specific ISA. Throws std::invalid_argument if unsupported.
void select(Isa isa);
/// Accepts "auto", "scalar" or "avx2".
void select(std::string_view name);

std::string_view isa_name(Isa isa) noexcept;

}  // namespace semhash::kernels
