#include "semhash/kernels.hpp"

#include <bit>
#include <cmath>

namespace semhash::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sparse_dot_scalar(const std::uint32_t* ids, const double* vals, std::size_t nnz,
                         const double* dense) {
    double acc = 0.0;
    for (std::size_t k = 0; k < nnz; ++k) acc += vals[k] * dense[ids[k]];
    return acc;
}

void hamming_scalar(const std::uint64_t* codes, std::size_t count, std::size_t words,
                    const std::uint64_t* center, std::uint32_t* out) {
    for (std::size_t d = 0; d < count; ++d) {
        const std::uint64_t* c = codes + d * words;
        std::uint32_t dist = 0;
        for (std::size_t w = 0; w < words; ++w) dist += std::popcount(c[w] ^ center[w]);
        out[d] = dist;
    }
}

void adadelta_scalar(double* param, const double* grad, double* grad_sq, double* step_sq,
                     std::size_t n, double rho, double epsilon, double learning_rate) {
    const double one_minus_rho = 1.0 - rho;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        grad_sq[i] = rho * grad_sq[i] + one_minus_rho * (g * g);
        const double step = std::sqrt(step_sq[i] + epsilon) / std::sqrt(grad_sq[i] + epsilon) * g;
        step_sq[i] = rho * step_sq[i] + one_minus_rho * (step * step);
        param[i] -= learning_rate * step;
    }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{"scalar",          Isa::scalar,    dot_scalar,
                                   axpy_scalar,       sparse_dot_scalar, hamming_scalar,
                                   adadelta_scalar};
    return table;
}

}  // namespace semhash::kernels
