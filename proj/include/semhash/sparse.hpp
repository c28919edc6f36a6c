#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace semhash {

/// Sorted (feature id, weight) pairs over a fixed dimensionality.
///
/// Invariants: ids strictly increasing, every id < dim, no stored zeros.
/// Ids and weights are kept in parallel arrays so the ranker can feed them
/// straight into the gather kernel.
class SparseVector {
public:
    SparseVector() = default;
    explicit SparseVector(std::uint32_t dim) : dim_(dim) {}

    /// Validates the invariants; throws std::invalid_argument on violation.
    SparseVector(std::uint32_t dim, std::vector<std::uint32_t> ids, std::vector<double> values);

    /// Sorts by id; duplicate ids are rejected.
    static SparseVector from_pairs(std::uint32_t dim,
                                   const std::vector<std::pair<std::uint32_t, double>>& pairs);
    /// Keeps the nonzero entries of a dense vector.
    static SparseVector from_dense(std::span<const double> dense);

    std::uint32_t dim() const noexcept { return dim_; }
    std::size_t nnz() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    std::span<const std::uint32_t> ids() const noexcept { return ids_; }
    std::span<const double> values() const noexcept { return values_; }

    double norm() const noexcept;
    double sum() const noexcept;
    /// Weight at `id`, 0 when absent.
    double at(std::uint32_t id) const noexcept;

    std::vector<double> to_dense() const;
    std::vector<std::pair<std::uint32_t, double>> pairs() const;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    std::uint32_t dim_ = 0;
    std::vector<std::uint32_t> ids_;
    std::vector<double> values_;
};

/// Merge-join dot product. Throws on dimensionality mismatch.
double dot(const SparseVector& a, const SparseVector& b);

/// a + scale * b, dropping entries that cancel to exactly zero.
SparseVector add_scaled(const SparseVector& a, const SparseVector& b, double scale);

}  // namespace semhash
