#include "semhash/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace semhash {

SparseVector::SparseVector(std::uint32_t dim, std::vector<std::uint32_t> ids, std::vector<double> values)
    : dim_(dim), ids_(std::move(ids)), values_(std::move(values)) {
    if (ids_.size() != values_.size()) throw std::invalid_argument("sparse vector: ids/values length mismatch");
    for (std::size_t k = 0; k < ids_.size(); ++k) {
        if (ids_[k] >= dim_) {
            throw std::invalid_argument("sparse vector: id " + std::to_string(ids_[k]) + " out of range " +
                                        std::to_string(dim_));
        }
        if (k > 0 && ids_[k] <= ids_[k - 1]) throw std::invalid_argument("sparse vector: ids not strictly increasing");
        if (values_[k] == 0.0) throw std::invalid_argument("sparse vector: stored zero weight");
        if (!std::isfinite(values_[k])) throw std::invalid_argument("sparse vector: non-finite weight");
    }
}

SparseVector SparseVector::from_pairs(std::uint32_t dim,
                                      const std::vector<std::pair<std::uint32_t, double>>& pairs) {
    auto sorted = pairs;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::uint32_t> ids;
    std::vector<double> values;
    ids.reserve(sorted.size());
    values.reserve(sorted.size());
    for (const auto& [id, w] : sorted) {
        ids.push_back(id);
        values.push_back(w);
    }
    return SparseVector(dim, std::move(ids), std::move(values));
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
    SparseVector out(static_cast<std::uint32_t>(dense.size()));
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0.0) {
            if (!std::isfinite(dense[i])) throw std::invalid_argument("sparse vector: non-finite weight");
            out.ids_.push_back(static_cast<std::uint32_t>(i));
            out.values_.push_back(dense[i]);
        }
    }
    return out;
}

double SparseVector::norm() const noexcept {
    double acc = 0.0;
    for (double v : values_) acc += v * v;
    return std::sqrt(acc);
}

double SparseVector::sum() const noexcept {
    double acc = 0.0;
    for (double v : values_) acc += v;
    return acc;
}

double SparseVector::at(std::uint32_t id) const noexcept {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return 0.0;
    return values_[static_cast<std::size_t>(it - ids_.begin())];
}

std::vector<double> SparseVector::to_dense() const {
    std::vector<double> dense(dim_, 0.0);
    for (std::size_t k = 0; k < ids_.size(); ++k) dense[ids_[k]] = values_[k];
    return dense;
}

std::vector<std::pair<std::uint32_t, double>> SparseVector::pairs() const {
    std::vector<std::pair<std::uint32_t, double>> out;
    out.reserve(ids_.size());
    for (std::size_t k = 0; k < ids_.size(); ++k) out.emplace_back(ids_[k], values_[k]);
    return out;
}

double dot(const SparseVector& a, const SparseVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dot: dimensionality mismatch");
    const auto ai = a.ids(), bi = b.ids();
    const auto av = a.values(), bv = b.values();
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < ai.size() && j < bi.size()) {
        if (ai[i] < bi[j]) {
            ++i;
        } else if (bi[j] < ai[i]) {
            ++j;
        } else {
            acc += av[i++] * bv[j++];
        }
    }
    return acc;
}

SparseVector add_scaled(const SparseVector& a, const SparseVector& b, double scale) {
    if (a.dim() != b.dim()) throw std::invalid_argument("add_scaled: dimensionality mismatch");
    const auto ai = a.ids(), bi = b.ids();
    const auto av = a.values(), bv = b.values();
    std::vector<std::uint32_t> ids;
    std::vector<double> values;
    ids.reserve(ai.size() + bi.size());
    values.reserve(ai.size() + bi.size());
    auto emit = [&](std::uint32_t id, double w) {
        if (w != 0.0) {
            ids.push_back(id);
            values.push_back(w);
        }
    };
    std::size_t i = 0, j = 0;
    while (i < ai.size() || j < bi.size()) {
        if (j == bi.size() || (i < ai.size() && ai[i] < bi[j])) {
            emit(ai[i], av[i]);
            ++i;
        } else if (i == ai.size() || bi[j] < ai[i]) {
            emit(bi[j], scale * bv[j]);
            ++j;
        } else {
            emit(ai[i], av[i] + scale * bv[j]);
            ++i;
            ++j;
        }
    }
    return SparseVector(a.dim(), std::move(ids), std::move(values));
}

}  // namespace semhash
