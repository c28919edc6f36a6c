#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "semhash/autoencoder.hpp"
#include "semhash/hashindex.hpp"
#include "semhash/rbm.hpp"

namespace oracle {

struct GradCheck {
    std::size_t checked = 0;
    std::size_t failures = 0;
    double worst_rel = 0.0;
};

// Central differences of loss_value against backward() for every weight and bias.
inline GradCheck finite_difference(semhash::NetworkParams net, const std::vector<double>& x,
                                   const std::vector<double>& target, semhash::Loss loss, double step = 1e-5,
                                   double rel_tol = 1e-3, double abs_floor = 1e-8) {
    const auto trace = semhash::forward(net, x);
    const auto g = semhash::backward(net, trace, target, loss);
    GradCheck out;
    auto probe = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + step;
        const double up = semhash::loss_value(loss, semhash::reconstruct(net, x), target);
        param = saved - step;
        const double down = semhash::loss_value(loss, semhash::reconstruct(net, x), target);
        param = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double diff = std::abs(numeric - analytic);
        const double rel = diff / std::max({std::abs(numeric), std::abs(analytic), 1e-300});
        ++out.checked;
        if (diff > abs_floor) {
            out.worst_rel = std::max(out.worst_rel, rel);
            if (rel > rel_tol) ++out.failures;
        }
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        for (std::size_t p = 0; p < net.layers[l].weights.size(); ++p) probe(net.layers[l].weights[p], g.weights[l][p]);
        for (std::size_t p = 0; p < net.layers[l].bias.size(); ++p) probe(net.layers[l].bias[p], g.bias[l][p]);
    }
    return out;
}

inline std::vector<double> bits_of(std::uint64_t mask, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>((mask >> i) & 1U);
    return v;
}

// p(h_j = 1 | v) from the joint e^{-E}: sum over all h with h_j = 1, divided by sum over all h.
inline std::vector<double> brute_hidden_given_visible(const semhash::RbmParams& rbm, const std::vector<double>& v) {
    std::vector<double> on(rbm.n_hidden, 0.0);
    double total = 0.0;
    for (std::uint64_t hm = 0; hm < (1ULL << rbm.n_hidden); ++hm) {
        const auto h = bits_of(hm, rbm.n_hidden);
        const double p = std::exp(-semhash::energy(rbm, v, h));
        total += p;
        for (std::size_t j = 0; j < rbm.n_hidden; ++j)
            if (h[j] == 1.0) on[j] += p;
    }
    for (auto& x : on) x /= total;
    return on;
}

inline std::vector<double> brute_visible_given_hidden(const semhash::RbmParams& rbm, const std::vector<double>& h) {
    std::vector<double> on(rbm.n_visible, 0.0);
    double total = 0.0;
    for (std::uint64_t vm = 0; vm < (1ULL << rbm.n_visible); ++vm) {
        const auto v = bits_of(vm, rbm.n_visible);
        const double p = std::exp(-semhash::energy(rbm, v, h));
        total += p;
        for (std::size_t i = 0; i < rbm.n_visible; ++i)
            if (v[i] == 1.0) on[i] += p;
    }
    for (auto& x : on) x /= total;
    return on;
}

inline semhash::RbmParams random_rbm(std::uint32_t nv, std::uint32_t nh, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    auto rbm = semhash::make_rbm(nv, nh);
    for (auto& w : rbm.weights) w = n(rng);
    for (auto& a : rbm.visible_bias) a = n(rng);
    for (auto& b : rbm.hidden_bias) b = n(rng);
    return rbm;
}

// 4x4 bars and stripes: every subset of rows lit, or every subset of columns lit.
inline std::vector<std::vector<double>> bars_and_stripes() {
    std::set<std::vector<double>> patterns;
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<double> rows(16, 0.0), cols(16, 0.0);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                if (mask & (1 << r)) rows[r * 4 + c] = 1.0;
                if (mask & (1 << c)) cols[r * 4 + c] = 1.0;
            }
        patterns.insert(rows);
        patterns.insert(cols);
    }
    return {patterns.begin(), patterns.end()};
}

// Ids of every indexed code within `radius` of `center`, by direct bit comparison.
inline std::vector<semhash::DocId> brute_ball(const std::vector<semhash::BinaryCode>& codes,
                                              const semhash::BinaryCode& center, std::uint32_t radius) {
    std::vector<semhash::DocId> out;
    for (std::size_t d = 0; d < codes.size(); ++d) {
        std::uint32_t dist = 0;
        for (std::uint32_t b = 0; b < center.width(); ++b) dist += codes[d].bit(b) != center.bit(b);
        if (dist <= radius) out.push_back(static_cast<semhash::DocId>(d));
    }
    return out;
}

inline std::uint64_t binomial(std::uint32_t n, std::uint32_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::uint32_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace oracle
