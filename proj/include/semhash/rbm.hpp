#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "semhash/autoencoder.hpp"
#include "semhash/container.hpp"

namespace semhash {

/// Binary restricted Boltzmann machine. weights[i * n_hidden + j] = w_ij
/// couples visible unit i with hidden unit j.
struct RbmParams {
    std::uint32_t n_visible = 0;
    std::uint32_t n_hidden = 0;
    std::vector<double> weights;
    std::vector<double> visible_bias;  // a_i
    std::vector<double> hidden_bias;   // b_j

    double w(std::size_t i, std::size_t j) const { return weights[i * n_hidden + j]; }
    void validate() const;

    friend bool operator==(const RbmParams&, const RbmParams&) = default;
};

/// Zero parameters.
RbmParams make_rbm(std::uint32_t n_visible, std::uint32_t n_hidden);
/// Weights ~ N(0, 0.01^2), zero biases.
RbmParams init_rbm(std::uint32_t n_visible, std::uint32_t n_hidden, std::uint64_t seed);

/// E(v, h) = -(sum a_i v_i + sum b_j h_j + sum v_i h_j w_ij)
double energy(const RbmParams& rbm, std::span<const double> v, std::span<const double> h);

/// Z by exhaustive enumeration; only for n_visible + n_hidden <= 20.
double partition_function(const RbmParams& rbm);
inline constexpr std::uint32_t kMaxEnumerableUnits = 20;

/// p(h_j = 1 | v) = sigma(b_j + sum_i v_i w_ij). v may be probability valued.
std::vector<double> hidden_probs(const RbmParams& rbm, std::span<const double> v);
/// p(v_i = 1 | h) = sigma(a_i + sum_j h_j w_ij).
std::vector<double> visible_probs(const RbmParams& rbm, std::span<const double> h);

/// One CD1 update over a batch: h* ~ p(h|v), v* ~ p(v|h*), and
/// dw = lr * (<v h*>_data - <v* p(h|v*)>_model), biases likewise.
RbmParams cd1_step(const RbmParams& rbm, std::span<const std::vector<double>> batch, double learning_rate,
                   std::mt19937_64& rng);

/// Mean over rows of ||v - visible_probs(hidden_probs(v))||^2.
double reconstruction_error(const RbmParams& rbm, std::span<const std::vector<double>> data);

struct RbmTrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 100;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
};

/// Mini-batch CD1 over `data` for cfg.epochs passes (seeded shuffle each pass).
RbmParams train_rbm(RbmParams rbm, std::span<const std::vector<double>> data, const RbmTrainConfig& cfg);

/// Greedy layer-wise training. layer_dims = [visible, h1, h2, ...]; layer k+1
/// trains on the hidden probabilities of layer k.
std::vector<RbmParams> pretrain_stack(std::span<const std::uint32_t> layer_dims,
                                      std::span<const std::vector<double>> data, const RbmTrainConfig& cfg);

/// Mirror a stack into an all-logistic autoencoder: encoder layers use w and
/// hidden biases in order, decoder layers use w^T and visible biases in reverse.
NetworkParams unroll(std::span<const RbmParams> stack);

void save_rbm_stack(const std::filesystem::path& path, std::span<const RbmParams> stack);
std::vector<RbmParams> load_rbm_stack(const std::filesystem::path& path);

}  // namespace semhash
