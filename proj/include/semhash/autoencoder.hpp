#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "semhash/container.hpp"
#include "semhash/sparse.hpp"
#include "semhash/textpipe.hpp"

namespace semhash {

enum class Activation : std::uint8_t { rectifier = 0, logistic = 1 };
enum class Loss : std::uint8_t { binary_cross_entropy = 0, squared_error = 1 };

std::string to_string(Activation a);
std::string to_string(Loss l);
Loss parse_loss(std::string_view name);

/// One fully connected layer. weights[i * out + j] holds w_ij, the
/// connection from input unit i to output unit j.
struct Layer {
    std::uint32_t in = 0;
    std::uint32_t out = 0;
    Activation activation = Activation::rectifier;
    std::vector<double> weights;
    std::vector<double> bias;

    double w(std::size_t i, std::size_t j) const { return weights[i * out + j]; }
    std::span<const double> row(std::size_t i) const { return {weights.data() + i * out, out}; }

    friend bool operator==(const Layer&, const Layer&) = default;
};

struct NetworkParams {
    std::vector<Layer> layers;
    /// Index of the layer whose output is the code (bottleneck).
    std::size_t code_layer = 0;

    std::vector<std::uint32_t> dims() const;
    std::uint32_t input_dim() const { return layers.front().in; }
    std::uint32_t output_dim() const { return layers.back().out; }
    std::uint32_t code_width() const { return layers.at(code_layer).out; }
    std::size_t parameter_count() const;
    /// Throws std::invalid_argument when shapes do not chain.
    void validate() const;

    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

/// [V, 500, 500, code_bits, 500, 500, V]
std::vector<std::uint32_t> default_dims(std::uint32_t vocab_size, std::uint32_t code_bits = 20,
                                        std::vector<std::uint32_t> hidden = {500, 500});

/// Position of the bottleneck in a dims list: first minimum among interior entries.
std::size_t bottleneck_index(std::span<const std::uint32_t> dims);

/// Logistic into the bottleneck and the output, rectifier elsewhere.
std::vector<Activation> default_activations(std::span<const std::uint32_t> dims);

/// Weights ~ N(0, 1/fan_in), zero biases, default activations.
NetworkParams init_network(std::span<const std::uint32_t> dims, std::uint64_t seed);

/// z[0] is the input, z[k + 1] = g(a[k]); z.back() is the reconstruction.
struct ForwardTrace {
    std::vector<std::vector<double>> a;
    std::vector<std::vector<double>> z;

    std::span<const double> reconstruction() const { return z.back(); }
};

ForwardTrace forward(const NetworkParams& net, std::span<const double> x);
/// Reuses the buffers in `trace`.
void forward(const NetworkParams& net, std::span<const double> x, ForwardTrace& trace);

/// Bottleneck probabilities; only runs the encoder half.
std::vector<double> encode(const NetworkParams& net, std::span<const double> x);
std::vector<double> reconstruct(const NetworkParams& net, std::span<const double> x);

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> bias;
    std::vector<std::vector<double>> delta;  // dE/da per layer, last sample

    static Gradients zeros_like(const NetworkParams& net);
    void clear();
};

/// Per-sample loss, summed over output units.
double loss_value(Loss loss, std::span<const double> reconstruction, std::span<const double> target);

/// dE/dw for one sample. For cross-entropy with a logistic output the output
/// delta is r - t.
Gradients backward(const NetworkParams& net, const ForwardTrace& trace, std::span<const double> target,
                   Loss loss = Loss::binary_cross_entropy);
/// Adds this sample's gradient into `acc` (acc.delta is overwritten).
void backward_accumulate(const NetworkParams& net, const ForwardTrace& trace, std::span<const double> target,
                         Loss loss, Gradients& acc);

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 256;
    double noise_sigma = 2.0;
    std::uint64_t seed = 0;
    Loss loss = Loss::binary_cross_entropy;
    double rho = 0.95;
    double epsilon = 1e-6;
    /// Multiplier on the Adadelta step; 0 freezes the weights.
    double learning_rate = 1.0;
};

struct TrainResult {
    NetworkParams net;
    std::vector<double> epoch_loss;  // mean per-sample loss on the corrupted inputs
};

/// Supplies row `index` of the training set into `out` (size = input dim).
using RowSource = std::function<void(std::size_t index, std::span<double> out)>;

/// Denoising training with Adadelta: every batch corrupts inputs with
/// N(0, sigma^2) noise clipped to [0, 1] and reconstructs the clean input.
TrainResult train(NetworkParams net, std::size_t rows, const RowSource& source, const TrainConfig& cfg);
TrainResult train(NetworkParams net, std::span<const std::vector<double>> data, const TrainConfig& cfg);
TrainResult train(NetworkParams net, std::span<const SparseVector> data, const ScalingStats& scaling,
                  const TrainConfig& cfg);

void write_network(io::ByteWriter& out, const NetworkParams& net);
NetworkParams read_network(io::ByteReader& in);
void save_network(const std::filesystem::path& path, const NetworkParams& net);
NetworkParams load_network(const std::filesystem::path& path);
std::string network_to_json(const NetworkParams& net);

}  // namespace semhash
