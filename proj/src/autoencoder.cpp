#include "semhash/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "semhash/kernels.hpp"

namespace semhash {
namespace {

inline double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }

void apply_activation(Activation act, std::span<const double> a, std::span<double> z) {
    if (act == Activation::logistic) {
        for (std::size_t j = 0; j < a.size(); ++j) z[j] = logistic(a[j]);
    } else {
        for (std::size_t j = 0; j < a.size(); ++j) z[j] = a[j] > 0.0 ? a[j] : 0.0;
    }
}

// g'(a), written in terms of the layer output where that is cheaper.
inline double activation_slope(Activation act, double a, double z) {
    if (act == Activation::logistic) return z * (1.0 - z);
    return a > 0.0 ? 1.0 : 0.0;  // slope at exactly 0 is taken as 0
}

void layer_forward(const Layer& layer, std::span<const double> in, std::span<double> a, std::span<double> z) {
    const auto& k = kernels::active();
    std::copy(layer.bias.begin(), layer.bias.end(), a.begin());
    for (std::size_t i = 0; i < layer.in; ++i) {
        if (in[i] != 0.0) k.axpy(in[i], layer.weights.data() + i * layer.out, a.data(), layer.out);
    }
    apply_activation(layer.activation, a, z);
}

void check_input(const NetworkParams& net, std::span<const double> x) {
    if (net.layers.empty()) throw std::invalid_argument("network has no layers");
    if (x.size() != net.input_dim()) {
        throw std::invalid_argument("network input has size " + std::to_string(x.size()) + ", expected " +
                                    std::to_string(net.input_dim()));
    }
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("network input contains a non-finite value");
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::logistic ? "logistic" : "rectifier"; }

std::string to_string(Loss l) { return l == Loss::binary_cross_entropy ? "binary_cross_entropy" : "squared_error"; }

Loss parse_loss(std::string_view name) {
    if (name == "binary_cross_entropy" || name == "bce") return Loss::binary_cross_entropy;
    if (name == "squared_error" || name == "mse") return Loss::squared_error;
    throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

std::vector<std::uint32_t> NetworkParams::dims() const {
    std::vector<std::uint32_t> d;
    if (layers.empty()) return d;
    d.push_back(layers.front().in);
    for (const auto& l : layers) d.push_back(l.out);
    return d;
}

std::size_t NetworkParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

void NetworkParams::validate() const {
    if (layers.empty()) throw std::invalid_argument("network has no layers");
    if (code_layer >= layers.size()) throw std::invalid_argument("code layer index out of range");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& l = layers[k];
        if (l.in == 0 || l.out == 0) throw std::invalid_argument("layer with zero width");
        if (l.weights.size() != std::size_t{l.in} * l.out || l.bias.size() != l.out) {
            throw std::invalid_argument("layer " + std::to_string(k) + " parameter shape mismatch");
        }
        if (k > 0 && layers[k - 1].out != l.in) {
            throw std::invalid_argument("layer " + std::to_string(k) + " input does not match previous output");
        }
    }
}

std::vector<std::uint32_t> default_dims(std::uint32_t vocab_size, std::uint32_t code_bits,
                                        std::vector<std::uint32_t> hidden) {
    std::vector<std::uint32_t> dims{vocab_size};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(code_bits);
    dims.insert(dims.end(), hidden.rbegin(), hidden.rend());
    dims.push_back(vocab_size);
    return dims;
}

std::size_t bottleneck_index(std::span<const std::uint32_t> dims) {
    if (dims.size() < 3) throw std::invalid_argument("network needs at least three layer sizes");
    std::size_t best = 1;
    for (std::size_t k = 2; k + 1 < dims.size(); ++k)
        if (dims[k] < dims[best]) best = k;
    return best;
}

std::vector<Activation> default_activations(std::span<const std::uint32_t> dims) {
    const std::size_t code = bottleneck_index(dims);
    std::vector<Activation> acts(dims.size() - 1, Activation::rectifier);
    acts[code - 1] = Activation::logistic;
    acts.back() = Activation::logistic;
    return acts;
}

NetworkParams init_network(std::span<const std::uint32_t> dims, std::uint64_t seed) {
    if (dims.size() < 3) throw std::invalid_argument("network needs at least three layer sizes");
    for (auto d : dims)
        if (d == 0) throw std::invalid_argument("layer sizes must be positive");
    const auto acts = default_activations(dims);
    std::mt19937_64 rng(seed);
    NetworkParams net;
    net.code_layer = bottleneck_index(dims) - 1;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        Layer l;
        l.in = dims[k];
        l.out = dims[k + 1];
        l.activation = acts[k];
        l.weights.resize(std::size_t{l.in} * l.out);
        l.bias.assign(l.out, 0.0);
        std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(l.in)));
        for (auto& w : l.weights) w = dist(rng);
        net.layers.push_back(std::move(l));
    }
    return net;
}

void forward(const NetworkParams& net, std::span<const double> x, ForwardTrace& trace) {
    check_input(net, x);
    const std::size_t n = net.layers.size();
    trace.a.resize(n);
    trace.z.resize(n + 1);
    trace.z[0].assign(x.begin(), x.end());
    for (std::size_t k = 0; k < n; ++k) {
        const auto& layer = net.layers[k];
        trace.a[k].resize(layer.out);
        trace.z[k + 1].resize(layer.out);
        layer_forward(layer, trace.z[k], trace.a[k], trace.z[k + 1]);
    }
}

ForwardTrace forward(const NetworkParams& net, std::span<const double> x) {
    ForwardTrace trace;
    forward(net, x, trace);
    return trace;
}

std::vector<double> encode(const NetworkParams& net, std::span<const double> x) {
    check_input(net, x);
    std::vector<double> in(x.begin(), x.end());
    std::vector<double> a, z;
    for (std::size_t k = 0; k <= net.code_layer; ++k) {
        const auto& layer = net.layers[k];
        a.resize(layer.out);
        z.resize(layer.out);
        layer_forward(layer, in, a, z);
        in.swap(z);
    }
    return in;
}

std::vector<double> reconstruct(const NetworkParams& net, std::span<const double> x) {
    auto trace = forward(net, x);
    return std::move(trace.z.back());
}

Gradients Gradients::zeros_like(const NetworkParams& net) {
    Gradients g;
    for (const auto& l : net.layers) {
        g.weights.emplace_back(l.weights.size(), 0.0);
        g.bias.emplace_back(l.bias.size(), 0.0);
        g.delta.emplace_back(l.out, 0.0);
    }
    return g;
}

void Gradients::clear() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0);
    for (auto& d : delta) std::fill(d.begin(), d.end(), 0.0);
}

double loss_value(Loss loss, std::span<const double> r, std::span<const double> t) {
    if (r.size() != t.size()) throw std::invalid_argument("loss: shape mismatch");
    double e = 0.0;
    if (loss == Loss::binary_cross_entropy) {
        constexpr double eps = 1e-12;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (!(t[j] >= 0.0 && t[j] <= 1.0)) throw std::invalid_argument("cross-entropy targets must lie in [0, 1]");
            const double p = std::clamp(r[j], eps, 1.0 - eps);
            e -= t[j] * std::log(p) + (1.0 - t[j]) * std::log(1.0 - p);
        }
    } else {
        for (std::size_t j = 0; j < r.size(); ++j) e += 0.5 * (r[j] - t[j]) * (r[j] - t[j]);
    }
    return e;
}

void backward_accumulate(const NetworkParams& net, const ForwardTrace& trace, std::span<const double> target,
                         Loss loss, Gradients& acc) {
    const std::size_t n = net.layers.size();
    if (trace.a.size() != n || trace.z.size() != n + 1 || acc.weights.size() != n) {
        throw std::invalid_argument("backward: trace or gradient buffers do not match the network");
    }
    if (target.size() != net.output_dim()) throw std::invalid_argument("backward: target shape mismatch");
    const auto& k = kernels::active();

    {
        const auto& out_layer = net.layers.back();
        const auto& r = trace.z[n];
        const auto& a = trace.a[n - 1];
        auto& delta = acc.delta[n - 1];
        if (loss == Loss::binary_cross_entropy) {
            if (out_layer.activation != Activation::logistic) {
                throw std::invalid_argument("cross-entropy loss needs a logistic output layer");
            }
            for (std::size_t j = 0; j < r.size(); ++j) {
                if (!(target[j] >= 0.0 && target[j] <= 1.0)) {
                    throw std::invalid_argument("cross-entropy targets must lie in [0, 1]");
                }
                delta[j] = r[j] - target[j];
            }
        } else {
            for (std::size_t j = 0; j < r.size(); ++j) {
                delta[j] = (r[j] - target[j]) * activation_slope(out_layer.activation, a[j], r[j]);
            }
        }
    }

    for (std::size_t layer_index = n; layer_index-- > 0;) {
        const auto& layer = net.layers[layer_index];
        const auto& z_in = trace.z[layer_index];
        const auto& delta = acc.delta[layer_index];
        auto& dw = acc.weights[layer_index];
        auto& db = acc.bias[layer_index];
        for (std::size_t j = 0; j < layer.out; ++j) db[j] += delta[j];
        for (std::size_t i = 0; i < layer.in; ++i) {
            if (z_in[i] != 0.0) k.axpy(z_in[i], delta.data(), dw.data() + i * layer.out, layer.out);
        }
        if (layer_index == 0) break;
        const auto& prev = net.layers[layer_index - 1];
        const auto& a_prev = trace.a[layer_index - 1];
        auto& delta_prev = acc.delta[layer_index - 1];
        for (std::size_t i = 0; i < layer.in; ++i) {
            const double slope = activation_slope(prev.activation, a_prev[i], z_in[i]);
            delta_prev[i] = slope == 0.0 ? 0.0 : slope * k.dot(layer.weights.data() + i * layer.out, delta.data(), layer.out);
        }
    }
}

Gradients backward(const NetworkParams& net, const ForwardTrace& trace, std::span<const double> target, Loss loss) {
    auto g = Gradients::zeros_like(net);
    backward_accumulate(net, trace, target, loss, g);
    return g;
}

TrainResult train(NetworkParams net, std::size_t rows, const RowSource& source, const TrainConfig& cfg) {
    if (cfg.batch_size == 0) throw std::invalid_argument("train: batch_size must be at least 1");
    if (!(cfg.noise_sigma >= 0.0)) throw std::invalid_argument("train: noise_sigma must be non-negative");
    net.validate();
    TrainResult result;
    if (cfg.epochs == 0) {
        result.net = std::move(net);
        return result;
    }
    if (rows == 0) throw std::invalid_argument("train: empty training set");

    const auto& k = kernels::active();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    auto grads = Gradients::zeros_like(net);
    auto grad_sq = Gradients::zeros_like(net);
    auto step_sq = Gradients::zeros_like(net);
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> clean(net.input_dim()), noisy(net.input_dim());
    ForwardTrace trace;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < rows; start += cfg.batch_size) {
            const std::size_t stop = std::min(rows, start + cfg.batch_size);
            grads.clear();
            for (std::size_t b = start; b < stop; ++b) {
                source(order[b], clean);
                for (std::size_t i = 0; i < clean.size(); ++i) {
                    const double v = cfg.noise_sigma > 0.0 ? clean[i] + cfg.noise_sigma * noise(rng) : clean[i];
                    noisy[i] = std::clamp(v, 0.0, 1.0);
                }
                forward(net, noisy, trace);
                epoch_loss += loss_value(cfg.loss, trace.reconstruction(), clean);
                backward_accumulate(net, trace, clean, cfg.loss, grads);
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                auto& layer = net.layers[l];
                for (auto& g : grads.weights[l]) g *= inv;
                for (auto& g : grads.bias[l]) g *= inv;
                k.adadelta_update(layer.weights.data(), grads.weights[l].data(), grad_sq.weights[l].data(),
                                  step_sq.weights[l].data(), layer.weights.size(), cfg.rho, cfg.epsilon,
                                  cfg.learning_rate);
                k.adadelta_update(layer.bias.data(), grads.bias[l].data(), grad_sq.bias[l].data(),
                                  step_sq.bias[l].data(), layer.bias.size(), cfg.rho, cfg.epsilon, cfg.learning_rate);
            }
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(rows));
    }
    result.net = std::move(net);
    return result;
}

TrainResult train(NetworkParams net, std::span<const std::vector<double>> data, const TrainConfig& cfg) {
    for (const auto& row : data) {
        if (row.size() != net.input_dim()) throw std::invalid_argument("train: row dimension mismatch");
    }
    return train(std::move(net), data.size(),
                 [&](std::size_t i, std::span<double> out) { std::copy(data[i].begin(), data[i].end(), out.begin()); },
                 cfg);
}

TrainResult train(NetworkParams net, std::span<const SparseVector> data, const ScalingStats& scaling,
                  const TrainConfig& cfg) {
    for (const auto& row : data) {
        if (row.dim() != net.input_dim()) throw std::invalid_argument("train: row dimension mismatch");
    }
    return train(std::move(net), data.size(),
                 [&](std::size_t i, std::span<double> out) { scale_for_network(data[i], scaling, out); }, cfg);
}

void write_network(io::ByteWriter& out, const NetworkParams& net) {
    net.validate();
    out.u64(net.layers.size());
    out.u64(net.code_layer);
    for (const auto& l : net.layers) {
        out.u32(l.in);
        out.u32(l.out);
        out.u8(static_cast<std::uint8_t>(l.activation));
        out.f64s(l.weights);
        out.f64s(l.bias);
    }
}

NetworkParams read_network(io::ByteReader& in) {
    NetworkParams net;
    const auto n = in.u64();
    net.code_layer = in.u64();
    for (std::uint64_t k = 0; k < n; ++k) {
        Layer l;
        l.in = in.u32();
        l.out = in.u32();
        const auto act = in.u8();
        if (act > 1) throw std::runtime_error("unknown activation tag " + std::to_string(act));
        l.activation = static_cast<Activation>(act);
        l.weights = in.f64s();
        l.bias = in.f64s();
        net.layers.push_back(std::move(l));
    }
    net.validate();
    return net;
}

void save_network(const std::filesystem::path& path, const NetworkParams& net) {
    io::ByteWriter w;
    write_network(w, net);
    io::save_artifact(path, io::ArtifactKind::network, w);
}

NetworkParams load_network(const std::filesystem::path& path) {
    const auto payload = io::load_artifact(path, io::ArtifactKind::network);
    io::ByteReader r(payload);
    auto net = read_network(r);
    r.expect_end();
    return net;
}

std::string network_to_json(const NetworkParams& net) {
    nlohmann::json j;
    j["dims"] = net.dims();
    j["code_layer"] = net.code_layer;
    j["layers"] = nlohmann::json::array();
    for (const auto& l : net.layers) {
        j["layers"].push_back({{"in", l.in},
                               {"out", l.out},
                               {"activation", to_string(l.activation)},
                               {"weights", l.weights},
                               {"bias", l.bias}});
    }
    return j.dump(2);
}

}  // namespace semhash
