#include "semhash/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "semhash/kernels.hpp"

namespace semhash {
namespace {

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

void check_shape(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string("rbm: ") + what + " has size " + std::to_string(got) + ", expected " +
                                    std::to_string(want));
    }
}

void hidden_probs_into(const RbmParams& rbm, std::span<const double> v, std::span<double> out) {
    const auto& k = kernels::active();
    std::copy(rbm.hidden_bias.begin(), rbm.hidden_bias.end(), out.begin());
    for (std::size_t i = 0; i < rbm.n_visible; ++i) {
        if (v[i] != 0.0) k.axpy(v[i], rbm.weights.data() + i * rbm.n_hidden, out.data(), rbm.n_hidden);
    }
    for (auto& p : out) p = sigmoid(p);
}

void visible_probs_into(const RbmParams& rbm, std::span<const double> h, std::span<double> out) {
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < rbm.n_visible; ++i) {
        out[i] = sigmoid(rbm.visible_bias[i] + k.dot(rbm.weights.data() + i * rbm.n_hidden, h.data(), rbm.n_hidden));
    }
}

}  // namespace

void RbmParams::validate() const {
    if (weights.size() != std::size_t{n_visible} * n_hidden || visible_bias.size() != n_visible ||
        hidden_bias.size() != n_hidden) {
        throw std::invalid_argument("rbm: parameter shapes inconsistent");
    }
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(weights) || !finite(visible_bias) || !finite(hidden_bias)) {
        throw std::invalid_argument("rbm: non-finite parameter");
    }
}

RbmParams make_rbm(std::uint32_t n_visible, std::uint32_t n_hidden) {
    if (n_visible == 0 || n_hidden == 0) throw std::invalid_argument("rbm: unit counts must be positive");
    RbmParams rbm;
    rbm.n_visible = n_visible;
    rbm.n_hidden = n_hidden;
    rbm.weights.assign(std::size_t{n_visible} * n_hidden, 0.0);
    rbm.visible_bias.assign(n_visible, 0.0);
    rbm.hidden_bias.assign(n_hidden, 0.0);
    return rbm;
}

RbmParams init_rbm(std::uint32_t n_visible, std::uint32_t n_hidden, std::uint64_t seed) {
    auto rbm = make_rbm(n_visible, n_hidden);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 0.01);
    for (auto& w : rbm.weights) w = dist(rng);
    return rbm;
}

double energy(const RbmParams& rbm, std::span<const double> v, std::span<const double> h) {
    check_shape(v.size(), rbm.n_visible, "visible vector");
    check_shape(h.size(), rbm.n_hidden, "hidden vector");
    double neg = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) neg += rbm.visible_bias[i] * v[i];
    for (std::size_t j = 0; j < h.size(); ++j) neg += rbm.hidden_bias[j] * h[j];
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) continue;
        for (std::size_t j = 0; j < h.size(); ++j) neg += v[i] * h[j] * rbm.w(i, j);
    }
    return -neg;
}

double partition_function(const RbmParams& rbm) {
    rbm.validate();
    const std::uint32_t units = rbm.n_visible + rbm.n_hidden;
    if (units > kMaxEnumerableUnits) {
        throw std::invalid_argument("partition_function: " + std::to_string(units) + " units exceed the enumeration cap");
    }
    std::vector<double> v(rbm.n_visible), h(rbm.n_hidden);
    double z = 0.0;
    for (std::uint64_t vbits = 0; vbits < (std::uint64_t{1} << rbm.n_visible); ++vbits) {
        for (std::uint32_t i = 0; i < rbm.n_visible; ++i) v[i] = static_cast<double>((vbits >> i) & 1U);
        for (std::uint64_t hbits = 0; hbits < (std::uint64_t{1} << rbm.n_hidden); ++hbits) {
            for (std::uint32_t j = 0; j < rbm.n_hidden; ++j) h[j] = static_cast<double>((hbits >> j) & 1U);
            z += std::exp(-energy(rbm, v, h));
        }
    }
    return z;
}

std::vector<double> hidden_probs(const RbmParams& rbm, std::span<const double> v) {
    check_shape(v.size(), rbm.n_visible, "visible vector");
    std::vector<double> out(rbm.n_hidden);
    hidden_probs_into(rbm, v, out);
    return out;
}

std::vector<double> visible_probs(const RbmParams& rbm, std::span<const double> h) {
    check_shape(h.size(), rbm.n_hidden, "hidden vector");
    std::vector<double> out(rbm.n_visible);
    visible_probs_into(rbm, h, out);
    return out;
}

RbmParams cd1_step(const RbmParams& rbm, std::span<const std::vector<double>> batch, double learning_rate,
                   std::mt19937_64& rng) {
    if (batch.empty()) throw std::invalid_argument("cd1_step: empty batch");
    rbm.validate();
    const auto& k = kernels::active();
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    std::vector<double> dw(rbm.weights.size(), 0.0), da(rbm.n_visible, 0.0), db(rbm.n_hidden, 0.0);
    std::vector<double> ph(rbm.n_hidden), hs(rbm.n_hidden), pv(rbm.n_visible), vs(rbm.n_visible),
        ph_model(rbm.n_hidden);

    for (const auto& v : batch) {
        check_shape(v.size(), rbm.n_visible, "visible vector");
        hidden_probs_into(rbm, v, ph);
        for (std::size_t j = 0; j < ph.size(); ++j) hs[j] = uniform(rng) < ph[j] ? 1.0 : 0.0;
        visible_probs_into(rbm, hs, pv);
        for (std::size_t i = 0; i < pv.size(); ++i) vs[i] = uniform(rng) < pv[i] ? 1.0 : 0.0;
        hidden_probs_into(rbm, vs, ph_model);

        for (std::size_t i = 0; i < rbm.n_visible; ++i) {
            double* row = dw.data() + i * rbm.n_hidden;
            if (v[i] != 0.0) k.axpy(v[i], hs.data(), row, rbm.n_hidden);
            if (vs[i] != 0.0) k.axpy(-vs[i], ph_model.data(), row, rbm.n_hidden);
            da[i] += v[i] - vs[i];
        }
        for (std::size_t j = 0; j < rbm.n_hidden; ++j) db[j] += hs[j] - ph_model[j];
    }

    const double scale = learning_rate / static_cast<double>(batch.size());
    RbmParams next = rbm;
    for (std::size_t p = 0; p < dw.size(); ++p) next.weights[p] += scale * dw[p];
    for (std::size_t i = 0; i < da.size(); ++i) next.visible_bias[i] += scale * da[i];
    for (std::size_t j = 0; j < db.size(); ++j) next.hidden_bias[j] += scale * db[j];
    return next;
}

double reconstruction_error(const RbmParams& rbm, std::span<const std::vector<double>> data) {
    if (data.empty()) return 0.0;
    double total = 0.0;
    for (const auto& v : data) {
        const auto recon = visible_probs(rbm, hidden_probs(rbm, v));
        for (std::size_t i = 0; i < v.size(); ++i) total += (v[i] - recon[i]) * (v[i] - recon[i]);
    }
    return total / static_cast<double>(data.size());
}

RbmParams train_rbm(RbmParams rbm, std::span<const std::vector<double>> data, const RbmTrainConfig& cfg) {
    if (cfg.epochs == 0) return rbm;
    if (data.empty()) throw std::invalid_argument("train_rbm: empty data");
    if (cfg.batch_size == 0) throw std::invalid_argument("train_rbm: batch_size must be at least 1");
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::vector<double>> batch;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            batch.clear();
            for (std::size_t b = start; b < stop; ++b) batch.push_back(data[order[b]]);
            rbm = cd1_step(rbm, batch, cfg.learning_rate, rng);
        }
    }
    return rbm;
}

std::vector<RbmParams> pretrain_stack(std::span<const std::uint32_t> layer_dims,
                                      std::span<const std::vector<double>> data, const RbmTrainConfig& cfg) {
    if (layer_dims.size() < 2) throw std::invalid_argument("pretrain_stack: need at least two layer sizes");
    std::vector<RbmParams> stack;
    std::vector<std::vector<double>> layer_input(data.begin(), data.end());
    for (std::size_t k = 0; k + 1 < layer_dims.size(); ++k) {
        RbmTrainConfig layer_cfg = cfg;
        layer_cfg.seed = cfg.seed + k;
        auto rbm = train_rbm(init_rbm(layer_dims[k], layer_dims[k + 1], layer_cfg.seed), layer_input, layer_cfg);
        if (k + 2 < layer_dims.size()) {
            for (auto& row : layer_input) row = hidden_probs(rbm, row);
        }
        stack.push_back(std::move(rbm));
    }
    return stack;
}

NetworkParams unroll(std::span<const RbmParams> stack) {
    if (stack.empty()) throw std::invalid_argument("unroll: empty stack");
    for (std::size_t k = 0; k < stack.size(); ++k) {
        stack[k].validate();
        if (k > 0 && stack[k].n_visible != stack[k - 1].n_hidden) {
            throw std::invalid_argument("unroll: stack layer " + std::to_string(k) + " does not chain");
        }
    }
    NetworkParams net;
    for (const auto& rbm : stack) {
        Layer l;
        l.in = rbm.n_visible;
        l.out = rbm.n_hidden;
        l.activation = Activation::logistic;
        l.weights = rbm.weights;
        l.bias = rbm.hidden_bias;
        net.layers.push_back(std::move(l));
    }
    net.code_layer = stack.size() - 1;
    for (std::size_t k = stack.size(); k-- > 0;) {
        const auto& rbm = stack[k];
        Layer l;
        l.in = rbm.n_hidden;
        l.out = rbm.n_visible;
        l.activation = Activation::logistic;
        l.weights.resize(rbm.weights.size());
        for (std::size_t i = 0; i < rbm.n_visible; ++i)
            for (std::size_t j = 0; j < rbm.n_hidden; ++j) l.weights[j * rbm.n_visible + i] = rbm.w(i, j);
        l.bias = rbm.visible_bias;
        net.layers.push_back(std::move(l));
    }
    net.validate();
    return net;
}

void save_rbm_stack(const std::filesystem::path& path, std::span<const RbmParams> stack) {
    io::ByteWriter w;
    w.u64(stack.size());
    for (const auto& rbm : stack) {
        rbm.validate();
        w.u32(rbm.n_visible);
        w.u32(rbm.n_hidden);
        w.f64s(rbm.weights);
        w.f64s(rbm.visible_bias);
        w.f64s(rbm.hidden_bias);
    }
    io::save_artifact(path, io::ArtifactKind::rbm_stack, w);
}

std::vector<RbmParams> load_rbm_stack(const std::filesystem::path& path) {
    const auto payload = io::load_artifact(path, io::ArtifactKind::rbm_stack);
    io::ByteReader r(payload);
    std::vector<RbmParams> stack(r.u64());
    for (auto& rbm : stack) {
        rbm.n_visible = r.u32();
        rbm.n_hidden = r.u32();
        rbm.weights = r.f64s();
        rbm.visible_bias = r.f64s();
        rbm.hidden_bias = r.f64s();
        rbm.validate();
    }
    r.expect_end();
    return stack;
}

}  // namespace semhash
