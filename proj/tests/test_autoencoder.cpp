#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "semhash/autoencoder.hpp"
#include "test_util.hpp"

using namespace semhash;

namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

std::vector<double> uniform(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

NetworkParams zero_net(const std::vector<std::uint32_t>& dims) {
    auto net = init_network(dims, 1);
    for (auto& l : net.layers) std::fill(l.weights.begin(), l.weights.end(), 0.0);
    return net;
}

}  // namespace

TEST_CASE("default structure") {
    const auto dims = default_dims(10000);
    CHECK(dims == std::vector<std::uint32_t>{10000, 500, 500, 20, 500, 500, 10000});
    CHECK(bottleneck_index(dims) == 3);
    const auto acts = default_activations(dims);
    CHECK(acts == std::vector<Activation>{Activation::rectifier, Activation::rectifier, Activation::logistic,
                                          Activation::rectifier, Activation::rectifier, Activation::logistic});
    const auto net = init_network(std::vector<std::uint32_t>{30, 10, 4, 10, 30}, 0);
    CHECK(net.code_layer == 1);
    CHECK(net.code_width() == 4);
    CHECK(net.parameter_count() == 30 * 10 + 10 + 10 * 4 + 4 + 4 * 10 + 10 + 10 * 30 + 30);
}

TEST_CASE("init_network") {
    const std::vector<std::uint32_t> dims{4, 2, 4};
    CHECK(init_network(dims, 7) == init_network(dims, 7));
    CHECK_FALSE(init_network(dims, 7) == init_network(dims, 8));
    for (const auto& l : init_network(dims, 7).layers)
        for (double b : l.bias) CHECK(b == 0.0);
    CHECK_THROWS_AS(init_network(std::vector<std::uint32_t>{4, 0, 4}, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_network(std::vector<std::uint32_t>{4, 4}, 1), std::invalid_argument);

    // fan_in = 100, 100 x 100 = 10^4 draws
    const auto big = init_network(std::vector<std::uint32_t>{100, 100, 100}, 3);
    const auto& w = big.layers[0].weights;
    double mean = 0.0, var = 0.0;
    for (double x : w) mean += x;
    mean /= static_cast<double>(w.size());
    for (double x : w) var += (x - mean) * (x - mean);
    var /= static_cast<double>(w.size() - 1);
    CHECK(std::abs(mean) < 0.01);
    CHECK(var == doctest::Approx(0.01).epsilon(0.2));
}

TEST_CASE("forward pass examples") {
    const std::vector<double> x{0.2, 0.9, 0.0};
    const auto zero = zero_net({3, 2, 3});
    for (double r : reconstruct(zero, x)) CHECK(r == 0.5);
    for (double c : encode(zero, x)) CHECK(c == 0.5);

    auto tiny = zero_net({1, 1, 1});
    tiny.layers[0].weights = {1.0};
    tiny.layers[1].weights = {1.0};
    const std::vector<double> in{0.3};
    CHECK(reconstruct(tiny, in)[0] == doctest::Approx(sigmoid(sigmoid(0.3))).epsilon(1e-15));

    auto relu = zero_net({2, 3, 2, 3, 2});
    std::fill(relu.layers[0].weights.begin(), relu.layers[0].weights.end(), -1.0);
    const auto trace = forward(relu, std::vector<double>{0.5, 0.5});
    for (double z : trace.z[1]) CHECK(z == 0.0);

    const std::vector<double> bad{NAN, 0.0, 0.0};
    CHECK_THROWS_AS(forward(zero, bad), std::invalid_argument);
    CHECK_THROWS_AS(forward(zero, std::vector<double>{0.1}), std::invalid_argument);
}

TEST_CASE("encode is the bottleneck of forward and ignores the decoder") {
    std::mt19937_64 rng(2);
    auto net = init_network(std::vector<std::uint32_t>{12, 8, 5, 8, 12}, 4);
    const auto x = uniform(12, rng);
    const auto code = encode(net, x);
    const auto trace = forward(net, x);
    CHECK(code == trace.z[net.code_layer + 1]);
    CHECK(encode(net, x) == code);
    for (double c : code) CHECK((c > 0.0 && c < 1.0));
    for (std::size_t l = net.code_layer + 1; l < net.layers.size(); ++l) {
        for (auto& w : net.layers[l].weights) w = 3.0 * w + 1.0;
        for (auto& b : net.layers[l].bias) b = -2.0;
    }
    CHECK(encode(net, x) == code);
}

TEST_CASE("loss values") {
    const std::vector<double> r{0.25, 0.75}, t{0.0, 1.0};
    CHECK(loss_value(Loss::squared_error, r, t) == doctest::Approx(0.0625));
    CHECK(loss_value(Loss::binary_cross_entropy, r, t) == doctest::Approx(-2.0 * std::log(0.75)));
    CHECK(loss_value(Loss::binary_cross_entropy, r, r) >= 0.0);
    CHECK_THROWS_AS(loss_value(Loss::binary_cross_entropy, r, std::vector<double>{1.5, 0.0}), std::invalid_argument);
    CHECK(parse_loss("bce") == Loss::binary_cross_entropy);
    CHECK(parse_loss("squared_error") == Loss::squared_error);
    CHECK_THROWS(parse_loss("hinge"));
}

TEST_CASE("gradients match central finite differences") {
    std::mt19937_64 rng(21);
    for (auto loss : {Loss::binary_cross_entropy, Loss::squared_error}) {
        for (int sample = 0; sample < 3; ++sample) {
            CAPTURE(to_string(loss));
            const auto net = init_network(std::vector<std::uint32_t>{30, 10, 4, 10, 30}, 100 + sample);
            const auto x = uniform(30, rng), t = uniform(30, rng);
            const auto check = oracle::finite_difference(net, x, t, loss);
            CHECK(check.checked == net.parameter_count());
            CHECK(check.failures == 0);
        }
    }
}

TEST_CASE("perfect reconstruction gives zero gradient") {
    std::mt19937_64 rng(8);
    const auto net = init_network(std::vector<std::uint32_t>{6, 4, 2, 4, 6}, 3);
    const auto x = uniform(6, rng);
    const auto trace = forward(net, x);
    const std::vector<double> target(trace.reconstruction().begin(), trace.reconstruction().end());
    const auto g = backward(net, trace, target);
    for (const auto& layer : g.weights)
        for (double v : layer) CHECK(v == 0.0);
}

TEST_CASE("dead rectifier units pass no gradient") {
    std::mt19937_64 rng(9);
    auto net = init_network(std::vector<std::uint32_t>{5, 4, 3, 4, 5}, 6);
    net.layers[0].bias[2] = -100.0;
    const auto x = uniform(5, rng), t = uniform(5, rng);
    const auto trace = forward(net, x);
    const auto g = backward(net, trace, t);
    CHECK(g.delta[0][2] == 0.0);
    for (std::size_t i = 0; i < 5; ++i) CHECK(g.weights[0][i * 4 + 2] == 0.0);
}

TEST_CASE("backward rejects bad inputs") {
    const auto net = init_network(std::vector<std::uint32_t>{3, 2, 3}, 1);
    const auto trace = forward(net, std::vector<double>{0.1, 0.2, 0.3});
    CHECK_THROWS_AS(backward(net, trace, std::vector<double>{0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(backward(net, trace, std::vector<double>{0.1, 0.2, 2.0}), std::invalid_argument);
}

TEST_CASE("training") {
    std::mt19937_64 rng(12);
    std::vector<std::vector<double>> data;
    for (int i = 0; i < 10; ++i) data.push_back(uniform(8, rng));
    const auto net = init_network(std::vector<std::uint32_t>{8, 6, 3, 6, 8}, 5);

    TrainConfig cfg;
    cfg.epochs = 0;
    auto none = train(net, data, cfg);
    CHECK(none.net == net);
    CHECK(none.epoch_loss.empty());

    cfg.epochs = 200;
    cfg.batch_size = 4;
    cfg.noise_sigma = 0.0;
    const auto fit = train(net, data, cfg);
    REQUIRE(fit.epoch_loss.size() == 200);
    CHECK(fit.epoch_loss.back() < fit.epoch_loss.front());

    cfg.noise_sigma = 0.3;
    cfg.seed = 99;
    cfg.epochs = 5;
    const auto a = train(net, data, cfg);
    const auto b = train(net, data, cfg);
    CHECK(a.epoch_loss == b.epoch_loss);
    CHECK(a.net == b.net);

    cfg.learning_rate = 0.0;
    CHECK(train(net, data, cfg).net == net);

    cfg.learning_rate = 1.0;
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train(net, data, cfg), std::invalid_argument);
    cfg.batch_size = 4;
    CHECK_THROWS_AS(train(net, std::vector<std::vector<double>>{}, cfg), std::invalid_argument);
}

TEST_CASE("network persistence") {
    TempDir dir;
    const auto net = init_network(std::vector<std::uint32_t>{7, 5, 3, 5, 7}, 13);
    save_network(dir / "n.bin", net);
    CHECK(load_network(dir / "n.bin") == net);
    const auto json = network_to_json(net);
    CHECK(json.find("\"code_layer\"") != std::string::npos);
    CHECK(json.find("logistic") != std::string::npos);
}
