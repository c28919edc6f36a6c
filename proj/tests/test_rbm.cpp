#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "semhash/rbm.hpp"
#include "test_util.hpp"

using namespace semhash;

TEST_CASE("energy") {
    auto rbm = make_rbm(1, 1);
    CHECK(energy(rbm, std::vector<double>{0.0}, std::vector<double>{0.0}) == 0.0);
    rbm.visible_bias = {0.5};
    rbm.hidden_bias = {-0.25};
    rbm.weights = {2.0};
    const std::vector<double> one{1.0};
    CHECK(energy(rbm, one, one) == doctest::Approx(-2.25));

    auto doubled = rbm;
    doubled.visible_bias[0] *= 2.0;
    CHECK(-energy(doubled, one, one) - -energy(rbm, one, one) == doctest::Approx(rbm.visible_bias[0]));
    CHECK_THROWS_AS(energy(rbm, std::vector<double>{1.0, 0.0}, one), std::invalid_argument);
}

TEST_CASE("partition function") {
    CHECK(partition_function(make_rbm(2, 1)) == doctest::Approx(8.0));
    auto rbm = make_rbm(1, 1);
    rbm.weights = {std::log(2.0)};
    CHECK(partition_function(rbm) == doctest::Approx(5.0));
    CHECK_THROWS_AS(partition_function(make_rbm(15, 6)), std::invalid_argument);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto r = oracle::random_rbm(3, 3, rng);
        const double z = partition_function(r);
        CHECK(z > 0.0);
        double total = 0.0;
        for (std::uint64_t vm = 0; vm < 8; ++vm)
            for (std::uint64_t hm = 0; hm < 8; ++hm)
                total += std::exp(-energy(r, oracle::bits_of(vm, 3), oracle::bits_of(hm, 3))) / z;
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("conditionals match brute-force enumeration") {
    for (double p : hidden_probs(make_rbm(3, 2), std::vector<double>{1, 0, 1})) CHECK(p == 0.5);
    for (double p : visible_probs(make_rbm(3, 2), std::vector<double>{1, 1})) CHECK(p == 0.5);

    std::mt19937_64 rng(6);
    for (std::uint32_t nv = 1; nv <= 5; ++nv) {
        for (std::uint32_t nh = 1; nv + nh <= 6; ++nh) {
            const auto rbm = oracle::random_rbm(nv, nh, rng);
            for (std::uint64_t vm = 0; vm < (1ULL << nv); ++vm) {
                const auto v = oracle::bits_of(vm, nv);
                const auto fast = hidden_probs(rbm, v);
                const auto slow = oracle::brute_hidden_given_visible(rbm, v);
                for (std::size_t j = 0; j < nh; ++j) CHECK(std::abs(fast[j] - slow[j]) < 1e-9);
            }
            for (std::uint64_t hm = 0; hm < (1ULL << nh); ++hm) {
                const auto h = oracle::bits_of(hm, nh);
                const auto fast = visible_probs(rbm, h);
                const auto slow = oracle::brute_visible_given_hidden(rbm, h);
                for (std::size_t i = 0; i < nv; ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-9);
            }
        }
    }
}

TEST_CASE("hidden probability is monotone in the hidden bias") {
    auto rbm = make_rbm(2, 1);
    rbm.weights = {0.3, -0.7};
    double last = 0.0;
    for (double b = -5.0; b <= 20.0; b += 1.0) {
        rbm.hidden_bias[0] = b;
        const double p = hidden_probs(rbm, std::vector<double>{1.0, 1.0})[0];
        CHECK(p > last);
        last = p;
    }
    CHECK(last > 0.999999);
}

TEST_CASE("cd1 step") {
    const auto data = oracle::bars_and_stripes();
    CHECK(data.size() == 30);
    const auto rbm = init_rbm(16, 8, 1);
    std::mt19937_64 r0(5);
    CHECK(cd1_step(rbm, data, 0.0, r0) == rbm);
    std::mt19937_64 r1(5), r2(5);
    const auto a = cd1_step(rbm, data, 0.1, r1);
    CHECK(cd1_step(rbm, data, 0.1, r2) == a);
    CHECK_FALSE(a == rbm);
    CHECK_THROWS_AS(cd1_step(rbm, std::vector<std::vector<double>>{}, 0.1, r0), std::invalid_argument);
}

TEST_CASE("cd1 learns bars and stripes") {
    const auto data = oracle::bars_and_stripes();
    auto rbm = init_rbm(16, 16, 3);
    const double before = reconstruction_error(rbm, data);
    std::mt19937_64 rng(7);
    for (int step = 0; step < 2000; ++step) rbm = cd1_step(rbm, data, 0.1, rng);
    const double after = reconstruction_error(rbm, data);
    CHECK(after <= 0.5 * before);
}

TEST_CASE("greedy stack and unrolling") {
    std::mt19937_64 rng(2);
    std::bernoulli_distribution coin(0.4);
    std::vector<std::vector<double>> data(20, std::vector<double>(8));
    for (auto& row : data)
        for (auto& x : row) x = coin(rng) ? 1.0 : 0.0;

    RbmTrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 5;
    cfg.seed = 11;
    const auto stack = pretrain_stack(std::vector<std::uint32_t>{8, 4, 2}, data, cfg);
    REQUIRE(stack.size() == 2);
    CHECK(stack[0].n_visible == 8);
    CHECK(stack[1].n_visible == 4);
    CHECK(stack[1].n_hidden == 2);
    CHECK(pretrain_stack(std::vector<std::uint32_t>{8, 4, 2}, data, cfg) == stack);

    const auto single = pretrain_stack(std::vector<std::uint32_t>{8, 4}, data, cfg);
    CHECK(single[0] == train_rbm(init_rbm(8, 4, cfg.seed), data, cfg));

    const auto net = unroll(stack);
    CHECK(net.dims() == std::vector<std::uint32_t>{8, 4, 2, 4, 8});
    CHECK(net.code_layer == 1);
    for (const auto& l : net.layers) CHECK(l.activation == Activation::logistic);
    for (std::size_t k = 0; k < stack.size(); ++k) {
        const auto& enc = net.layers[k];
        const auto& dec = net.layers[net.layers.size() - 1 - k];
        CHECK(enc.bias == stack[k].hidden_bias);
        CHECK(dec.bias == stack[k].visible_bias);
        for (std::size_t i = 0; i < enc.in; ++i)
            for (std::size_t j = 0; j < enc.out; ++j) {
                CHECK(enc.w(i, j) == stack[k].w(i, j));
                CHECK(dec.w(j, i) == stack[k].w(i, j));
            }
    }

    const std::vector<RbmParams> zeros{make_rbm(6, 4), make_rbm(4, 2)};
    const auto zero_net = unroll(zeros);
    CHECK(zero_net.dims() == std::vector<std::uint32_t>{6, 4, 2, 4, 6});
    for (double r : reconstruct(zero_net, std::vector<double>(6, 1.0))) CHECK(r == 0.5);
    CHECK_THROWS(unroll(std::vector<RbmParams>{}));

    TempDir dir;
    save_rbm_stack(dir / "s.bin", stack);
    CHECK(load_rbm_stack(dir / "s.bin") == stack);
}
