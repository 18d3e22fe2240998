#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dip1d/generator.hpp"
#include "testing_util.hpp"

using namespace dip1d;
using dip1d::testing::finite_diff;
using dip1d::testing::random_vector;
using dip1d::testing::rel_err;

TEST_CASE("default_spec canonical architectures") {
    const GeneratorSpec big = default_spec(16384, 64);
    CHECK(big.num_blocks == 10);
    CHECK(big.latent_length == 16);
    CHECK(big.latent_channels == 32);
    CHECK(big.kernel_size == 3);
    CHECK(big.filters_per_layer == 64);
    CHECK(big.leaky_slope == 0.2);
    for (int f : big.upsample_factors) CHECK(f == 2);

    const GeneratorSpec sensor = default_spec(1024, 64);
    CHECK(sensor.num_blocks == 6);
    CHECK(sensor.latent_length == 16);

    CHECK_THROWS_AS(default_spec(1000, 64), std::invalid_argument);
}

TEST_CASE("init_generator is deterministic in the seed") {
    const GeneratorSpec spec = default_spec(256, 8);
    const GeneratorNet a = init_generator(spec, 42);
    const GeneratorNet b = init_generator(spec, 42);
    for (size_t i = 0; i < a.kernels.size(); ++i) CHECK(a.kernels[i].v == b.kernels[i].v);
    CHECK(a.latent.v == b.latent.v);
    const GeneratorNet c = init_generator(spec, 43);
    CHECK(a.kernels[0].v != c.kernels[0].v);
    CHECK(a.latent.v != c.latent.v);
}

TEST_CASE("init_generator scales kernels by fan-in") {
    GeneratorSpec spec = default_spec(1024, 64);
    const GeneratorNet net = init_generator(spec, 7);
    // a hidden-layer kernel block is 64 x (64*3)
    const Tensor& k = net.kernels[1];
    REQUIRE(k.channels == 64);
    REQUIRE(k.length == 192);
    double mean = 0.0, var = 0.0;
    for (double w : k.v) mean += w;
    mean /= k.v.size();
    for (double w : k.v) var += (w - mean) * (w - mean);
    var /= k.v.size();
    const double want = std::sqrt(2.0 / 192.0);
    CHECK(std::abs(std::sqrt(var) - want) < 0.2 * want);
    for (const Tensor& b : net.biases)
        for (double v : b.v) CHECK(v == 0.0);
    for (double z : net.latent.v) {
        CHECK(z >= 0.0);
        CHECK(z <= 0.1);
    }
}

TEST_CASE("forward output shape and zero-weight behavior") {
    for (int n : {64, 256, 1024, 16384}) {
        const GeneratorSpec spec = default_spec(n, 8);
        const GeneratorNet net = init_generator(spec, 1);
        const std::vector<double> out = generator_eval(net);
        CHECK(static_cast<int>(out.size()) == n);
        for (double v : out) CHECK(std::isfinite(v));
    }

    GeneratorNet zero = init_generator(default_spec(1024, 8), 2);
    for (Tensor& k : zero.kernels)
        for (double& w : k.v) w = 0.0;
    for (double v : generator_eval(zero)) CHECK(v == 0.0);
}

TEST_CASE("forward is deterministic and keeps the latent fixed") {
    const GeneratorNet net = init_generator(default_spec(256, 8), 5);
    const std::vector<double> latent_before = net.latent.v;
    const auto a = generator_eval(net);
    const auto b = generator_eval(net);
    CHECK(a == b);
    CHECK(net.latent.v == latent_before);
}

TEST_CASE("loss gradients through the full forward match finite differences") {
    const GeneratorSpec spec = default_spec(64, 8);
    GeneratorNet net = init_generator(spec, 9);
    const auto target = random_vector(64, 10);

    Tape tape;
    std::vector<Tape::NodeId> params;
    const auto out = generator_forward(net, tape, &params);
    tape.backward(tape.mse_loss(out, target));

    // probe 5 spread-out weights of the first hidden kernel
    Rng pick(77);
    for (int probe = 0; probe < 5; ++probe) {
        const size_t layer = pick.next_below(net.kernels.size());
        const size_t idx = pick.next_below(net.kernels[layer].v.size());
        const double analytic = tape.grad(params[2 * layer]).v[idx];
        const auto loss_at = [&](double w) {
            GeneratorNet probe_net = net;
            probe_net.kernels[layer].v[idx] = w;
            Tape t;
            const auto o = generator_forward(probe_net, t);
            return t.scalar(t.mse_loss(o, target));
        };
        const double h = 1e-5;
        const double w0 = net.kernels[layer].v[idx];
        const double fd = (loss_at(w0 + h) - loss_at(w0 - h)) / (2 * h);
        CHECK(rel_err(analytic, fd) < 1e-3);
    }
}
