#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dip1d/tape.hpp"
#include "testing_util.hpp"

using namespace dip1d;
using dip1d::testing::finite_diff;
using dip1d::testing::random_vector;
using dip1d::testing::rel_err;

TEST_CASE("conv1d identity kernel") {
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 3, {1, 2, 3}));
    const auto w = tape.leaf(Tensor(1, 1, {1}));
    const auto b = tape.leaf(Tensor(1, 1, {0}));
    const auto y = tape.conv1d(x, w, b, 1, 1, 1, 0);
    CHECK(tape.value(y).v == std::vector<double>{1, 2, 3});
}

TEST_CASE("conv1d box filter with zero padding") {
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 3, {1, 1, 1}));
    const auto w = tape.leaf(Tensor(1, 3, {1, 1, 1}));
    const auto b = tape.leaf(Tensor(1, 1, {0}));
    const auto y = tape.conv1d(x, w, b, 1, 3, 1, 1);
    CHECK(tape.value(y).v == std::vector<double>{2, 3, 2});
}

TEST_CASE("conv1d rejects channel mismatch") {
    Tape tape;
    const auto x = tape.leaf(Tensor(2, 8, random_vector(16, 1)));
    const auto w = tape.leaf(Tensor(4, 3 * 3, random_vector(36, 2)));  // expects 3 input channels
    const auto b = tape.leaf(Tensor(4, 1));
    CHECK_THROWS_AS(tape.conv1d(x, w, b, 3, 3, 1, 1), std::invalid_argument);
}

TEST_CASE("conv1d bias and stride shapes") {
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 7, {1, 2, 3, 4, 5, 6, 7}));
    const auto w = tape.leaf(Tensor(1, 3, {1, 0, 0}));
    const auto b = tape.leaf(Tensor(1, 1, {10}));
    const auto y = tape.conv1d(x, w, b, 1, 3, 2, 0);
    // stride 2, k 3: outputs at inputs 0,2,4 -> 11,13,15
    CHECK(tape.value(y).v == std::vector<double>{11, 13, 15});
}

namespace {

// Loss of the conv example as a function of a chosen parameter block,
// rebuilt from scratch; the finite-difference oracle drives this.
double conv_loss(const std::vector<double>& xv, const std::vector<double>& wv,
                 const std::vector<double>& bv, const std::vector<double>& target) {
    Tape tape;
    const auto x = tape.leaf(Tensor(2, 16, xv));
    const auto w = tape.leaf(Tensor(4, 2 * 3, wv));
    const auto b = tape.leaf(Tensor(4, 1, bv));
    const auto y = tape.conv1d(x, w, b, 2, 3, 1, 1);
    return tape.scalar(tape.mse_loss(y, target));
}

}  // namespace

TEST_CASE("conv1d gradients match finite differences") {
    const auto xv = random_vector(32, 11);
    const auto wv = random_vector(24, 12);
    const auto bv = random_vector(4, 13);
    const auto target = random_vector(64, 14);

    Tape tape;
    const auto x = tape.leaf(Tensor(2, 16, xv));
    const auto w = tape.leaf(Tensor(4, 6, wv));
    const auto b = tape.leaf(Tensor(4, 1, bv));
    const auto y = tape.conv1d(x, w, b, 2, 3, 1, 1);
    const auto loss = tape.mse_loss(y, target);
    tape.backward(loss);

    const auto fd_w = finite_diff([&](const std::vector<double>& v) { return conv_loss(xv, v, bv, target); }, wv);
    for (size_t i = 0; i < fd_w.size(); ++i) CHECK(rel_err(tape.grad(w).v[i], fd_w[i]) < 1e-4);
    const auto fd_x = finite_diff([&](const std::vector<double>& v) { return conv_loss(v, wv, bv, target); }, xv);
    for (size_t i = 0; i < fd_x.size(); ++i) CHECK(rel_err(tape.grad(x).v[i], fd_x[i]) < 1e-4);
    const auto fd_b = finite_diff([&](const std::vector<double>& v) { return conv_loss(xv, wv, v, target); }, bv);
    for (size_t i = 0; i < fd_b.size(); ++i) CHECK(rel_err(tape.grad(b).v[i], fd_b[i]) < 1e-4);
}

TEST_CASE("conv1d strided gradients match finite differences") {
    const auto xv = random_vector(15, 21);
    const auto wv = random_vector(6, 22);
    const auto target = random_vector(16, 23);  // 2 channels x L_out 8
    const auto loss_fn = [&](const std::vector<double>& wvv) {
        Tape tape;
        const auto x = tape.leaf(Tensor(1, 15, xv));
        const auto w = tape.leaf(Tensor(2, 3, wvv));
        const auto b = tape.leaf(Tensor(2, 1, {0.1, -0.2}));
        const auto y = tape.conv1d(x, w, b, 1, 3, 2, 1);
        return tape.scalar(tape.mse_loss(y, target));
    };
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 15, xv));
    const auto w = tape.leaf(Tensor(2, 3, wv));
    const auto b = tape.leaf(Tensor(2, 1, {0.1, -0.2}));
    const auto y = tape.conv1d(x, w, b, 1, 3, 2, 1);
    tape.backward(tape.mse_loss(y, target));
    const auto fd = finite_diff(loss_fn, wv);
    for (size_t i = 0; i < fd.size(); ++i) CHECK(rel_err(tape.grad(w).v[i], fd[i]) < 1e-4);
}

TEST_CASE("upsample_nearest repeats samples") {
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 2, {1, 2}));
    CHECK(tape.value(tape.upsample_nearest(x, 2)).v == std::vector<double>{1, 1, 2, 2});
    CHECK(tape.value(tape.upsample_nearest(x, 1)).v == std::vector<double>{1, 2});
    CHECK_THROWS_AS(tape.upsample_nearest(x, 0), std::invalid_argument);
}

TEST_CASE("upsample_nearest backward sums repetition groups") {
    // loss = sum(output), arranged via an mse target half a unit below the
    // output so every output grad is exactly 1
    const std::vector<double> xv = {0.3, -0.7, 1.1};
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 3, xv));
    const auto up = tape.upsample_nearest(x, 3);
    std::vector<double> target = tape.value(up).v;
    for (double& t : target) t -= 0.5;
    tape.backward(tape.mse_loss(up, target));
    // d/dy sum (y - (y0-1/2))^2 = 1 per element, so dx = factor
    for (double g : tape.grad(x).v) CHECK(g == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("leaky_relu values and slopes") {
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 3, {-1, 0, 2}));
    CHECK(tape.value(tape.leaky_relu(x, 0.1)).v == std::vector<double>{-0.1, 0, 2});
    const auto xr = tape.leaf(Tensor(1, 4, {-5, -0.2, 0.4, 7}));
    CHECK(tape.value(tape.leaky_relu(xr, 1.0)).v == tape.value(xr).v);
}

TEST_CASE("leaky_relu gradient matches finite differences away from 0") {
    auto xv = random_vector(32, 31);
    for (double& v : xv)
        if (std::abs(v) < 2e-3) v = 0.5;  // keep clear of the kink
    const auto target = random_vector(32, 32);
    const auto loss_fn = [&](const std::vector<double>& v) {
        Tape tape;
        const auto x = tape.leaf(Tensor(1, 32, v));
        return tape.scalar(tape.mse_loss(tape.leaky_relu(x, 0.2), target));
    };
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 32, xv));
    tape.backward(tape.mse_loss(tape.leaky_relu(x, 0.2), target));
    const auto fd = finite_diff(loss_fn, xv);
    for (size_t i = 0; i < fd.size(); ++i) CHECK(rel_err(tape.grad(x).v[i], fd[i]) < 1e-4);
}

TEST_CASE("mse_loss values") {
    Tape tape;
    const auto a = tape.leaf(Tensor(1, 2, {1, 0}));
    CHECK(tape.scalar(tape.mse_loss(a, {1, 0})) == 0.0);
    CHECK(tape.scalar(tape.mse_loss(a, {0, 0})) == 1.0);
    CHECK_THROWS_AS(tape.mse_loss(a, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("mse_loss is symmetric and nonnegative") {
    const auto xv = random_vector(32, 41);
    const auto yv = random_vector(32, 42);
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 32, xv));
    const auto y = tape.leaf(Tensor(1, 32, yv));
    const double xy = tape.scalar(tape.mse_loss(x, yv));
    const double yx = tape.scalar(tape.mse_loss(y, xv));
    CHECK(xy == doctest::Approx(yx).epsilon(1e-15));
    CHECK(xy > 0.0);
    CHECK(tape.scalar(tape.mse_loss(x, xv)) == 0.0);
}

TEST_CASE("mse_loss gradient matches finite differences") {
    const auto xv = random_vector(32, 51);
    const auto target = random_vector(32, 52);
    const auto loss_fn = [&](const std::vector<double>& v) {
        Tape tape;
        return tape.scalar(tape.mse_loss(tape.leaf(Tensor(1, 32, v)), target));
    };
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 32, xv));
    tape.backward(tape.mse_loss(x, target));
    const auto fd = finite_diff(loss_fn, xv);
    for (size_t i = 0; i < fd.size(); ++i) CHECK(rel_err(tape.grad(x).v[i], fd[i]) < 1e-6);
}

TEST_CASE("tv_loss values") {
    Tape tape;
    const auto c = tape.leaf(Tensor(1, 5, {3, 3, 3, 3, 3}));
    CHECK(tape.scalar(tape.tv_loss(c)) == 0.0);
    const auto x = tape.leaf(Tensor(1, 3, {0, 1, 0}));
    CHECK(tape.scalar(tape.tv_loss(x)) == 2.0);
    const auto one = tape.leaf(Tensor(1, 1, {4}));
    CHECK_THROWS_AS(tape.tv_loss(one), std::invalid_argument);
}

TEST_CASE("tv_loss homogeneity and shift invariance") {
    const auto xv = random_vector(64, 61);
    const auto tv_of = [](std::vector<double> v) {
        const int len = static_cast<int>(v.size());
        Tape tape;
        return tape.scalar(tape.tv_loss(tape.leaf(Tensor(1, len, std::move(v)))));
    };
    const double base = tv_of(xv);
    for (double a : {-2.5, 0.0, 0.75}) {
        std::vector<double> scaled = xv;
        for (double& v : scaled) v *= a;
        CHECK(tv_of(scaled) == doctest::Approx(std::abs(a) * base).epsilon(1e-12));
    }
    std::vector<double> shifted = xv;
    for (double& v : shifted) v += 17.25;
    CHECK(tv_of(shifted) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("tv_loss gradient matches finite differences off ties") {
    const auto xv = random_vector(64, 71);
    const auto loss_fn = [&](const std::vector<double>& v) {
        Tape tape;
        return tape.scalar(tape.tv_loss(tape.leaf(Tensor(1, 64, v))));
    };
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 64, xv));
    tape.backward(tape.tv_loss(x));
    const auto fd = finite_diff(loss_fn, xv);
    for (size_t i = 0; i < fd.size(); ++i) {
        // differences smaller than the fd step straddle the |.| kink
        const bool near_tie = (i > 0 && std::abs(xv[i] - xv[i - 1]) < 1e-3) ||
                              (i + 1 < xv.size() && std::abs(xv[i + 1] - xv[i]) < 1e-3);
        if (near_tie) continue;
        CHECK(rel_err(tape.grad(x).v[i], fd[i]) < 1e-4);
    }
}

TEST_CASE("backward on a single-node tape") {
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 1, {42.0}));
    tape.backward(x);
    CHECK(tape.grad(x).v[0] == 1.0);
}

TEST_CASE("backward rejects non-scalar loss") {
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 3, {1, 2, 3}));
    CHECK_THROWS_AS(tape.backward(x), std::invalid_argument);
}

TEST_CASE("composed conv-relu-mse gradients match finite differences") {
    const auto xv = random_vector(20, 81);
    const auto wv = random_vector(9, 82);
    const auto bv = random_vector(3, 83);
    const auto target = random_vector(60, 84);
    const auto loss_fn = [&](const std::vector<double>& wvv) {
        Tape tape;
        const auto x = tape.leaf(Tensor(1, 20, xv));
        const auto w = tape.leaf(Tensor(3, 3, wvv));
        const auto b = tape.leaf(Tensor(3, 1, bv));
        const auto y = tape.leaky_relu(tape.conv1d(x, w, b, 1, 3, 1, 1), 0.2);
        return tape.scalar(tape.mse_loss(y, target));
    };
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 20, xv));
    const auto w = tape.leaf(Tensor(3, 3, wv));
    const auto b = tape.leaf(Tensor(3, 1, bv));
    const auto y = tape.leaky_relu(tape.conv1d(x, w, b, 1, 3, 1, 1), 0.2);
    tape.backward(tape.mse_loss(y, target));
    const auto fd = finite_diff(loss_fn, wv);
    for (size_t i = 0; i < fd.size(); ++i) CHECK(rel_err(tape.grad(w).v[i], fd[i]) < 1e-4);
}

TEST_CASE("gradients accumulate across two consumers") {
    const auto xv = random_vector(16, 91);
    const auto target = random_vector(16, 92);
    const auto loss_fn = [&](const std::vector<double>& v) {
        Tape tape;
        const auto x = tape.leaf(Tensor(1, 16, v));
        const auto a = tape.leaky_relu(x, 0.3);
        const auto s = tape.add(a, tape.scale(a, 2.0));  // a consumed twice
        return tape.scalar(tape.mse_loss(s, target));
    };
    Tape tape;
    const auto x = tape.leaf(Tensor(1, 16, xv));
    const auto a = tape.leaky_relu(x, 0.3);
    const auto s = tape.add(a, tape.scale(a, 2.0));
    tape.backward(tape.mse_loss(s, target));
    const auto fd = finite_diff(loss_fn, xv);
    for (size_t i = 0; i < fd.size(); ++i) CHECK(rel_err(tape.grad(x).v[i], fd[i]) < 1e-4);
}

TEST_CASE("forward is deterministic and finite") {
    const auto xv = random_vector(64, 101);
    const auto wv = random_vector(4 * 2 * 3, 102);
    const auto run = [&]() {
        Tape tape;
        const auto x = tape.leaf(Tensor(2, 32, xv));
        const auto w = tape.leaf(Tensor(4, 6, wv));
        const auto b = tape.leaf(Tensor(4, 1));
        return tape.value(tape.leaky_relu(tape.conv1d(x, w, b, 2, 3, 1, 1), 0.2)).v;
    };
    const auto a = run();
    const auto b = run();
    CHECK(a == b);
    for (double v : a) CHECK(std::isfinite(v));
}
