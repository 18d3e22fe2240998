#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dip1d/dct.hpp"
#include "testing_util.hpp"

using namespace dip1d;
using dip1d::testing::random_vector;

namespace {

// Direct orthonormal DCT-II by the defining cosine sum; the oracle for
// the FFT path.
std::vector<double> dct_direct(const std::vector<double>& x) {
    const size_t n = x.size();
    std::vector<double> out(n);
    for (size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (size_t j = 0; j < n; ++j)
            acc += x[j] * std::cos(std::numbers::pi * k * (2.0 * j + 1.0) / (2.0 * n));
        out[k] = acc * (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
    }
    return out;
}

double norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace

TEST_CASE("dct of length 1 is identity") {
    CHECK(dct_forward({3.5}) == std::vector<double>{3.5});
    CHECK(dct_inverse({3.5}) == std::vector<double>{3.5});
}

TEST_CASE("dct of a constant is DC only") {
    for (size_t n : {8, 12, 256}) {
        const std::vector<double> x(n, 2.5);
        const auto c = dct_forward(x);
        CHECK(c[0] == doctest::Approx(2.5 * std::sqrt(static_cast<double>(n))).epsilon(1e-12));
        for (size_t k = 1; k < n; ++k) CHECK(std::abs(c[k]) < 1e-10);
    }
}

TEST_CASE("fft path matches the direct cosine sum") {
    const auto x = random_vector(256, 7);
    const auto fast = dct_forward(x);
    const auto slow = dct_direct(x);
    for (size_t k = 0; k < x.size(); ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-10);
}

TEST_CASE("dct preserves the l2 norm") {
    for (size_t n : {64, 100, 1024}) {
        const auto x = random_vector(n, 17 + n);
        CHECK(std::abs(norm(dct_forward(x)) - norm(x)) < 1e-10);
    }
}

TEST_CASE("dct round trip") {
    for (size_t n : {2, 16, 100, 331, 4096}) {
        const auto x = random_vector(n, 23 + n);
        const auto back = dct_inverse(dct_forward(x));
        for (size_t i = 0; i < n; ++i) CHECK(std::abs(back[i] - x[i]) < 1e-10);
    }
}

TEST_CASE("inverse matches the direct transpose sum on non-pow2 lengths") {
    const auto c = random_vector(100, 29);
    // x = C^T c computed directly
    const size_t n = c.size();
    std::vector<double> want(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (size_t k = 0; k < n; ++k) {
            const double w = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
            acc += w * c[k] * std::cos(std::numbers::pi * k * (2.0 * j + 1.0) / (2.0 * n));
        }
        want[j] = acc;
    }
    const auto got = dct_inverse(c);
    for (size_t j = 0; j < n; ++j) CHECK(std::abs(got[j] - want[j]) < 1e-10);
}
