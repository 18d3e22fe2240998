#include "dip1d/dct.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace dip1d {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey. inverse=true applies the
// conjugate transform without the 1/n factor.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Unnormalized DCT-II, S[k] = sum_j x[j] cos(pi k (2j+1) / (2n)),
// via the even/odd reordering of Makhoul: one size-n complex FFT.
std::vector<double> dct2_unnormalized_fft(const std::vector<double>& x) {
    const size_t n = x.size();
    std::vector<std::complex<double>> v(n);
    for (size_t j = 0; j < n / 2; ++j) {
        v[j] = x[2 * j];
        v[n - 1 - j] = x[2 * j + 1];
    }
    fft_pow2(v, false);
    std::vector<double> s(n);
    for (size_t k = 0; k < n; ++k) {
        const double ang = -kPi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
        s[k] = v[k].real() * std::cos(ang) - v[k].imag() * std::sin(ang);
    }
    return s;
}

// Inverse of the above: rebuild V[k] = e^{i pi k/(2n)} (S[k] - i S[n-k])
// (S[n] = 0), inverse FFT, undo the reordering.
std::vector<double> dct3_unnormalized_fft(const std::vector<double>& s) {
    const size_t n = s.size();
    std::vector<std::complex<double>> v(n);
    for (size_t k = 0; k < n; ++k) {
        const double sk = s[k];
        const double snk = (k == 0) ? 0.0 : s[n - k];
        const double ang = kPi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
        v[k] = std::complex<double>(sk, -snk) * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    fft_pow2(v, true);
    std::vector<double> x(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (size_t j = 0; j < n / 2; ++j) {
        x[2 * j] = v[j].real() * inv_n;
        x[2 * j + 1] = v[n - 1 - j].real() * inv_n;
    }
    return x;
}

}  // namespace

std::vector<double> dct_forward(const std::vector<double>& x) {
    const size_t n = x.size();
    if (n == 0) throw std::invalid_argument("dct_forward: empty input");
    if (n == 1) return x;
    std::vector<double> s;
    if (is_pow2(n)) {
        s = dct2_unnormalized_fft(x);
    } else {
        s.assign(n, 0.0);
        for (size_t k = 0; k < n; ++k) {
            double acc = 0.0;
            for (size_t j = 0; j < n; ++j)
                acc += x[j] * std::cos(kPi * static_cast<double>(k) * (2.0 * j + 1.0) / (2.0 * n));
            s[k] = acc;
        }
    }
    const double r0 = 1.0 / std::sqrt(static_cast<double>(n));
    const double r = std::sqrt(2.0 / static_cast<double>(n));
    s[0] *= r0;
    for (size_t k = 1; k < n; ++k) s[k] *= r;
    return s;
}

std::vector<double> dct_inverse(const std::vector<double>& c) {
    const size_t n = c.size();
    if (n == 0) throw std::invalid_argument("dct_inverse: empty input");
    if (n == 1) return c;
    // Rescale orthonormal coefficients to the unnormalized DCT-II of the
    // answer: x[j] = (1/n) s[0] + (2/n) sum_{k>=1} s[k] cos(pi k (2j+1)/(2n)).
    std::vector<double> s(n);
    s[0] = c[0] * std::sqrt(static_cast<double>(n));
    const double r = std::sqrt(static_cast<double>(n) / 2.0);
    for (size_t k = 1; k < n; ++k) s[k] = c[k] * r;
    if (is_pow2(n)) return dct3_unnormalized_fft(s);
    std::vector<double> x(n, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (size_t j = 0; j < n; ++j) {
        double acc = s[0];
        for (size_t k = 1; k < n; ++k)
            acc += 2.0 * s[k] * std::cos(kPi * static_cast<double>(k) * (2.0 * j + 1.0) / (2.0 * n));
        x[j] = acc * inv_n;
    }
    return x;
}

}  // namespace dip1d
