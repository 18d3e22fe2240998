#include "dip1d/measurement.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dip1d/dct.hpp"
#include "dip1d/rng.hpp"

namespace dip1d {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// m distinct indices from [0, n), uniform without replacement
// (partial Fisher-Yates), returned sorted.
std::vector<int> sample_indices(int n, int m, uint64_t seed) {
    Rng rng(seed);
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

MeasurementOperator make_mask_operator(int n, int m, uint64_t seed) {
    require(n >= 1, "make_mask_operator: n must be positive");
    require(m >= 1 && m <= n, "make_mask_operator: need 1 <= m <= n");
    MeasurementOperator op;
    op.kind = MeasurementKind::Mask;
    op.n = n;
    op.m = m;
    op.seed = seed;
    op.indices = sample_indices(n, m, seed);
    return op;
}

MeasurementOperator make_gaussian_operator(int n, int m, uint64_t seed) {
    require(n >= 1, "make_gaussian_operator: n must be positive");
    require(m >= 1, "make_gaussian_operator: m must be positive");
    MeasurementOperator op;
    op.kind = MeasurementKind::Gaussian;
    op.n = n;
    op.m = m;
    op.seed = seed;
    op.matrix.resize(static_cast<size_t>(m) * n);
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (double& e : op.matrix) e = rng.normal() * scale;
    return op;
}

MeasurementOperator make_dct_operator(int n, int m, uint64_t seed) {
    require(n >= 1, "make_dct_operator: n must be positive");
    require(m >= 1 && m <= n, "make_dct_operator: need 1 <= m <= n");
    MeasurementOperator op;
    op.kind = MeasurementKind::DctRows;
    op.n = n;
    op.m = m;
    op.seed = seed;
    op.indices = sample_indices(n, m, seed);
    return op;
}

MeasurementOperator make_identity_operator(int n) {
    require(n >= 1, "make_identity_operator: n must be positive");
    MeasurementOperator op;
    op.kind = MeasurementKind::Identity;
    op.n = n;
    op.m = n;
    return op;
}

std::vector<double> MeasurementOperator::apply(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == n,
            "MeasurementOperator::apply: expected length " + std::to_string(n) + ", got " +
                std::to_string(x.size()));
    switch (kind) {
        case MeasurementKind::Identity:
            return x;
        case MeasurementKind::Mask: {
            std::vector<double> y(m);
            for (int i = 0; i < m; ++i) y[i] = x[indices[i]];
            return y;
        }
        case MeasurementKind::DctRows: {
            const std::vector<double> c = dct_forward(x);
            std::vector<double> y(m);
            for (int i = 0; i < m; ++i) y[i] = c[indices[i]];
            return y;
        }
        case MeasurementKind::Gaussian: {
            std::vector<double> y(m, 0.0);
#pragma omp parallel for schedule(static)
            for (int i = 0; i < m; ++i) {
                const double* row = matrix.data() + static_cast<size_t>(i) * n;
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += row[j] * x[j];
                y[i] = acc;
            }
            return y;
        }
    }
    throw std::logic_error("MeasurementOperator::apply: unknown kind");
}

std::vector<double> MeasurementOperator::adjoint(const std::vector<double>& r) const {
    require(static_cast<int>(r.size()) == m,
            "MeasurementOperator::adjoint: expected length " + std::to_string(m) + ", got " +
                std::to_string(r.size()));
    switch (kind) {
        case MeasurementKind::Identity:
            return r;
        case MeasurementKind::Mask: {
            std::vector<double> x(n, 0.0);
            for (int i = 0; i < m; ++i) x[indices[i]] = r[i];
            return x;
        }
        case MeasurementKind::DctRows: {
            std::vector<double> c(n, 0.0);
            for (int i = 0; i < m; ++i) c[indices[i]] = r[i];
            return dct_inverse(c);
        }
        case MeasurementKind::Gaussian: {
            std::vector<double> x(n, 0.0);
            for (int i = 0; i < m; ++i) {
                const double* row = matrix.data() + static_cast<size_t>(i) * n;
                const double ri = r[i];
                for (int j = 0; j < n; ++j) x[j] += ri * row[j];
            }
            return x;
        }
    }
    throw std::logic_error("MeasurementOperator::adjoint: unknown kind");
}

std::string MeasurementOperator::describe() const {
    const char* name = "identity";
    switch (kind) {
        case MeasurementKind::Mask: name = "mask"; break;
        case MeasurementKind::Gaussian: name = "gaussian"; break;
        case MeasurementKind::DctRows: name = "dct-rows"; break;
        case MeasurementKind::Identity: name = "identity"; break;
    }
    return std::string(name) + " n=" + std::to_string(n) + " m=" + std::to_string(m) +
           " seed=" + std::to_string(seed);
}

std::vector<double> add_awgn(const std::vector<double>& x, double sigma, uint64_t seed) {
    require(sigma >= 0.0, "add_awgn: sigma must be nonnegative");
    if (sigma == 0.0) return x;
    Rng rng(seed);
    std::vector<double> y(x);
    for (double& v : y) v += sigma * rng.normal();
    return y;
}

}  // namespace dip1d
