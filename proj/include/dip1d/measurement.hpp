#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dip1d {

enum class MeasurementKind { Mask, Gaussian, DctRows, Identity };

/// A linear measurement process y = A x with its exact adjoint.
/// Immutable after construction; safe to share across threads.
struct MeasurementOperator {
    MeasurementKind kind = MeasurementKind::Identity;
    int n = 0;  // input dimension
    int m = 0;  // output dimension
    uint64_t seed = 0;
    std::vector<int> indices;    // Mask: kept sample indices; DctRows: kept DCT rows (sorted, unique)
    std::vector<double> matrix;  // Gaussian: row-major m x n

    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> adjoint(const std::vector<double>& r) const;

    /// Replayable text form: "<kind> n=<n> m=<m> seed=<seed>".
    std::string describe() const;
};

/// m rows of the n x n identity, sampled uniformly without replacement.
MeasurementOperator make_mask_operator(int n, int m, uint64_t seed);

/// Entries iid Normal(0,1) / sqrt(m).
MeasurementOperator make_gaussian_operator(int n, int m, uint64_t seed);

/// m rows of the orthonormal DCT-II matrix, sampled uniformly without
/// replacement.
MeasurementOperator make_dct_operator(int n, int m, uint64_t seed);

MeasurementOperator make_identity_operator(int n);

/// x + sigma * g with g iid standard normal, deterministic in seed.
std::vector<double> add_awgn(const std::vector<double>& x, double sigma, uint64_t seed);

}  // namespace dip1d
