#pragma once

#include <vector>

namespace dip1d {

/// Orthonormal DCT-II. Row 0 is scaled by 1/sqrt(n), the rest by
/// sqrt(2/n), so the transform matrix is orthogonal. O(n log n) via a
/// radix-2 FFT when n is a power of two, O(n^2) direct sum otherwise.
std::vector<double> dct_forward(const std::vector<double>& x);

/// Inverse of dct_forward (orthonormal DCT-III).
std::vector<double> dct_inverse(const std::vector<double>& c);

}  // namespace dip1d
