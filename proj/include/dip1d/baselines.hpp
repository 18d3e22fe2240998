#pragma once

#include <vector>

#include "dip1d/measurement.hpp"

namespace dip1d {

struct LassoConfig {
    double alpha = 1e-5;
    int max_iterations = 5000;
    double tolerance = 1e-7;  // relative change in iterate

    void validate() const;
};

/// soft(x, t) = sign(x) * max(|x| - t, 0)
double soft_threshold(double x, double t);

/// L1-regularized least squares over DCT coefficients,
///   minimize_c (1/(2m)) |y - A idct(c)|^2 + alpha |c|_1,
/// solved by monotone FISTA with step 1/L, L estimated by 50 power
/// iterations of the composed operator. Returns idct(c*).
std::vector<double> lasso_dct(const std::vector<double>& y, const MeasurementOperator& op, int n,
                              const LassoConfig& config);

/// Natural cubic spline through (known_indices, known_values), evaluated
/// at 0..n-1. Outside the knot range the nearest boundary value is held.
std::vector<double> spline_impute(const std::vector<double>& known_values,
                                  const std::vector<int>& known_indices, int n);

}  // namespace dip1d
