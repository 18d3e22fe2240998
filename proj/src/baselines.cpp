#include "dip1d/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dip1d/dct.hpp"
#include "dip1d/rng.hpp"

namespace dip1d {

void LassoConfig::validate() const {
    if (alpha < 0.0) throw std::invalid_argument("LassoConfig: alpha must be >= 0");
    if (max_iterations < 1) throw std::invalid_argument("LassoConfig: max_iterations must be >= 1");
    if (tolerance < 0.0) throw std::invalid_argument("LassoConfig: tolerance must be >= 0");
}

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

namespace {

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace

std::vector<double> lasso_dct(const std::vector<double>& y, const MeasurementOperator& op, int n,
                              const LassoConfig& config) {
    config.validate();
    if (op.n != n) throw std::invalid_argument("lasso_dct: operator n does not match n");
    const int m = op.m;
    if (m < 1) throw std::invalid_argument("lasso_dct: no measurements");
    if (static_cast<int>(y.size()) != m)
        throw std::invalid_argument("lasso_dct: y length " + std::to_string(y.size()) +
                                    " does not match operator m=" + std::to_string(m));

    const auto forward = [&](const std::vector<double>& c) { return op.apply(dct_inverse(c)); };
    const auto adjoint_op = [&](const std::vector<double>& r) { return dct_forward(op.adjoint(r)); };

    // largest eigenvalue of (1/m) B^T B by 50 power iterations
    Rng rng(0x1A550DC7u);
    std::vector<double> pv(n);
    for (double& x : pv) x = rng.normal();
    double lip = 1.0;
    for (int it = 0; it < 50; ++it) {
        std::vector<double> w = adjoint_op(forward(pv));
        for (double& x : w) x /= static_cast<double>(m);
        const double nw = norm2(w);
        if (nw == 0.0) {
            lip = 1.0;
            break;
        }
        lip = nw / std::max(norm2(pv), 1e-300);
        for (double& x : w) x /= nw;
        pv = std::move(w);
    }
    const double step = 1.0 / lip;

    const auto objective = [&](const std::vector<double>& c) {
        const std::vector<double> r = forward(c);
        double fid = 0.0;
        for (int i = 0; i < m; ++i) {
            const double d = r[i] - y[i];
            fid += d * d;
        }
        double l1 = 0.0;
        for (double x : c) l1 += std::abs(x);
        return fid / (2.0 * m) + config.alpha * l1;
    };

    // monotone FISTA: the accepted iterate never increases the objective
    std::vector<double> c(n, 0.0), z(n, 0.0), c_prev(n, 0.0);
    double f_c = objective(c);
    double t = 1.0;
    for (int it = 0; it < config.max_iterations; ++it) {
        std::vector<double> r = forward(z);
        for (int i = 0; i < m; ++i) r[i] -= y[i];
        std::vector<double> grad = adjoint_op(r);
        std::vector<double> u(n);
        for (int i = 0; i < n; ++i)
            u[i] = soft_threshold(z[i] - step * grad[i] / static_cast<double>(m),
                                  config.alpha * step);
        const double f_u = objective(u);
        const bool accepted = f_u <= f_c;
        c_prev.swap(c);
        if (accepted) {
            c = u;
            f_c = f_u;
        } else {
            c = c_prev;  // keep the previous iterate; u still drives momentum
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (int i = 0; i < n; ++i)
            z[i] = c[i] + (t / t_next) * (u[i] - c[i]) + ((t - 1.0) / t_next) * (c[i] - c_prev[i]);
        t = t_next;

        if (accepted && it > 0) {
            double dn = 0.0, cn = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = c[i] - c_prev[i];
                dn += d * d;
                cn += c_prev[i] * c_prev[i];
            }
            if (std::sqrt(dn) <= config.tolerance * std::max(std::sqrt(cn), 1.0)) break;
        }
    }
    return dct_inverse(c);
}

std::vector<double> spline_impute(const std::vector<double>& known_values,
                                  const std::vector<int>& known_indices, int n) {
    const int k = static_cast<int>(known_indices.size());
    if (k < 2) throw std::invalid_argument("spline_impute: need at least 2 known points");
    if (known_values.size() != known_indices.size())
        throw std::invalid_argument("spline_impute: values/indices length mismatch");
    for (int i = 0; i < k; ++i) {
        if (known_indices[i] < 0 || known_indices[i] >= n)
            throw std::invalid_argument("spline_impute: index out of range");
        if (i > 0 && known_indices[i] <= known_indices[i - 1])
            throw std::invalid_argument("spline_impute: indices must be strictly increasing");
    }

    // natural cubic spline: solve the tridiagonal system for second
    // derivatives M_i, with M_0 = M_{k-1} = 0
    std::vector<double> h(k - 1);
    for (int i = 0; i + 1 < k; ++i)
        h[i] = static_cast<double>(known_indices[i + 1] - known_indices[i]);
    std::vector<double> mm(k, 0.0);
    if (k > 2) {
        const int inner = k - 2;
        std::vector<double> diag(inner), rhs(inner), upper(inner);
        for (int i = 0; i < inner; ++i) {
            diag[i] = 2.0 * (h[i] + h[i + 1]);
            upper[i] = h[i + 1];
            rhs[i] = 6.0 * ((known_values[i + 2] - known_values[i + 1]) / h[i + 1] -
                            (known_values[i + 1] - known_values[i]) / h[i]);
        }
        // Thomas algorithm (lower diagonal equals h[i])
        for (int i = 1; i < inner; ++i) {
            const double w = h[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        mm[inner] = rhs[inner - 1] / diag[inner - 1];
        for (int i = inner - 1; i >= 1; --i)
            mm[i] = (rhs[i - 1] - upper[i - 1] * mm[i + 1]) / diag[i - 1];
    }

    std::vector<double> out(n);
    int seg = 0;
    for (int x = 0; x < n; ++x) {
        if (x <= known_indices[0]) {
            out[x] = known_values[0];
            continue;
        }
        if (x >= known_indices[k - 1]) {
            out[x] = known_values[k - 1];
            continue;
        }
        while (known_indices[seg + 1] < x) ++seg;
        const double t0 = known_indices[seg], t1 = known_indices[seg + 1];
        const double a = (t1 - x) / h[seg], b = (x - t0) / h[seg];
        out[x] = a * known_values[seg] + b * known_values[seg + 1] +
                 ((a * a * a - a) * mm[seg] + (b * b * b - b) * mm[seg + 1]) * h[seg] * h[seg] / 6.0;
    }
    return out;
}

}  // namespace dip1d
