// Rough timing of one recovery iteration at the paper-scale problem size.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "dip1d/generator.hpp"
#include "dip1d/measurement.hpp"
#include "dip1d/recovery.hpp"
#include "dip1d/signal_io.hpp"

int main(int argc, char** argv) {
    using namespace dip1d;
    const int n = argc > 1 ? std::atoi(argv[1]) : 16384;
    const int iters = argc > 2 ? std::atoi(argv[2]) : 20;

    const Signal chirp = gen_chirp(750.0, 250.0, n, 8192.0);
    const MeasurementOperator op = make_identity_operator(n);
    RecoveryConfig cfg;
    cfg.iterations = iters;
    cfg.restarts = 1;
    cfg.seed = 1;

    const auto t0 = std::chrono::steady_clock::now();
    const RecoveryResult res = recover(chirp.samples, op, cfg);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("n=%d iters=%d: %.3f s total, %.1f ms/iter, final objective %.3f\n", n, iters, dt,
                1e3 * dt / (iters + 1), res.restarts[0].final_objective);
    return 0;
}
