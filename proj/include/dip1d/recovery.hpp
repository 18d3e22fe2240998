#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "dip1d/generator.hpp"
#include "dip1d/measurement.hpp"
#include "dip1d/tape.hpp"

namespace dip1d {

/// Hyperparameters of the weight optimization.
struct RecoveryConfig {
    double learning_rate = 1e-4;
    double momentum = 0.9;
    double weight_decay = 1.0;
    double tv_lambda = 0.1;
    int iterations = 3000;
    int restarts = 5;
    int filters_per_layer = 64;
    double rmsprop_smoothing = 0.99;
    double rmsprop_epsilon = 1e-8;
    uint64_t seed = 0;

    void validate() const;
};

/// One point of the recorded optimization trace.
struct LossPoint {
    double objective = 0.0;
    double fidelity = 0.0;
    double tv = 0.0;
};

struct RestartResult {
    std::vector<double> reconstruction;  // generator output after the final step
    std::vector<LossPoint> loss_curve;   // one entry per completed iteration
    double final_objective = std::numeric_limits<double>::quiet_NaN();
    double mse_vs_truth = std::numeric_limits<double>::quiet_NaN();
    bool diverged = false;  // non-finite loss; excluded from aggregates
    int diverged_at = -1;
    uint64_t seed = 0;
};

struct RecoveryResult {
    std::vector<RestartResult> restarts;
    int best_index = -1;  // lowest final objective among non-diverged restarts
    std::vector<double> best_reconstruction;
    double mean_mse = std::numeric_limits<double>::quiet_NaN();
};

/// The full recovery objective on one tape:
/// |y - A G(z,w)|^2 + tv_lambda * TV(G(z,w)).
struct ObjectiveGraph {
    Tape::NodeId loss = -1;
    Tape::NodeId fidelity = -1;
    Tape::NodeId tv = -1;
    Tape::NodeId output = -1;
    std::vector<Tape::NodeId> params;
};

ObjectiveGraph objective(const GeneratorNet& net, const MeasurementOperator& op,
                         const std::vector<double>& y, double tv_lambda, Tape& tape);

/// Per-parameter optimizer state.
struct RmspropState {
    std::vector<double> square_avg;
    std::vector<double> momentum_buf;
};

/// One RMSProp update with coupled L2 weight decay:
///   g <- grad + weight_decay * w
///   s <- rho * s + (1 - rho) * g^2
///   u <- momentum * u + g / sqrt(s + eps)
///   w <- w - lr * u
void rmsprop_step(Tensor& weights, const Tensor& grad, RmspropState& state,
                  const RecoveryConfig& config);

/// Runs `restarts` independent optimizations (restart r reinitializes
/// weights and latent from seed derive_seed(config.seed, r)), each for a
/// fixed budget of `iterations` steps; the final iterate is the output.
RecoveryResult recover(const std::vector<double>& y, const MeasurementOperator& op,
                       const RecoveryConfig& config,
                       const std::optional<std::vector<double>>& ground_truth = std::nullopt);

/// Denoising preset: 300 iterations; filters 64 below sigma 0.15, then 16,
/// then 8 from sigma 0.2 up.
RecoveryConfig denoise_config(double sigma, const RecoveryConfig& base);

/// Fidelity traces of fitting the clean signal, pure noise of matching
/// std, and their sum, all from one init seed (Identity measurements).
struct NoiseImpedanceCurves {
    std::vector<double> clean;
    std::vector<double> noise;
    std::vector<double> sum;
};

NoiseImpedanceCurves noise_impedance_curves(const std::vector<double>& signal, double sigma,
                                            int iterations, const RecoveryConfig& config);

}  // namespace dip1d
