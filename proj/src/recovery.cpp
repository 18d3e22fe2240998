#include "dip1d/recovery.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dip1d/rng.hpp"

namespace dip1d {

void RecoveryConfig::validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("RecoveryConfig: learning_rate must be > 0");
    if (iterations < 1) throw std::invalid_argument("RecoveryConfig: iterations must be >= 1");
    if (restarts < 1) throw std::invalid_argument("RecoveryConfig: restarts must be >= 1");
    if (tv_lambda < 0.0) throw std::invalid_argument("RecoveryConfig: tv_lambda must be >= 0");
    if (weight_decay < 0.0) throw std::invalid_argument("RecoveryConfig: weight_decay must be >= 0");
    if (filters_per_layer < 1) throw std::invalid_argument("RecoveryConfig: filters_per_layer must be >= 1");
}

ObjectiveGraph objective(const GeneratorNet& net, const MeasurementOperator& op,
                         const std::vector<double>& y, double tv_lambda, Tape& tape) {
    if (op.n != net.spec.output_length)
        throw std::invalid_argument("objective: operator n=" + std::to_string(op.n) +
                                    " does not match generator output length " +
                                    std::to_string(net.spec.output_length));
    if (static_cast<int>(y.size()) != op.m)
        throw std::invalid_argument("objective: y has length " + std::to_string(y.size()) +
                                    ", operator produces m=" + std::to_string(op.m));
    ObjectiveGraph g;
    g.output = generator_forward(net, tape, &g.params);
    const Tape::NodeId measured = tape.apply_measurement(g.output, op);
    g.fidelity = tape.mse_loss(measured, y);
    g.tv = tape.tv_loss(g.output);
    g.loss = tv_lambda == 0.0 ? g.fidelity : tape.add(g.fidelity, tape.scale(g.tv, tv_lambda));
    return g;
}

void rmsprop_step(Tensor& weights, const Tensor& grad, RmspropState& state,
                  const RecoveryConfig& config) {
    if (!weights.same_shape(grad)) throw std::invalid_argument("rmsprop_step: grad shape mismatch");
    if (state.square_avg.empty()) {
        state.square_avg.assign(weights.size(), 0.0);
        state.momentum_buf.assign(weights.size(), 0.0);
    }
    if (state.square_avg.size() != weights.size())
        throw std::invalid_argument("rmsprop_step: state shape mismatch");
    const double rho = config.rmsprop_smoothing;
    const double eps = config.rmsprop_epsilon;
    for (size_t i = 0; i < weights.size(); ++i) {
        const double g = grad.v[i] + config.weight_decay * weights.v[i];
        const double s = rho * state.square_avg[i] + (1.0 - rho) * g * g;
        state.square_avg[i] = s;
        const double u = config.momentum * state.momentum_buf[i] + g / std::sqrt(s + eps);
        state.momentum_buf[i] = u;
        weights.v[i] -= config.learning_rate * u;
    }
}

namespace {

struct SingleRunResult {
    std::vector<double> reconstruction;
    std::vector<LossPoint> curve;
    double final_objective = std::numeric_limits<double>::quiet_NaN();
    double final_fidelity = std::numeric_limits<double>::quiet_NaN();
    bool diverged = false;
    int diverged_at = -1;
};

// One optimization run over a freshly initialized net. The tape is
// rebuilt every iteration; parameters live in the net and are updated
// in place.
SingleRunResult run_single(GeneratorNet& net, const MeasurementOperator& op,
                           const std::vector<double>& y, int iterations,
                           const RecoveryConfig& config) {
    SingleRunResult res;
    res.curve.reserve(iterations);
    const int n_params = static_cast<int>(net.kernels.size() + net.biases.size());
    std::vector<RmspropState> states(n_params);
    Tape tape;
    for (int it = 0; it < iterations; ++it) {
        tape.clear();
        const ObjectiveGraph g = objective(net, op, y, config.tv_lambda, tape);
        const double loss = tape.scalar(g.loss);
        if (!std::isfinite(loss)) {
            res.diverged = true;
            res.diverged_at = it;
            return res;
        }
        res.curve.push_back({loss, tape.scalar(g.fidelity), tape.scalar(g.tv)});
        tape.backward(g.loss);
        for (size_t layer = 0; layer < net.kernels.size(); ++layer) {
            rmsprop_step(net.kernels[layer], tape.grad(g.params[2 * layer]), states[2 * layer],
                         config);
            rmsprop_step(net.biases[layer], tape.grad(g.params[2 * layer + 1]),
                         states[2 * layer + 1], config);
        }
    }
    // evaluate the final iterate (weights after the last update)
    tape.clear();
    const ObjectiveGraph g = objective(net, op, y, config.tv_lambda, tape);
    res.reconstruction = tape.value(g.output).v;
    res.final_objective = tape.scalar(g.loss);
    res.final_fidelity = tape.scalar(g.fidelity);
    if (!std::isfinite(res.final_objective)) {
        res.diverged = true;
        res.diverged_at = iterations;
    }
    return res;
}

double mean_squared_error(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

}  // namespace

RecoveryResult recover(const std::vector<double>& y, const MeasurementOperator& op,
                       const RecoveryConfig& config,
                       const std::optional<std::vector<double>>& ground_truth) {
    config.validate();
    if (static_cast<int>(y.size()) != op.m)
        throw std::invalid_argument("recover: y length does not match operator m");
    if (ground_truth && static_cast<int>(ground_truth->size()) != op.n)
        throw std::invalid_argument("recover: ground truth length does not match operator n");
    const GeneratorSpec spec = default_spec(op.n, config.filters_per_layer);

    RecoveryResult result;
    result.restarts.resize(config.restarts);
    for (int r = 0; r < config.restarts; ++r) {
        RestartResult& rr = result.restarts[r];
        rr.seed = derive_seed(config.seed, static_cast<uint64_t>(r));
        GeneratorNet net = init_generator(spec, rr.seed);
        SingleRunResult run = run_single(net, op, y, config.iterations, config);
        rr.reconstruction = std::move(run.reconstruction);
        rr.loss_curve = std::move(run.curve);
        rr.final_objective = run.final_objective;
        rr.diverged = run.diverged;
        rr.diverged_at = run.diverged_at;
        if (!rr.diverged && ground_truth)
            rr.mse_vs_truth = mean_squared_error(rr.reconstruction, *ground_truth);
    }

    double mse_sum = 0.0;
    int mse_count = 0;
    for (int r = 0; r < config.restarts; ++r) {
        const RestartResult& rr = result.restarts[r];
        if (rr.diverged) continue;
        if (result.best_index < 0 ||
            rr.final_objective < result.restarts[result.best_index].final_objective)
            result.best_index = r;
        if (ground_truth) {
            mse_sum += rr.mse_vs_truth;
            ++mse_count;
        }
    }
    if (result.best_index >= 0)
        result.best_reconstruction = result.restarts[result.best_index].reconstruction;
    if (mse_count > 0) result.mean_mse = mse_sum / mse_count;
    return result;
}

RecoveryConfig denoise_config(double sigma, const RecoveryConfig& base) {
    if (sigma < 0.0) throw std::invalid_argument("denoise_config: sigma must be nonnegative");
    RecoveryConfig cfg = base;
    cfg.iterations = 300;
    cfg.filters_per_layer = sigma < 0.15 ? 64 : (sigma < 0.2 ? 16 : 8);
    return cfg;
}

NoiseImpedanceCurves noise_impedance_curves(const std::vector<double>& signal, double sigma,
                                            int iterations, const RecoveryConfig& config) {
    config.validate();
    if (iterations < 1) throw std::invalid_argument("noise_impedance_curves: iterations must be >= 1");
    const int n = static_cast<int>(signal.size());
    const MeasurementOperator op = make_identity_operator(n);
    const GeneratorSpec spec = default_spec(n, config.filters_per_layer);
    const uint64_t init_seed = derive_seed(config.seed, 0);

    const std::vector<double> zeros(n, 0.0);
    const std::vector<double> noise = add_awgn(zeros, sigma, derive_seed(config.seed, 1));
    std::vector<double> sum(signal);
    for (int i = 0; i < n; ++i) sum[i] += noise[i];

    NoiseImpedanceCurves curves;
    const std::vector<double>* targets[3] = {&signal, &noise, &sum};
    std::vector<double>* outs[3] = {&curves.clean, &curves.noise, &curves.sum};
    for (int t = 0; t < 3; ++t) {
        GeneratorNet net = init_generator(spec, init_seed);
        const SingleRunResult run = run_single(net, op, *targets[t], iterations, config);
        outs[t]->reserve(run.curve.size());
        for (const LossPoint& p : run.curve) outs[t]->push_back(p.fidelity);
    }
    return curves;
}

}  // namespace dip1d
