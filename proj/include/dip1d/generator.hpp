#pragma once

#include <cstdint>
#include <vector>

#include "dip1d/tape.hpp"
#include "dip1d/tensor.hpp"

namespace dip1d {

/// Architecture of the 1D convolutional generator. Each block is
/// upsample -> same-padding convolution -> leaky ReLU; a final
/// 1-channel convolution (no activation) produces the signal.
struct GeneratorSpec {
    int output_length = 0;
    int filters_per_layer = 64;
    int num_blocks = 0;
    int kernel_size = 3;  // odd, so stride-1 same padding preserves length
    std::vector<int> upsample_factors;
    int latent_channels = 32;
    int latent_length = 0;
    double leaky_slope = 0.2;

    void validate() const;
};

/// Instantiated generator: weights plus the fixed latent input.
/// The latent is drawn once at init and never optimized.
struct GeneratorNet {
    GeneratorSpec spec;
    std::vector<Tensor> kernels;  // per layer, [c_out x (c_in*k)]; last entry is the output layer
    std::vector<Tensor> biases;   // per layer, [c_out x 1]
    Tensor latent;
};

/// Canonical architecture for signal length n: doubling blocks, kernel 3,
/// 32-channel latent. The latent length is the smallest value in [16, 64]
/// reachable by repeated halving of n, falling back to [8, 64]; n that
/// cannot be factored this way is rejected (pad the signal first).
GeneratorSpec default_spec(int n, int filters);

/// Kernels iid Normal(0, sqrt(2/(c_in*k))), biases zero, latent iid
/// Uniform[0, 0.1]; fully determined by the seed.
GeneratorNet init_generator(const GeneratorSpec& spec, uint64_t seed);

/// Records the full forward pass on the tape and returns the output node
/// ([1 x n]). When param_ids is given it receives the leaf node id of
/// every kernel and bias, in layer order (kernel, bias, kernel, bias, ...).
Tape::NodeId generator_forward(const GeneratorNet& net, Tape& tape,
                               std::vector<Tape::NodeId>* param_ids = nullptr);

/// Convenience plain forward (fresh scratch tape), returning the signal.
std::vector<double> generator_eval(const GeneratorNet& net);

}  // namespace dip1d
