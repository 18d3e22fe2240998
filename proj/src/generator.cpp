#include "dip1d/generator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dip1d/rng.hpp"

namespace dip1d {

void GeneratorSpec::validate() const {
    if (output_length < 1 || filters_per_layer < 1 || num_blocks < 1 || latent_channels < 1 ||
        latent_length < 1)
        throw std::invalid_argument("GeneratorSpec: dimensions must be positive");
    if (kernel_size < 1 || kernel_size % 2 == 0)
        throw std::invalid_argument("GeneratorSpec: kernel_size must be odd");
    if (static_cast<int>(upsample_factors.size()) != num_blocks)
        throw std::invalid_argument("GeneratorSpec: need one upsample factor per block");
    long long len = latent_length;
    for (int f : upsample_factors) {
        if (f < 1) throw std::invalid_argument("GeneratorSpec: upsample factors must be positive");
        len *= f;
    }
    if (len != output_length)
        throw std::invalid_argument("GeneratorSpec: latent_length x upsample factors = " +
                                    std::to_string(len) + ", expected " +
                                    std::to_string(output_length));
}

GeneratorSpec default_spec(int n, int filters) {
    if (n < 1) throw std::invalid_argument("default_spec: n must be positive");
    if (filters < 1) throw std::invalid_argument("default_spec: filters must be positive");
    int best_blocks = 0;
    // prefer the deepest net whose latent is still >= 16, else >= 8
    for (int lo : {16, 8}) {
        int len = n, blocks = 0;
        while (len % 2 == 0 && len / 2 >= lo) {
            len /= 2;
            ++blocks;
        }
        if (blocks >= 1 && len <= 64) {
            best_blocks = blocks;
            break;
        }
    }
    if (best_blocks == 0)
        throw std::invalid_argument(
            "default_spec: no valid architecture for n=" + std::to_string(n) +
            " (need n = latent * 2^blocks with latent in [8,64]); zero-pad the signal to the next "
            "power of two");
    GeneratorSpec spec;
    spec.output_length = n;
    spec.filters_per_layer = filters;
    spec.num_blocks = best_blocks;
    spec.upsample_factors.assign(best_blocks, 2);
    spec.latent_length = n >> best_blocks;
    return spec;
}

GeneratorNet init_generator(const GeneratorSpec& spec, uint64_t seed) {
    spec.validate();
    GeneratorNet net;
    net.spec = spec;
    Rng rng(seed);

    const int k = spec.kernel_size;
    int c_in = spec.latent_channels;
    for (int layer = 0; layer <= spec.num_blocks; ++layer) {
        const int c_out = (layer == spec.num_blocks) ? 1 : spec.filters_per_layer;
        Tensor kernel(c_out, c_in * k);
        const double std_dev = std::sqrt(2.0 / (static_cast<double>(c_in) * k));
        for (double& w : kernel.v) w = rng.normal() * std_dev;
        net.kernels.push_back(std::move(kernel));
        net.biases.emplace_back(c_out, 1);
        c_in = spec.filters_per_layer;
    }

    net.latent = Tensor(spec.latent_channels, spec.latent_length);
    for (double& z : net.latent.v) z = rng.uniform() * 0.1;
    return net;
}

Tape::NodeId generator_forward(const GeneratorNet& net, Tape& tape,
                               std::vector<Tape::NodeId>* param_ids) {
    const GeneratorSpec& spec = net.spec;
    const int k = spec.kernel_size;
    const int pad = k / 2;

    Tape::NodeId x = tape.leaf(net.latent);
    int c_in = spec.latent_channels;
    for (int b = 0; b < spec.num_blocks; ++b) {
        const Tape::NodeId w = tape.leaf(net.kernels[b]);
        const Tape::NodeId bias = tape.leaf(net.biases[b]);
        if (param_ids) {
            param_ids->push_back(w);
            param_ids->push_back(bias);
        }
        x = tape.upsample_nearest(x, spec.upsample_factors[b]);
        x = tape.conv1d(x, w, bias, c_in, k, 1, pad);
        x = tape.leaky_relu(x, spec.leaky_slope);
        c_in = spec.filters_per_layer;
    }
    const Tape::NodeId w = tape.leaf(net.kernels[spec.num_blocks]);
    const Tape::NodeId bias = tape.leaf(net.biases[spec.num_blocks]);
    if (param_ids) {
        param_ids->push_back(w);
        param_ids->push_back(bias);
    }
    x = tape.conv1d(x, w, bias, c_in, k, 1, pad);
    return x;
}

std::vector<double> generator_eval(const GeneratorNet& net) {
    Tape tape;
    const Tape::NodeId out = generator_forward(net, tape);
    return tape.value(out).v;
}

}  // namespace dip1d
