#pragma once

#include <vector>

#include "dip1d/measurement.hpp"
#include "dip1d/tensor.hpp"

namespace dip1d {

/// Reverse-mode autodiff over Tensors. Operations append nodes in
/// execution order (so node ids are already topologically sorted);
/// backward() runs one reverse sweep and accumulates gradients.
///
/// A tape and its tensors belong to one logical thread for the duration
/// of a forward/backward pass; independent tapes are independent.
class Tape {
public:
    using NodeId = int;

    /// Registers an input tensor (parameter or constant) on the tape.
    NodeId leaf(Tensor t);

    /// Cross-correlation with zero padding.
    /// x: [c_in x L]; weights: [c_out x (c_in*k)]; bias: [c_out x 1].
    /// Output length floor((L + 2*padding - k)/stride) + 1.
    NodeId conv1d(NodeId x, NodeId weights, NodeId bias, int c_in, int k, int stride, int padding);

    /// Repeats every sample `factor` times along the length axis.
    NodeId upsample_nearest(NodeId x, int factor);

    /// Elementwise max(x, slope*x). Subgradient at 0 takes the slope-1 branch.
    NodeId leaky_relu(NodeId x, double slope);

    /// Sum of squared errors against a fixed target (scalar output).
    NodeId mse_loss(NodeId pred, const std::vector<double>& target);

    /// Sum of absolute first differences of a 1-channel signal (scalar
    /// output). Subgradient sign(0) = 0.
    NodeId tv_loss(NodeId x);

    /// y = A x for a 1-channel signal; backward applies the exact adjoint.
    NodeId apply_measurement(NodeId x, const MeasurementOperator& op);

    NodeId add(NodeId a, NodeId b);     // elementwise, same shape
    NodeId scale(NodeId a, double c);   // elementwise a*c

    /// Reverse sweep from a scalar loss node. Gradients of all earlier
    /// nodes (matching each output's shape) are available afterwards.
    void backward(NodeId loss);

    const Tensor& value(NodeId id) const { return nodes_[check(id)].out; }
    const Tensor& grad(NodeId id) const;
    double scalar(NodeId id) const { return value(id).v[0]; }

    int size() const { return static_cast<int>(nodes_.size()); }

    /// Drops all nodes and gradients; capacity is kept for reuse.
    void clear();

private:
    enum class Op { Leaf, Conv1d, Upsample, LeakyRelu, MseLoss, TvLoss, ApplyMeasurement, Add, Scale };

    struct Node {
        Op op;
        NodeId a = -1, b = -1, c = -1;  // inputs: data, weights, bias
        int c_in = 0, k = 0, stride = 1, padding = 0, factor = 1;
        double p = 0.0;  // slope or scale constant
        std::vector<double> target;
        const MeasurementOperator* mop = nullptr;
        Tensor out;
    };

    NodeId push(Node n);
    int check(NodeId id) const;

    std::vector<Node> nodes_;
    std::vector<Tensor> grads_;
    bool has_grads_ = false;
};

}  // namespace dip1d
