#include "dip1d/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dip1d {

namespace {

// The convolution loops walk output positions in chunks so that one
// chunk of every input row stays cache-resident while all output
// channels consume it; without this the big layers stream the whole
// input once per output channel and the pass is memory-bound.
constexpr int kConvChunk = 2048;

// out[o] += w * in[o + shift] for o in [o0, o1) clipped so that o + shift
// stays inside [0, in_len). The hot loop of every convolution pass.
inline void axpy_shifted(double* out, int o0, int o1, const double* in, int in_len, int shift,
                         double w) {
    const int lo = std::max(o0, -shift);
    const int hi = std::min(o1, in_len - shift);
    const double* src = in + shift;
    for (int o = lo; o < hi; ++o) out[o] += w * src[o];
}

// dot(gout[o], in[o + shift]) over the same clipped range. Eight
// independent accumulator lanes break the FMA dependency chain; the
// summation order is fixed, so results stay bit-reproducible.
inline double dot_shifted(const double* gout, int o0, int o1, const double* in, int in_len,
                          int shift) {
    const int lo = std::max(o0, -shift);
    const int hi = std::min(o1, in_len - shift);
    const double* src = in + shift;
    double lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    int o = lo;
    for (; o + 8 <= hi; o += 8)
        for (int j = 0; j < 8; ++j) lane[j] += gout[o + j] * src[o + j];
    for (int j = 0; o < hi; ++o, ++j) lane[j] += gout[o] * src[o];
    return ((lane[0] + lane[1]) + (lane[2] + lane[3])) +
           ((lane[4] + lane[5]) + (lane[6] + lane[7]));
}

}  // namespace

int Tape::check(NodeId id) const {
    if (id < 0 || id >= static_cast<int>(nodes_.size()))
        throw std::invalid_argument("Tape: invalid node id " + std::to_string(id));
    return id;
}

Tape::NodeId Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::clear() {
    nodes_.clear();
    grads_.clear();
    has_grads_ = false;
}

const Tensor& Tape::grad(NodeId id) const {
    check(id);
    if (!has_grads_) throw std::logic_error("Tape: gradients requested before backward()");
    return grads_[id];
}

Tape::NodeId Tape::leaf(Tensor t) {
    Node n;
    n.op = Op::Leaf;
    n.out = std::move(t);
    return push(std::move(n));
}

Tape::NodeId Tape::conv1d(NodeId x, NodeId weights, NodeId bias, int c_in, int k, int stride, int padding) {
    const Tensor& in = value(x);
    const Tensor& w = value(weights);
    const Tensor& b = value(bias);
    if (c_in != in.channels)
        throw std::invalid_argument("conv1d: weights expect " + std::to_string(c_in) +
                                    " input channels, input has " + std::to_string(in.channels));
    if (k < 1 || stride < 1 || padding < 0) throw std::invalid_argument("conv1d: bad kernel/stride/padding");
    if (w.length != c_in * k)
        throw std::invalid_argument("conv1d: weight tensor must be [c_out x (c_in*k)]");
    const int c_out = w.channels;
    if (b.channels != c_out || b.length != 1)
        throw std::invalid_argument("conv1d: bias tensor must be [c_out x 1]");
    const int L = in.length;
    if (k > L + 2 * padding) throw std::invalid_argument("conv1d: kernel longer than padded input");
    const int L_out = (L + 2 * padding - k) / stride + 1;
    if (L_out < 1) throw std::invalid_argument("conv1d: empty output");

    Node n;
    n.op = Op::Conv1d;
    n.a = x;
    n.b = weights;
    n.c = bias;
    n.c_in = c_in;
    n.k = k;
    n.stride = stride;
    n.padding = padding;
    n.out = Tensor(c_out, L_out);

    const double* inp = in.v.data();
    double* outp = n.out.v.data();
    if (stride == 1) {
        for (int o0 = 0; o0 < L_out; o0 += kConvChunk) {
            const int o1 = std::min(L_out, o0 + kConvChunk);
#pragma omp parallel for schedule(static)
            for (int d = 0; d < c_out; ++d) {
                double* orow = outp + static_cast<size_t>(d) * L_out;
                std::fill(orow + o0, orow + o1, b.v[d]);
                const double* wrow = w.channel(d);
                for (int c = 0; c < c_in; ++c) {
                    const double* irow = inp + static_cast<size_t>(c) * L;
                    for (int kk = 0; kk < k; ++kk)
                        axpy_shifted(orow, o0, o1, irow, L, kk - padding, wrow[c * k + kk]);
                }
            }
        }
    } else {
#pragma omp parallel for schedule(static)
        for (int d = 0; d < c_out; ++d) {
            double* orow = outp + static_cast<size_t>(d) * L_out;
            std::fill(orow, orow + L_out, b.v[d]);
            const double* wrow = w.channel(d);
            for (int c = 0; c < c_in; ++c) {
                const double* irow = inp + static_cast<size_t>(c) * L;
                for (int kk = 0; kk < k; ++kk) {
                    const double wv = wrow[c * k + kk];
                    for (int o = 0; o < L_out; ++o) {
                        const int i = o * stride + kk - padding;
                        if (i >= 0 && i < L) orow[o] += wv * irow[i];
                    }
                }
            }
        }
    }
    return push(std::move(n));
}

Tape::NodeId Tape::upsample_nearest(NodeId x, int factor) {
    if (factor < 1) throw std::invalid_argument("upsample_nearest: factor must be >= 1");
    const Tensor& in = value(x);
    Node n;
    n.op = Op::Upsample;
    n.a = x;
    n.factor = factor;
    n.out = Tensor(in.channels, in.length * factor);
    for (int c = 0; c < in.channels; ++c) {
        const double* irow = in.channel(c);
        double* orow = n.out.channel(c);
        for (int i = 0; i < in.length; ++i)
            for (int j = 0; j < factor; ++j) orow[i * factor + j] = irow[i];
    }
    return push(std::move(n));
}

Tape::NodeId Tape::leaky_relu(NodeId x, double slope) {
    const Tensor& in = value(x);
    Node n;
    n.op = Op::LeakyRelu;
    n.a = x;
    n.p = slope;
    n.out = in;
    for (double& v : n.out.v)
        if (v < 0.0) v *= slope;
    return push(std::move(n));
}

Tape::NodeId Tape::mse_loss(NodeId pred, const std::vector<double>& target) {
    const Tensor& p = value(pred);
    if (p.size() != target.size())
        throw std::invalid_argument("mse_loss: prediction has " + std::to_string(p.size()) +
                                    " values, target " + std::to_string(target.size()));
    Node n;
    n.op = Op::MseLoss;
    n.a = pred;
    n.target = target;
    double acc = 0.0;
    for (size_t i = 0; i < target.size(); ++i) {
        const double d = p.v[i] - target[i];
        acc += d * d;
    }
    n.out = Tensor(1, 1, {acc});
    return push(std::move(n));
}

Tape::NodeId Tape::tv_loss(NodeId x) {
    const Tensor& in = value(x);
    if (in.channels != 1) throw std::invalid_argument("tv_loss: expects a 1-channel signal");
    if (in.length < 2) throw std::invalid_argument("tv_loss: signal must have at least 2 samples");
    Node n;
    n.op = Op::TvLoss;
    n.a = x;
    double acc = 0.0;
    for (int i = 1; i < in.length; ++i) acc += std::abs(in.v[i] - in.v[i - 1]);
    n.out = Tensor(1, 1, {acc});
    return push(std::move(n));
}

Tape::NodeId Tape::apply_measurement(NodeId x, const MeasurementOperator& op) {
    const Tensor& in = value(x);
    if (in.channels != 1) throw std::invalid_argument("apply_measurement: expects a 1-channel signal");
    Node n;
    n.op = Op::ApplyMeasurement;
    n.a = x;
    n.mop = &op;
    n.out = Tensor::row(op.apply(in.v));
    return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (!ta.same_shape(tb)) throw std::invalid_argument("add: shape mismatch");
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    n.out = ta;
    for (size_t i = 0; i < n.out.v.size(); ++i) n.out.v[i] += tb.v[i];
    return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId a, double c) {
    Node n;
    n.op = Op::Scale;
    n.a = a;
    n.p = c;
    n.out = value(a);
    for (double& v : n.out.v) v *= c;
    return push(std::move(n));
}

void Tape::backward(NodeId loss) {
    check(loss);
    const Tensor& lt = nodes_[loss].out;
    if (lt.channels != 1 || lt.length != 1)
        throw std::invalid_argument("backward: loss node must be scalar");

    grads_.assign(nodes_.size(), Tensor());
    for (size_t i = 0; i < nodes_.size(); ++i) {
        grads_[i] = Tensor(nodes_[i].out.channels, nodes_[i].out.length);
    }
    grads_[loss].v[0] = 1.0;
    has_grads_ = true;

    for (int id = loss; id >= 0; --id) {
        const Node& n = nodes_[id];
        const Tensor& g = grads_[id];
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Conv1d: {
                const Tensor& in = nodes_[n.a].out;
                const Tensor& w = nodes_[n.b].out;
                Tensor& gin = grads_[n.a];
                Tensor& gw = grads_[n.b];
                Tensor& gb = grads_[n.c];
                const int c_out = n.out.channels, L_out = n.out.length;
                const int c_in = n.c_in, k = n.k, L = in.length;

                if (n.stride == 1) {
                    for (int i0 = 0; i0 < L; i0 += kConvChunk) {
                        const int i1 = std::min(L, i0 + kConvChunk);
#pragma omp parallel for schedule(static)
                        for (int c = 0; c < c_in; ++c) {
                            double* grow = gin.channel(c);
                            for (int d = 0; d < c_out; ++d) {
                                const double* gorow = g.channel(d);
                                const double* wrow = w.channel(d);
                                // gin[c][i] += w[d][c,kk] * gout[d][i + pad - kk]
                                for (int kk = 0; kk < k; ++kk)
                                    axpy_shifted(grow, i0, i1, gorow, L_out, n.padding - kk,
                                                 wrow[c * k + kk]);
                            }
                        }
                    }
                    for (int o0 = 0; o0 < L_out; o0 += kConvChunk) {
                        const int o1 = std::min(L_out, o0 + kConvChunk);
#pragma omp parallel for schedule(static)
                        for (int d = 0; d < c_out; ++d) {
                            const double* gorow = g.channel(d);
                            double* gwrow = gw.channel(d);
                            for (int c = 0; c < c_in; ++c) {
                                const double* irow = in.channel(c);
                                for (int kk = 0; kk < k; ++kk)
                                    gwrow[c * k + kk] +=
                                        dot_shifted(gorow, o0, o1, irow, L, kk - n.padding);
                            }
                            double acc = 0.0;
                            for (int o = o0; o < o1; ++o) acc += gorow[o];
                            gb.v[d] += acc;
                        }
                    }
                } else {
                    for (int d = 0; d < c_out; ++d) {
                        const double* gorow = g.channel(d);
                        const double* wrow = w.channel(d);
                        double* gwrow = gw.channel(d);
                        double acc = 0.0;
                        for (int o = 0; o < L_out; ++o) {
                            const double go = gorow[o];
                            acc += go;
                            for (int c = 0; c < c_in; ++c) {
                                for (int kk = 0; kk < k; ++kk) {
                                    const int i = o * n.stride + kk - n.padding;
                                    if (i < 0 || i >= L) continue;
                                    gin.at(c, i) += wrow[c * k + kk] * go;
                                    gwrow[c * k + kk] += in.at(c, i) * go;
                                }
                            }
                        }
                        gb.v[d] += acc;
                    }
                }
                break;
            }
            case Op::Upsample: {
                Tensor& gin = grads_[n.a];
                const int f = n.factor;
                for (int c = 0; c < gin.channels; ++c) {
                    const double* gorow = g.channel(c);
                    double* grow = gin.channel(c);
                    for (int i = 0; i < gin.length; ++i) {
                        double acc = 0.0;
                        for (int j = 0; j < f; ++j) acc += gorow[i * f + j];
                        grow[i] += acc;
                    }
                }
                break;
            }
            case Op::LeakyRelu: {
                const Tensor& in = nodes_[n.a].out;
                Tensor& gin = grads_[n.a];
                for (size_t i = 0; i < in.v.size(); ++i)
                    gin.v[i] += g.v[i] * (in.v[i] < 0.0 ? n.p : 1.0);
                break;
            }
            case Op::MseLoss: {
                const Tensor& p = nodes_[n.a].out;
                Tensor& gin = grads_[n.a];
                const double go = g.v[0];
                for (size_t i = 0; i < p.v.size(); ++i)
                    gin.v[i] += go * 2.0 * (p.v[i] - n.target[i]);
                break;
            }
            case Op::TvLoss: {
                const Tensor& x = nodes_[n.a].out;
                Tensor& gin = grads_[n.a];
                const double go = g.v[0];
                for (int i = 1; i < x.length; ++i) {
                    const double d = x.v[i] - x.v[i - 1];
                    const double s = (d > 0.0) - (d < 0.0);
                    gin.v[i] += go * s;
                    gin.v[i - 1] -= go * s;
                }
                break;
            }
            case Op::ApplyMeasurement: {
                Tensor& gin = grads_[n.a];
                const std::vector<double> gx = n.mop->adjoint(g.v);
                for (size_t i = 0; i < gx.size(); ++i) gin.v[i] += gx[i];
                break;
            }
            case Op::Add: {
                Tensor& ga = grads_[n.a];
                Tensor& gb = grads_[n.b];
                for (size_t i = 0; i < g.v.size(); ++i) {
                    ga.v[i] += g.v[i];
                    gb.v[i] += g.v[i];
                }
                break;
            }
            case Op::Scale: {
                Tensor& ga = grads_[n.a];
                for (size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i] * n.p;
                break;
            }
        }
    }
}

}  // namespace dip1d
