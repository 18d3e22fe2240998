#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dip1d {

/// Dense (channels x length) array of doubles, row-major by channel.
/// The unit of data flowing through the tape.
struct Tensor {
    int channels = 0;
    int length = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int c, int l) : channels(c), length(l), v(static_cast<size_t>(c) * l, 0.0) {
        if (c <= 0 || l <= 0)
            throw std::invalid_argument("Tensor: dimensions must be positive, got " +
                                        std::to_string(c) + "x" + std::to_string(l));
    }
    Tensor(int c, int l, std::vector<double> data) : channels(c), length(l), v(std::move(data)) {
        if (c <= 0 || l <= 0 || v.size() != static_cast<size_t>(c) * l)
            throw std::invalid_argument("Tensor: data size does not match " +
                                        std::to_string(c) + "x" + std::to_string(l));
    }

    /// Wrap a plain vector as a 1-channel tensor.
    static Tensor row(std::vector<double> data) {
        const int l = static_cast<int>(data.size());
        return Tensor(1, l, std::move(data));
    }

    size_t size() const { return v.size(); }
    double* channel(int c) { return v.data() + static_cast<size_t>(c) * length; }
    const double* channel(int c) const { return v.data() + static_cast<size_t>(c) * length; }

    double& at(int c, int i) { return v[static_cast<size_t>(c) * length + i]; }
    double at(int c, int i) const { return v[static_cast<size_t>(c) * length + i]; }

    bool same_shape(const Tensor& o) const { return channels == o.channels && length == o.length; }
};

}  // namespace dip1d
