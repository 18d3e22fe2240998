#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dip1d {

/// A sampled univariate signal. sample_rate is 0 when unknown (e.g. CSV
/// sensor data without timing metadata).
struct Signal {
    std::vector<double> samples;
    double sample_rate = 0.0;
    std::string source;
};

/// The affine map x = scale * y + offset taking normalized values back
/// to the original range.
struct AffineMap {
    double scale = 1.0;
    double offset = 0.0;
    double denormalize(double y) const { return scale * y + offset; }
};

/// Reads a RIFF PCM WAV file (8/16/24-bit integer or 32-bit float).
/// Multichannel input is averaged to mono; integer samples are scaled to
/// [-1, 1) by the type's maximum magnitude.
Signal load_wav(const std::string& path);

struct CsvSignal {
    Signal signal;                // blank cells hold NaN
    std::vector<int> missing;     // row indices of blank cells
};

/// Reads one column (by header name, or by 0-based index if `column`
/// parses as an integer) of a comma-separated file with a header row.
CsvSignal load_csv(const std::string& path, const std::string& column);

/// Writes named columns with a header row; values use 17 significant
/// digits so 64-bit doubles round-trip exactly.
void save_csv(const std::string& path,
              const std::vector<std::pair<std::string, std::vector<double>>>& columns);

/// Affine map onto [-1, 1]: x -> 2 (x - min)/(max - min) - 1. NaN samples
/// are ignored when computing the range and pass through unchanged.
std::pair<Signal, AffineMap> normalize_unit_range(const Signal& s);

/// Anti-aliased downsampling by an integer factor: windowed-sinc FIR
/// (Hamming, 8*factor + 1 taps, cutoff 0.45/factor of the input Nyquist),
/// zero-phase via symmetric padding, then every factor-th sample.
Signal decimate(const Signal& s, int factor);

/// Linear chirp x[i] = sin(2 pi (f0 t + (f1 - f0) t^2 / (2T))), t = i/fs.
Signal gen_chirp(double f0, double f1, int n, double fs);

struct PaddedSignal {
    Signal signal;
    int original_length = 0;
};

/// Zero-pads to the next power of two (minimum 16) so the generator's
/// doubling architecture accepts the length. Reconstructions are cropped
/// back to original_length before metrics.
PaddedSignal pad_to_valid_length(const Signal& s);

}  // namespace dip1d
