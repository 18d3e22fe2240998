#include "dip1d/signal_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dip1d {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

uint32_t read_u32le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16le(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

Signal load_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(path, "cannot open file");
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 44) fail(path, "file too short for a WAV header");
    if (std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        fail(path, "not a RIFF/WAVE file");

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    size_t data_off = 0, data_len = 0;
    bool have_fmt = false;

    size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const char* id = reinterpret_cast<const char*>(buf.data() + pos);
        const uint32_t sz = read_u32le(buf.data() + pos + 4);
        const size_t body = pos + 8;
        if (body + sz > buf.size()) fail(path, "truncated chunk");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (sz < 16) fail(path, "fmt chunk too short");
            format = read_u16le(buf.data() + body);
            channels = read_u16le(buf.data() + body + 2);
            rate = read_u32le(buf.data() + body + 4);
            bits = read_u16le(buf.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = sz;
        }
        pos = body + sz + (sz & 1);  // chunks are word-aligned
    }
    if (!have_fmt) fail(path, "missing fmt chunk");
    if (data_off == 0) fail(path, "missing data chunk");
    if (channels == 0) fail(path, "zero channels");
    if (format != 1 && format != 3)
        fail(path, "unsupported codec (format tag " + std::to_string(format) + "); only PCM and IEEE float are supported");
    if (format == 1 && bits != 8 && bits != 16 && bits != 24)
        fail(path, "unsupported PCM depth " + std::to_string(bits));
    if (format == 3 && bits != 32) fail(path, "unsupported float depth " + std::to_string(bits));

    const size_t bytes_per_sample = bits / 8;
    const size_t frame_size = bytes_per_sample * channels;
    const size_t frames = data_len / frame_size;
    if (frames == 0) fail(path, "empty data chunk");

    Signal s;
    s.sample_rate = static_cast<double>(rate);
    s.source = path;
    s.samples.resize(frames);
    const unsigned char* d = buf.data() + data_off;
    for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (unsigned ch = 0; ch < channels; ++ch) {
            const unsigned char* p = d + i * frame_size + ch * bytes_per_sample;
            double v = 0.0;
            if (format == 3) {
                float fv;
                std::memcpy(&fv, p, 4);
                v = fv;
            } else if (bits == 8) {
                v = (static_cast<int>(p[0]) - 128) / 128.0;  // 8-bit WAV is unsigned
            } else if (bits == 16) {
                const int16_t iv = static_cast<int16_t>(p[0] | (p[1] << 8));
                v = iv / 32768.0;
            } else {  // 24-bit
                int32_t iv = p[0] | (p[1] << 8) | (p[2] << 16);
                if (iv & 0x800000) iv |= ~0xFFFFFF;  // sign extend
                v = iv / 8388608.0;
            }
            acc += v;
        }
        s.samples[i] = acc / channels;
    }
    return s;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

CsvSignal load_csv(const std::string& path, const std::string& column) {
    std::ifstream f(path);
    if (!f) fail(path, "cannot open file");
    std::string line;
    if (!std::getline(f, line)) fail(path, "empty file");
    const std::vector<std::string> header = split_csv_line(line);

    int col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == column) {
            col = static_cast<int>(i);
            break;
        }
    }
    if (col < 0) {
        // fall back to a numeric column index
        int idx = -1;
        const std::string t = trim(column);
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), idx);
        if (ec == std::errc() && p == t.data() + t.size() && idx >= 0 &&
            idx < static_cast<int>(header.size()))
            col = idx;
    }
    if (col < 0) fail(path, "column '" + column + "' not found in header");

    CsvSignal out;
    out.signal.source = path + ":" + trim(header[col]);
    int row = 0;
    while (std::getline(f, line)) {
        if (line.empty() && f.eof()) break;
        const std::vector<std::string> cells = split_csv_line(line);
        if (col >= static_cast<int>(cells.size()))
            fail(path, "row " + std::to_string(row + 2) + " has no column " + std::to_string(col));
        const std::string cell = trim(cells[col]);
        if (cell.empty()) {
            out.missing.push_back(row);
            out.signal.samples.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            double v = 0.0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || p != cell.data() + cell.size())
                fail(path, "row " + std::to_string(row + 2) + ", column " + std::to_string(col) +
                               ": cannot parse '" + cell + "' as a number");
            out.signal.samples.push_back(v);
        }
        ++row;
    }
    if (out.signal.samples.empty()) fail(path, "no data rows");
    return out;
}

void save_csv(const std::string& path,
              const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
    std::ofstream f(path);
    if (!f) fail(path, "cannot open file for writing");
    size_t rows = 0;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) f << ',';
        f << columns[i].first;
        rows = std::max(rows, columns[i].second.size());
    }
    f << '\n';
    char buf[40];
    for (size_t r = 0; r < rows; ++r) {
        for (size_t i = 0; i < columns.size(); ++i) {
            if (i) f << ',';
            if (r < columns[i].second.size()) {
                std::snprintf(buf, sizeof buf, "%.17g", columns[i].second[r]);
                f << buf;
            }
        }
        f << '\n';
    }
    if (!f) fail(path, "write failed");
}

std::pair<Signal, AffineMap> normalize_unit_range(const Signal& s) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : s.samples) {
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo))
        throw std::invalid_argument("normalize_unit_range: signal range is zero (constant signal)");
    Signal out = s;
    const double scale = (hi - lo) / 2.0;
    const double offset = (hi + lo) / 2.0;
    for (double& v : out.samples)
        if (!std::isnan(v)) v = (v - offset) / scale;
    return {std::move(out), AffineMap{scale, offset}};
}

Signal decimate(const Signal& s, int factor) {
    if (factor < 1) throw std::invalid_argument("decimate: factor must be >= 1");
    if (factor == 1) return s;
    if (s.sample_rate <= 0.0)
        throw std::invalid_argument("decimate: sample rate unknown; cannot anti-alias");
    const int n = static_cast<int>(s.samples.size());

    const int taps = 8 * factor + 1;
    const int half = taps / 2;
    const double wc = std::numbers::pi * 0.45 / factor;  // rad/sample at the input rate
    std::vector<double> h(taps);
    double hsum = 0.0;
    for (int i = 0; i < taps; ++i) {
        const int k = i - half;
        const double sinc = k == 0 ? wc / std::numbers::pi
                                   : std::sin(wc * k) / (std::numbers::pi * k);
        const double window = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (taps - 1));
        h[i] = sinc * window;
        hsum += h[i];
    }
    for (double& v : h) v /= hsum;  // unity DC gain

    // symmetric padding keeps the filter zero-phase at the edges
    const auto sample = [&](int i) {
        if (i < 0) i = std::min(-i, n - 1);
        else if (i >= n) i = std::max(2 * (n - 1) - i, 0);
        return s.samples[i];
    };

    Signal out;
    out.sample_rate = s.sample_rate / factor;
    out.source = s.source;
    const int n_out = (n + factor - 1) / factor;
    out.samples.resize(n_out);
    for (int o = 0; o < n_out; ++o) {
        const int center = o * factor;
        double acc = 0.0;
        for (int i = 0; i < taps; ++i) acc += h[i] * sample(center + i - half);
        out.samples[o] = acc;
    }
    return out;
}

Signal gen_chirp(double f0, double f1, int n, double fs) {
    if (n < 1) throw std::invalid_argument("gen_chirp: n must be positive");
    if (!(fs > 2.0 * std::max(f0, f1)))
        throw std::invalid_argument("gen_chirp: fs must exceed twice the highest frequency (aliasing)");
    Signal s;
    s.sample_rate = fs;
    s.source = "chirp";
    s.samples.resize(n);
    const double T = n / fs;
    for (int i = 0; i < n; ++i) {
        const double t = i / fs;
        s.samples[i] = std::sin(2.0 * std::numbers::pi * (f0 * t + (f1 - f0) * t * t / (2.0 * T)));
    }
    return s;
}

PaddedSignal pad_to_valid_length(const Signal& s) {
    const int n = static_cast<int>(s.samples.size());
    int target = 16;
    while (target < n) target *= 2;
    PaddedSignal out;
    out.original_length = n;
    out.signal = s;
    out.signal.samples.resize(target, 0.0);
    return out;
}

}  // namespace dip1d
