#include "dip1d/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dip1d/dct.hpp"
#include "dip1d/rng.hpp"

namespace dip1d {

const char* task_name(Task t) {
    switch (t) {
        case Task::Impute: return "impute";
        case Task::CsGaussian: return "cs-gaussian";
        case Task::CsDct: return "cs-dct";
        case Task::Denoise: return "denoise";
        case Task::NoiseImpedance: return "noise-impedance";
    }
    return "?";
}

Task parse_task(const std::string& name) {
    for (Task t : {Task::Impute, Task::CsGaussian, Task::CsDct, Task::Denoise, Task::NoiseImpedance})
        if (name == task_name(t)) return t;
    throw std::invalid_argument("unknown task '" + name + "'");
}

void ExperimentConfig::validate() const {
    recovery.validate();
    lasso.validate();
    const bool needs_m = task == Task::Impute || task == Task::CsGaussian || task == Task::CsDct;
    if (needs_m && m_list.empty() && !(task == Task::Impute && input.kind == InputSpec::Kind::Csv))
        throw std::invalid_argument("task requires at least one m value");
    if ((task == Task::Denoise || task == Task::NoiseImpedance) && sigma_list.empty())
        throw std::invalid_argument("task requires at least one sigma value");
    for (double s : sigma_list)
        if (s < 0.0) throw std::invalid_argument("sigma values must be >= 0");
    for (const std::string& m : methods)
        if (m != "dip" && m != "lasso" && m != "spline")
            throw std::invalid_argument("unknown method '" + m + "' (expected dip, lasso, spline)");
    if (std::find(methods.begin(), methods.end(), "spline") != methods.end() && task != Task::Impute)
        throw std::invalid_argument("spline is only valid for task=impute");
}

double mse(const std::vector<double>& x, const std::vector<double>& x_hat) {
    if (x.size() != x_hat.size())
        throw std::invalid_argument("mse: length mismatch (" + std::to_string(x.size()) + " vs " +
                                    std::to_string(x_hat.size()) + ")");
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x_hat[i];
        acc += d * d;
    }
    return acc / static_cast<double>(x.size());
}

double imputation_mse(const std::vector<double>& x, const std::vector<double>& x_hat,
                      const std::vector<int>& missing) {
    if (x.size() != x_hat.size()) throw std::invalid_argument("imputation_mse: length mismatch");
    if (missing.empty()) throw std::invalid_argument("imputation_mse: empty missing set");
    double acc = 0.0;
    for (int i : missing) {
        if (i < 0 || i >= static_cast<int>(x.size()))
            throw std::invalid_argument("imputation_mse: index out of range");
        const double d = x[i] - x_hat[i];
        acc += d * d;
    }
    return acc / static_cast<double>(missing.size());
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_level(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// task id folded into derived seeds so levels of different tasks never share operators
uint64_t task_tag(Task t) { return 0xD1B1D000ULL + static_cast<uint64_t>(t); }

struct LoadedInput {
    Signal original;            // normalized, original length
    std::vector<double> padded; // zero-padded to a valid generator length
    int orig_len = 0;
    std::vector<int> data_missing;  // from CSV blanks, if any
};

LoadedInput load_input(const ExperimentConfig& cfg) {
    LoadedInput in;
    Signal raw;
    switch (cfg.input.kind) {
        case InputSpec::Kind::Wav:
            raw = load_wav(cfg.input.path);
            break;
        case InputSpec::Kind::Csv: {
            CsvSignal c = load_csv(cfg.input.path, cfg.input.column);
            raw = std::move(c.signal);
            in.data_missing = std::move(c.missing);
            break;
        }
        case InputSpec::Kind::Chirp: {
            const ChirpParams& p = cfg.input.chirp;
            raw = gen_chirp(p.f0, p.f1, p.n, p.fs);
            break;
        }
    }
    auto [norm, map] = normalize_unit_range(raw);
    (void)map;
    in.original = std::move(norm);
    in.orig_len = static_cast<int>(in.original.samples.size());
    PaddedSignal padded = pad_to_valid_length(in.original);
    in.padded = std::move(padded.signal.samples);
    // padding after a CSV with blanks: blanks stay NaN only in `original`;
    // the padded vector used as ground truth/operator input zeroes them
    for (double& v : in.padded)
        if (std::isnan(v)) v = 0.0;
    return in;
}

std::vector<double> crop(const std::vector<double>& v, int n) {
    return std::vector<double>(v.begin(), v.begin() + n);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();

    ExperimentResult result;
    result.manifest = config_to_manifest(config);

    LoadedInput in = load_input(config);
    const int n_pad = static_cast<int>(in.padded.size());
    const int n = in.orig_len;

    if (config.task == Task::NoiseImpedance) {
        result.impedance = noise_impedance_curves(in.padded, config.sigma_list.front(),
                                                  config.recovery.iterations, config.recovery);
        result.manifest.push_back("impedance.n = " + std::to_string(n_pad));
        if (!config.output_dir.empty()) emit_outputs(result, config.output_dir);
        result.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return result;
    }

    // level descriptors: measurement counts or noise levels
    struct Level {
        std::string label;
        int m = 0;
        double sigma = 0.0;
        bool data_mask = false;
    };
    std::vector<Level> levels;
    if (config.task == Task::Denoise) {
        for (double s : config.sigma_list) levels.push_back({format_level(s), 0, s, false});
    } else if (config.task == Task::Impute && !in.data_missing.empty()) {
        // CSV blanks define the mask; the sweep collapses to one level
        levels.push_back({"data", n - static_cast<int>(in.data_missing.size()), 0.0, true});
    } else {
        for (int m : config.m_list) levels.push_back({std::to_string(m), m, 0.0, false});
    }

    for (size_t li = 0; li < levels.size(); ++li) {
        const Level& level = levels[li];
        const uint64_t level_seed =
            derive_seed(derive_seed(config.seed, task_tag(config.task)), static_cast<uint64_t>(li));

        // construct the operator and observation for this level
        MeasurementOperator op;
        std::vector<double> y;
        std::vector<int> missing;  // imputation metric support
        std::string build_error;
        try {
            switch (config.task) {
                case Task::Impute: {
                    if (level.data_mask) {
                        std::vector<int> kept;
                        std::set<int> miss(in.data_missing.begin(), in.data_missing.end());
                        for (int i = 0; i < n; ++i)
                            if (!miss.count(i)) kept.push_back(i);
                        op = make_identity_operator(n_pad);
                        op.kind = MeasurementKind::Mask;
                        op.m = static_cast<int>(kept.size());
                        op.indices = std::move(kept);
                        missing = in.data_missing;
                    } else {
                        if (level.m < 1 || level.m > n)
                            throw std::invalid_argument("m=" + level.label +
                                                        " out of range for signal length " +
                                                        std::to_string(n));
                        // sample kept indices over the real samples, not the padding
                        op = make_mask_operator(n, level.m, level_seed);
                        op.n = n_pad;
                        std::set<int> kept(op.indices.begin(), op.indices.end());
                        for (int i = 0; i < n; ++i)
                            if (!kept.count(i)) missing.push_back(i);
                    }
                    break;
                }
                case Task::CsGaussian:
                    if (level.m < 1) throw std::invalid_argument("m must be >= 1");
                    op = make_gaussian_operator(n_pad, level.m, level_seed);
                    break;
                case Task::CsDct:
                    if (level.m < 1 || level.m > n_pad)
                        throw std::invalid_argument("m=" + level.label + " out of range");
                    op = make_dct_operator(n_pad, level.m, level_seed);
                    break;
                default:
                    break;
            }
            y = op.apply(in.padded);
            if (config.task == Task::Denoise)
                y = add_awgn(y, level.sigma, derive_seed(level_seed, 0x5151));
        } catch (const std::exception& e) {
            build_error = e.what();
        }
        result.operator_notes.push_back("level " + level.label + ": " +
                                        (build_error.empty() ? op.describe() : "error"));

        for (const std::string& method : config.methods) {
            CellResult cell;
            cell.method = method;
            cell.level = level.label;
            try {
                if (!build_error.empty()) throw std::runtime_error(build_error);
                if (method == "spline" && config.task != Task::Impute)
                    throw std::invalid_argument("spline only applies to imputation");

                const bool gap_metric = config.task == Task::Impute;
                const bool have_truth = !level.data_mask;

                if (method == "dip") {
                    RecoveryConfig rc = config.recovery;
                    if (config.task == Task::Denoise) rc = denoise_config(level.sigma, rc);
                    const RecoveryResult rec = recover(y, op, rc);
                    int finished = 0;
                    double sum = 0.0;
                    for (const RestartResult& rr : rec.restarts) {
                        cell.curves.push_back(rr.loss_curve);
                        if (rr.diverged) {
                            cell.error += "restart " + std::to_string(&rr - rec.restarts.data()) +
                                          " diverged at iteration " + std::to_string(rr.diverged_at) +
                                          "; ";
                            continue;
                        }
                        if (have_truth) {
                            const std::vector<double> r = crop(rr.reconstruction, n);
                            const double v = gap_metric
                                                 ? imputation_mse(in.original.samples, r, missing)
                                                 : mse(in.original.samples, r);
                            cell.per_restart_mse.push_back(v);
                            sum += v;
                            ++finished;
                        }
                    }
                    if (finished > 0) cell.mean_mse = sum / finished;
                    if (rec.best_index >= 0)
                        cell.reconstruction = crop(rec.best_reconstruction, n);
                    else
                        throw std::runtime_error("all restarts diverged: " + cell.error);
                } else if (method == "lasso") {
                    const std::vector<double> xh = crop(lasso_dct(y, op, n_pad, config.lasso), n);
                    cell.reconstruction = xh;
                    if (have_truth) {
                        const double v = gap_metric
                                             ? imputation_mse(in.original.samples, xh, missing)
                                             : mse(in.original.samples, xh);
                        cell.per_restart_mse.push_back(v);
                        cell.mean_mse = v;
                    }
                } else {  // spline
                    const std::vector<double> xh = crop(spline_impute(y, op.indices, n_pad), n);
                    cell.reconstruction = xh;
                    if (have_truth) {
                        const double v = imputation_mse(in.original.samples, xh, missing);
                        cell.per_restart_mse.push_back(v);
                        cell.mean_mse = v;
                    }
                }
            } catch (const std::exception& e) {
                cell.error = e.what();
                result.any_failed = true;
            }
            result.cells.push_back(std::move(cell));
        }

        // third-party reconstructions merged into the same table
        for (const auto& [name, path] : config.external_results) {
            CellResult cell;
            cell.method = "external:" + name;
            cell.level = level.label;
            try {
                if (!build_error.empty()) throw std::runtime_error(build_error);
                const CsvSignal ext = load_csv(path, "0");
                if (static_cast<int>(ext.signal.samples.size()) < n)
                    throw std::runtime_error("external reconstruction shorter than the signal");
                std::vector<double> xh = crop(ext.signal.samples, n);
                cell.reconstruction = xh;
                if (!level.data_mask) {
                    const double v = config.task == Task::Impute
                                         ? imputation_mse(in.original.samples, xh, missing)
                                         : mse(in.original.samples, xh);
                    cell.per_restart_mse.push_back(v);
                    cell.mean_mse = v;
                }
            } catch (const std::exception& e) {
                cell.error = e.what();
                result.any_failed = true;
            }
            result.cells.push_back(std::move(cell));
        }
    }

    if (!config.output_dir.empty()) emit_outputs(result, config.output_dir);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

void emit_outputs(const ExperimentResult& result, const std::string& output_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw std::runtime_error(output_dir + ": cannot create output directory: " + ec.message());
    const auto path_of = [&](const std::string& name) { return (fs::path(output_dir) / name).string(); };

    {
        std::ofstream f(path_of("results.csv"));
        if (!f) throw std::runtime_error(path_of("results.csv") + ": cannot open for writing");
        f << "method,level,restart,mse,mean_mse,error\n";
        for (const CellResult& cell : result.cells) {
            const size_t rows = std::max<size_t>(cell.per_restart_mse.size(), 1);
            for (size_t r = 0; r < rows; ++r) {
                f << cell.method << ',' << cell.level << ',' << r << ',';
                if (r < cell.per_restart_mse.size()) f << format_double(cell.per_restart_mse[r]);
                f << ',';
                if (!std::isnan(cell.mean_mse)) f << format_double(cell.mean_mse);
                f << ',' << cell.error << '\n';
            }
        }
    }

    for (const CellResult& cell : result.cells) {
        if (!cell.reconstruction.empty())
            save_csv(path_of("recon_" + cell.method + "_" + cell.level + ".csv"),
                     {{"value", cell.reconstruction}});
        for (size_t r = 0; r < cell.curves.size(); ++r) {
            const std::vector<LossPoint>& curve = cell.curves[r];
            std::vector<double> iter(curve.size()), obj(curve.size()), fid(curve.size()),
                tv(curve.size());
            for (size_t i = 0; i < curve.size(); ++i) {
                iter[i] = static_cast<double>(i);
                obj[i] = curve[i].objective;
                fid[i] = curve[i].fidelity;
                tv[i] = curve[i].tv;
            }
            save_csv(path_of("curve_" + cell.method + "_" + cell.level + "_" + std::to_string(r) +
                             ".csv"),
                     {{"iteration", iter},
                      {"objective", obj},
                      {"fidelity", fid},
                      {"tv", tv}});
        }
    }

    if (!result.impedance.clean.empty()) {
        const NoiseImpedanceCurves& c = result.impedance;
        std::vector<double> iter(c.clean.size());
        for (size_t i = 0; i < iter.size(); ++i) iter[i] = static_cast<double>(i);
        save_csv(path_of("curve_impedance.csv"),
                 {{"iteration", iter}, {"clean", c.clean}, {"noise", c.noise}, {"sum", c.sum}});
    }

    {
        std::ofstream f(path_of("manifest.txt"));
        if (!f) throw std::runtime_error(path_of("manifest.txt") + ": cannot open for writing");
        for (const std::string& line : result.manifest) f << line << '\n';
        for (const std::string& line : result.operator_notes) f << "operator." << line << '\n';
    }
}

std::vector<std::string> config_to_manifest(const ExperimentConfig& c) {
    std::vector<std::string> out;
    out.push_back("task = " + std::string(task_name(c.task)));
    switch (c.input.kind) {
        case InputSpec::Kind::Wav:
            out.push_back("input.wav = " + c.input.path);
            break;
        case InputSpec::Kind::Csv:
            out.push_back("input.csv = " + c.input.path);
            out.push_back("input.column = " + c.input.column);
            break;
        case InputSpec::Kind::Chirp: {
            std::ostringstream s;
            s << "input.chirp = " << format_level(c.input.chirp.f0) << ','
              << format_level(c.input.chirp.f1) << ',' << c.input.chirp.n << ','
              << format_level(c.input.chirp.fs);
            out.push_back(s.str());
            break;
        }
    }
    if (!c.m_list.empty()) {
        std::string s = "m_list =";
        for (int m : c.m_list) s += " " + std::to_string(m);
        out.push_back(s);
    }
    if (!c.sigma_list.empty()) {
        std::string s = "sigma_list =";
        for (double v : c.sigma_list) s += " " + format_level(v);
        out.push_back(s);
    }
    {
        std::string s = "methods =";
        for (const std::string& m : c.methods) s += " " + m;
        out.push_back(s);
    }
    for (const auto& [name, path] : c.external_results)
        out.push_back("external." + name + " = " + path);
    out.push_back("seed = " + std::to_string(c.seed));
    const RecoveryConfig& r = c.recovery;
    out.push_back("recovery.learning_rate = " + format_level(r.learning_rate));
    out.push_back("recovery.momentum = " + format_level(r.momentum));
    out.push_back("recovery.weight_decay = " + format_level(r.weight_decay));
    out.push_back("recovery.tv_lambda = " + format_level(r.tv_lambda));
    out.push_back("recovery.iterations = " + std::to_string(r.iterations));
    out.push_back("recovery.restarts = " + std::to_string(r.restarts));
    out.push_back("recovery.filters_per_layer = " + std::to_string(r.filters_per_layer));
    out.push_back("recovery.rmsprop_smoothing = " + format_level(r.rmsprop_smoothing));
    out.push_back("recovery.rmsprop_epsilon = " + format_level(r.rmsprop_epsilon));
    out.push_back("recovery.seed = " + std::to_string(r.seed));
    out.push_back("lasso.alpha = " + format_level(c.lasso.alpha));
    out.push_back("lasso.max_iterations = " + std::to_string(c.lasso.max_iterations));
    out.push_back("lasso.tolerance = " + format_level(c.lasso.tolerance));
    return out;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open config file");
    ExperimentConfig cfg;
    cfg.methods.clear();
    std::string line;
    int lineno = 0;
    const auto bad = [&](const std::string& what) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(f, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const size_t eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos) bad("expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto strip = [](std::string& s) {
            const size_t a = s.find_first_not_of(" \t\r");
            const size_t b = s.find_last_not_of(" \t\r");
            s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
        };
        strip(key);
        strip(value);
        std::istringstream vs(value);
        try {
            if (key == "task") cfg.task = parse_task(value);
            else if (key == "input.wav") { cfg.input.kind = InputSpec::Kind::Wav; cfg.input.path = value; }
            else if (key == "input.csv") { cfg.input.kind = InputSpec::Kind::Csv; cfg.input.path = value; }
            else if (key == "input.column") cfg.input.column = value;
            else if (key == "input.chirp") {
                cfg.input.kind = InputSpec::Kind::Chirp;
                char comma;
                ChirpParams p;
                std::istringstream cs(value);
                if (!(cs >> p.f0 >> comma >> p.f1 >> comma >> p.n >> comma >> p.fs))
                    bad("input.chirp expects f0,f1,n,fs");
                cfg.input.chirp = p;
            }
            else if (key == "m_list") { int v; cfg.m_list.clear(); while (vs >> v) cfg.m_list.push_back(v); }
            else if (key == "sigma_list") { double v; cfg.sigma_list.clear(); while (vs >> v) cfg.sigma_list.push_back(v); }
            else if (key == "methods") { std::string v; while (vs >> v) cfg.methods.push_back(v); }
            else if (key.rfind("external.", 0) == 0) cfg.external_results.emplace_back(key.substr(9), value);
            else if (key == "seed") vs >> cfg.seed;
            else if (key == "output_dir") cfg.output_dir = value;
            else if (key == "recovery.learning_rate") vs >> cfg.recovery.learning_rate;
            else if (key == "recovery.momentum") vs >> cfg.recovery.momentum;
            else if (key == "recovery.weight_decay") vs >> cfg.recovery.weight_decay;
            else if (key == "recovery.tv_lambda") vs >> cfg.recovery.tv_lambda;
            else if (key == "recovery.iterations") vs >> cfg.recovery.iterations;
            else if (key == "recovery.restarts") vs >> cfg.recovery.restarts;
            else if (key == "recovery.filters_per_layer") vs >> cfg.recovery.filters_per_layer;
            else if (key == "recovery.rmsprop_smoothing") vs >> cfg.recovery.rmsprop_smoothing;
            else if (key == "recovery.rmsprop_epsilon") vs >> cfg.recovery.rmsprop_epsilon;
            else if (key == "recovery.seed") vs >> cfg.recovery.seed;
            else if (key == "lasso.alpha") vs >> cfg.lasso.alpha;
            else if (key == "lasso.max_iterations") vs >> cfg.lasso.max_iterations;
            else if (key == "lasso.tolerance") vs >> cfg.lasso.tolerance;
            else bad("unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            bad(e.what());
        }
    }
    if (cfg.methods.empty()) cfg.methods = {"dip"};
    // the recovery seed follows the experiment seed unless set explicitly
    if (cfg.recovery.seed == 0) cfg.recovery.seed = cfg.seed;
    return cfg;
}

}  // namespace dip1d
