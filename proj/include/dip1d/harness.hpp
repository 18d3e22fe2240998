#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dip1d/baselines.hpp"
#include "dip1d/recovery.hpp"
#include "dip1d/signal_io.hpp"

namespace dip1d {

enum class Task { Impute, CsGaussian, CsDct, Denoise, NoiseImpedance };

const char* task_name(Task t);
Task parse_task(const std::string& name);

struct ChirpParams {
    double f0 = 750.0;
    double f1 = 250.0;
    int n = 16384;
    double fs = 8192.0;
};

/// Where the experiment signal comes from.
struct InputSpec {
    enum class Kind { Wav, Csv, Chirp } kind = Kind::Chirp;
    std::string path;
    std::string column;  // CSV only
    ChirpParams chirp;
};

struct ExperimentConfig {
    Task task = Task::Impute;
    InputSpec input;
    std::vector<int> m_list;          // measurement counts (impute / cs tasks)
    std::vector<double> sigma_list;   // noise levels (denoise / noise-impedance)
    RecoveryConfig recovery;
    LassoConfig lasso;
    std::vector<std::string> methods = {"dip"};
    std::vector<std::pair<std::string, std::string>> external_results;  // name -> csv path
    std::string output_dir;
    uint64_t seed = 0;

    void validate() const;
};

/// One (method, level) entry of the result table.
struct CellResult {
    std::string method;
    std::string level;  // "1000" or "0.1"
    std::vector<double> per_restart_mse;  // one entry for single-shot methods
    double mean_mse = std::numeric_limits<double>::quiet_NaN();
    std::string error;  // non-empty if this cell failed
    std::vector<double> reconstruction;            // cropped to the input length
    std::vector<std::vector<LossPoint>> curves;    // per restart (dip only)
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    std::vector<std::string> operator_notes;  // replayable operator descriptions per level
    NoiseImpedanceCurves impedance;           // noise-impedance task only
    std::vector<std::string> manifest;        // config echo, key=value lines
    double wall_seconds = 0.0;                // in-memory only; never written to files
    bool any_failed = false;
};

/// Mean of squared differences (normalized by n).
double mse(const std::vector<double>& x, const std::vector<double>& x_hat);

/// Mean of squared differences over the missing index set only; values at
/// kept indices are ignored entirely.
double imputation_mse(const std::vector<double>& x, const std::vector<double>& x_hat,
                      const std::vector<int>& missing);

/// Runs the configured sweep: loads and normalizes the input, constructs
/// the per-level operator (seeded from (seed, task, level)), runs each
/// selected method, and computes the task metric. Cell failures are
/// recorded, not fatal. Writes outputs when output_dir is set.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes results.csv, per-restart loss curves, reconstructions, and
/// manifest.txt into output_dir. Output is a pure function of the result.
void emit_outputs(const ExperimentResult& result, const std::string& output_dir);

/// Flat key=value config format (one key per line, '#' comments).
ExperimentConfig parse_config_file(const std::string& path);
std::vector<std::string> config_to_manifest(const ExperimentConfig& config);

}  // namespace dip1d
