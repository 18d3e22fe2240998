#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dip1d/harness.hpp"

namespace {

using dip1d::ExperimentConfig;

void add_common_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& wav, std::string& csv,
                        std::string& column, std::vector<double>& chirp,
                        std::vector<std::string>& externals, std::string& config_path) {
    cmd->add_option("--config", config_path, "key=value config file; flags override its values");
    cmd->add_option("--wav", wav, "input WAV file (PCM, mono or multichannel)");
    cmd->add_option("--csv", csv, "input CSV file");
    cmd->add_option("--column", column, "CSV column name or 0-based index")->default_val("0");
    cmd->add_option("--chirp", chirp, "synthetic chirp f0,f1,n,fs")->delimiter(',')->expected(4);
    cmd->add_option("--m", cfg.m_list, "measurement counts to sweep")->delimiter(',');
    cmd->add_option("--sigma", cfg.sigma_list, "noise standard deviations to sweep")->delimiter(',');
    cmd->add_option("--methods", cfg.methods, "methods to run: dip,lasso,spline")->delimiter(',');
    cmd->add_option("--external", externals,
                    "name=path.csv reconstruction produced elsewhere, merged into the table");
    cmd->add_option("--seed", cfg.seed, "master seed for operators and restarts");
    cmd->add_option("--out", cfg.output_dir, "output directory (default $DIP1D_OUT or ./results)");
    cmd->add_option("--iterations", cfg.recovery.iterations, "optimization steps per restart");
    cmd->add_option("--restarts", cfg.recovery.restarts, "independent generator restarts");
    cmd->add_option("--filters", cfg.recovery.filters_per_layer, "convolution filters per layer");
    cmd->add_option("--lr", cfg.recovery.learning_rate, "RMSProp learning rate");
    cmd->add_option("--momentum", cfg.recovery.momentum, "RMSProp momentum");
    cmd->add_option("--weight-decay", cfg.recovery.weight_decay, "coupled L2 weight decay");
    cmd->add_option("--tv-lambda", cfg.recovery.tv_lambda, "total-variation weight");
    cmd->add_option("--alpha", cfg.lasso.alpha, "Lasso l1 weight");
    cmd->add_option("--lasso-iters", cfg.lasso.max_iterations, "Lasso FISTA iteration cap");
    cmd->add_option("--lasso-tol", cfg.lasso.tolerance, "Lasso relative-change stop tolerance");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dip1d: time series recovery with an untrained 1D convolutional prior"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    cfg.methods.clear();
    std::string wav, csv, column = "0", config_path;
    std::vector<double> chirp;
    std::vector<std::string> externals;

    for (const char* name : {"impute", "cs-gaussian", "cs-dct", "denoise", "noise-impedance"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        add_common_options(sub, cfg, wav, csv, column, chirp, externals, config_path);
    }

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();

    try {
        if (!config_path.empty()) {
            // file first, then replay command-line values over it
            ExperimentConfig file_cfg = dip1d::parse_config_file(config_path);
            const ExperimentConfig cli_cfg = cfg;
            cfg = file_cfg;
            if (!cli_cfg.m_list.empty()) cfg.m_list = cli_cfg.m_list;
            if (!cli_cfg.sigma_list.empty()) cfg.sigma_list = cli_cfg.sigma_list;
            if (!cli_cfg.methods.empty()) cfg.methods = cli_cfg.methods;
            if (sub->count("--seed")) cfg.seed = cli_cfg.seed;
            if (!cli_cfg.output_dir.empty()) cfg.output_dir = cli_cfg.output_dir;
            for (const char* flag : {"--iterations", "--restarts", "--filters", "--lr", "--momentum",
                                     "--weight-decay", "--tv-lambda", "--alpha", "--lasso-iters",
                                     "--lasso-tol"})
                if (sub->count(flag))
                    throw std::runtime_error(std::string(flag) +
                                             " with --config is ambiguous; set it in the file");
        }
        cfg.task = dip1d::parse_task(sub->get_name());
        if (!wav.empty()) {
            cfg.input.kind = dip1d::InputSpec::Kind::Wav;
            cfg.input.path = wav;
        } else if (!csv.empty()) {
            cfg.input.kind = dip1d::InputSpec::Kind::Csv;
            cfg.input.path = csv;
            cfg.input.column = column;
        } else if (!chirp.empty()) {
            cfg.input.kind = dip1d::InputSpec::Kind::Chirp;
            cfg.input.chirp = {chirp[0], chirp[1], static_cast<int>(chirp[2]), chirp[3]};
        } else if (config_path.empty()) {
            std::cerr << "error: no input given (--wav, --csv, or --chirp)\n";
            return 2;
        }
        for (const std::string& e : externals) {
            const size_t eq = e.find('=');
            if (eq == std::string::npos) {
                std::cerr << "error: --external expects name=path.csv, got '" << e << "'\n";
                return 2;
            }
            cfg.external_results.emplace_back(e.substr(0, eq), e.substr(eq + 1));
        }
        if (cfg.methods.empty()) cfg.methods = {"dip"};
        if (cfg.output_dir.empty()) {
            const char* env = std::getenv("DIP1D_OUT");
            cfg.output_dir = env && *env ? env : "results";
        }
        if (cfg.recovery.seed == 0) cfg.recovery.seed = cfg.seed;

        const dip1d::ExperimentResult result = dip1d::run_experiment(cfg);

        std::cout << "method,level,mean_mse\n";
        for (const dip1d::CellResult& cell : result.cells) {
            std::cout << cell.method << ',' << cell.level << ',';
            if (!cell.error.empty())
                std::cout << "FAILED (" << cell.error << ")";
            else if (!std::isnan(cell.mean_mse))
                std::cout << cell.mean_mse;
            std::cout << '\n';
        }
        std::cout << "outputs written to " << cfg.output_dir << " (" << result.wall_seconds
                  << " s)\n";
        return result.any_failed ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
