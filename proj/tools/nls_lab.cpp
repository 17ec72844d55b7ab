#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "nls/config.hpp"
#include "nls/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nls-lab: spectral simulator and variational analysis toolkit for "
                 "generalized NLS with potential, local nonlinearity and Hartree term"};
    app.set_version_flag("--version", nls::kArtifactVersion);

    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int threads = 0;
    bool quiet = false;

    CLI::App* run = app.add_subcommand("run", "execute a run config");
    run->add_option("config", config_path, "path to the JSON run config")->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");
    run->add_option("--seed", seed, "RNG seed (overrides config)");
    run->add_option("--threads", threads, "OpenMP thread count (default: NLS_LAB_THREADS or all)");
    run->add_flag("--quiet", quiet, "suppress progress messages");
    app.require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    if (threads <= 0) {
        if (const char* env = std::getenv("NLS_LAB_THREADS")) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);

    std::string bytes;
    nls::RunConfig cfg;
    try {
        bytes = nls::read_text_file(config_path);
        cfg = nls::RunConfig::parse_text(bytes);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

    return nls::run_config(cfg, bytes, quiet).exit_code;
}
