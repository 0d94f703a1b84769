#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mwlab/harness.hpp"

namespace {

struct Args {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool refine = false;
    bool serial = false;
};

void write_error_manifest(const std::string& out_dir, const std::string& message) {
    if (out_dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) return;
    std::ofstream manifest(out_dir + "/manifest.json", std::ios::trunc);
    manifest << nlohmann::json{{"error", message}}.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mwlab — numerical laboratory for matrix A2 weights, heat extensions, "
                 "Riesz transform squares, martingale transforms, and Bellman checks"};
    app.require_subcommand(1);

    Args args;
    const char* experiments[] = {"a2h",        "riesz_norm",    "lp",        "duality",
                                 "martingale", "bellman_sweep", "full_sweep"};
    const char* descriptions[] = {
        "heat A2 characteristic of a weight",
        "weighted norms of signed Riesz-square sums",
        "Littlewood-Paley ratio sweep over calibrated weights",
        "quadratic form vs. heat-gradient pairing identity",
        "dyadic martingale transform norm sweep",
        "Bellman size-bound sweep over witness configurations",
        "characteristic-vs-norm sweep with constant fit",
    };
    for (int i = 0; i < 7; ++i) {
        CLI::App* sub = app.add_subcommand(experiments[i], descriptions[i]);
        sub->add_option("--config", args.config, "JSON experiment config")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", args.out, "output directory (overrides config)");
        CLI::Option* seed = sub->add_option("--seed", args.seed, "root seed (overrides config)");
        sub->add_flag("--refine", args.refine,
                      "run the doubled-resolution stability check after the experiment");
        sub->add_flag("--serial", args.serial, "disable the OpenMP kernels");
        sub->callback([seed, &args] { args.seed_set = seed->count() > 0; });
    }

    CLI11_PARSE(app, argc, argv);
    const std::string experiment = app.get_subcommands().front()->get_name();
    std::string out_dir;

    try {
        mwlab::ExperimentConfig config = mwlab::ExperimentConfig::from_file(args.config);
        config.experiment = mwlab::experiment_from_string(experiment);
        if (!args.out.empty()) config.out = args.out;
        if (args.seed_set) config.seed = args.seed;
        out_dir = config.out;
        const mwlab::Exec exec = args.serial ? mwlab::Exec::serial : mwlab::Exec::par;

        const mwlab::RunResult result = mwlab::run(config, exec);
        std::printf("%s: headline %.12g\n", experiment.c_str(), result.headline);
        for (const std::string& path : result.outputs) std::printf("  wrote %s\n", path.c_str());

        if (args.refine) {
            const mwlab::StabilityReport report = mwlab::stability_check(config, exec);
            std::ofstream sj(config.out + "/stability.json", std::ios::trunc);
            sj << report.details.dump(2) << "\n";
            std::printf("stability: base %.12g refined %.12g drift %.3g%% -> %s\n",
                        report.base, report.refined, 100.0 * report.drift,
                        report.pass ? "pass" : "FAIL");
        }
        return 0;
    } catch (const mwlab::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mwlab::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        write_error_manifest(out_dir, e.what());
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_manifest(out_dir, e.what());
        return 3;
    }
}
