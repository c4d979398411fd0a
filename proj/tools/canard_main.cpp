// Command-line front end; links the shared library through its C API only.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <string>

#include "canard.h"

namespace {

int exit_code_for(canard_status st) {
    switch (st) {
        case CANARD_OK: return 0;
        case CANARD_ERR_USAGE: return 1;
        case CANARD_ERR_DEGENERATE_CLASSIFICATION: return 2;
        case CANARD_ERR_VERIFICATION_FAILED: return 3;
        default: return 4;
    }
}

int run(const char* command, const std::string& config, const std::string& out_dir,
        double epsilon) {
    char* summary = nullptr;
    const canard_status st = canard_run(command, config.c_str(),
                                        out_dir.empty() ? nullptr : out_dir.c_str(), epsilon,
                                        &summary);
    if (summary) {
        std::printf("%s\n", summary);
        canard_string_free(summary);
    }
    if (st != CANARD_OK)
        std::fprintf(stderr, "canard %s: %s: %s\n", command, canard_status_name(st),
                     canard_last_error());
    return exit_code_for(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slow-fast predator-prey analysis: classification, entry-exit prediction, "
                 "stiff integration and bound verification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(canard_version()));

    std::string config, out_dir;
    double epsilon = std::nan("");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config, "path to the run configuration (JSON)")
            ->required();
        cmd->add_option("--out", out_dir, "output directory (default: config out_dir)");
    };

    CLI::App* classify = app.add_subcommand("classify", "print the case label");
    add_common(classify);
    CLI::App* analyze =
        app.add_subcommand("analyze", "entry-exit profile, crossing and exit times");
    add_common(analyze);
    CLI::App* simulate = app.add_subcommand("simulate", "integrate the full system at one eps");
    add_common(simulate);
    simulate->add_option("--epsilon", epsilon, "perturbation parameter in (0, 0.2]");
    CLI::App* sweep = app.add_subcommand("sweep", "switch-time convergence over the eps ladder");
    add_common(sweep);
    CLI::App* verify =
        app.add_subcommand("verify", "assumptions, oracle cross-checks and sandwich bounds");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (classify->parsed()) return run("classify", config, out_dir, epsilon);
    if (analyze->parsed()) return run("analyze", config, out_dir, epsilon);
    if (simulate->parsed()) return run("simulate", config, out_dir, epsilon);
    if (sweep->parsed()) return run("sweep", config, out_dir, epsilon);
    if (verify->parsed()) return run("verify", config, out_dir, epsilon);
    return 1;
}
