// Experiment driver: one subcommand per experiment kind, all funneling into
// run_experiment.  Exit codes: 0 success, 1 a gating check failed, 2 bad
// usage or config, 3 a run failed (see manifest.json in the run directory).
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "hjlab/errors.hpp"
#include "hjlab/io.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    long long seed = -1; // -1: keep the config's seed
    int jobs = 1;
    double tol_override = 0.0; // 0: keep the config's tolerance
};

void add_common(CLI::App *cmd, CommonFlags &f) {
    cmd->add_option("--config", f.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out_dir,
                    "run directory (default: $HJLAB_OUT_ROOT/<config stem>)");
    cmd->add_option("--seed", f.seed, "override the config's seed");
    cmd->add_option("--jobs", f.jobs, "parallel sub-runs")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol-override", f.tol_override,
                    "override the config's tolerance")
        ->check(CLI::PositiveNumber);
}

int run_kind(const std::string &kind, const CommonFlags &f) {
    hjlab::ExperimentConfig cfg;
    try {
        cfg = hjlab::load_config(f.config_path);
    } catch (const hjlab::Error &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    if (cfg.kind != kind) {
        std::fprintf(stderr,
                     "config error: %s declares kind \"%s\" but the %s "
                     "subcommand was invoked\n",
                     f.config_path.c_str(), cfg.kind.c_str(), kind.c_str());
        return 2;
    }
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    if (f.tol_override > 0) cfg.tol = f.tol_override;

    const std::string out = !f.out_dir.empty() ? f.out_dir : cfg.output_dir;
    const hjlab::RunResult r = hjlab::run_experiment(cfg, out, f.jobs);
    std::printf("%s: %s (results in %s)\n", kind.c_str(),
                r.exit_code == 0   ? "ok"
                : r.exit_code == 1 ? "FAILED gating checks"
                                   : "ERROR (see manifest.json)",
                r.out_dir.c_str());
    return r.exit_code;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"hjlab: junction Hamilton-Jacobi homogenization experiments"};
    app.require_subcommand(1);

    const char *kinds[] = {"cauchy", "effective_hamiltonian", "flux_limiter",
                           "epsilon_sweep", "traffic_checks"};
    const char *blurbs[] = {
        "solve one junction Cauchy problem and dump snapshots",
        "tabulate H_bar(p) for a periodic Hamiltonian field",
        "estimate the effective flux limiter A_bar with brackets",
        "compare oscillatory solutions against the effective limit",
        "run the traffic-scenario check battery"};

    CommonFlags flags[5];
    CLI::App *cmds[5];
    for (int i = 0; i < 5; ++i) {
        cmds[i] = app.add_subcommand(kinds[i], blurbs[i]);
        add_common(cmds[i], flags[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    for (int i = 0; i < 5; ++i)
        if (cmds[i]->parsed()) return run_kind(kinds[i], flags[i]);
    return 2; // unreachable: require_subcommand(1)
}
