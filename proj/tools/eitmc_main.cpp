#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eitmc/errors.hpp"
#include "eitmc/run_config.hpp"
#include "eitmc/runner.hpp"
#include "eitmc/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config_path,
                                "run configuration file");
    if (config_required) opt->required();
    cmd->add_option("--seed", args.seed, "override sim.seed");
    cmd->add_option("--workers", args.workers, "override sim.workers");
    cmd->add_option("--out", args.out_dir, "override output.dir");
}

int dispatch(const std::string& name, const CommonArgs& args) {
    eitmc::RunConfig config;
    try {
        if (!args.config_path.empty())
            config = eitmc::RunConfig::parse_file(args.config_path);
        if (args.seed >= 0) {
            config.params.seed = static_cast<std::uint64_t>(args.seed);
            config.raw["sim.seed"] = std::to_string(args.seed);
        }
        if (args.workers > 0) {
            config.workers = args.workers;
            config.raw["sim.workers"] = std::to_string(args.workers);
        }
        if (!args.out_dir.empty()) {
            config.output_dir = args.out_dir;
            config.raw["output.dir"] = args.out_dir;
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    return eitmc::run_and_write(name, config, args.config_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo forward solver for electrical impedance "
                 "tomography via reflecting diffusions"};
    app.set_version_flag("--version", eitmc::kVersion);
    app.require_subcommand(1);

    const std::vector<std::string> solver_cmds = {
        "solve-dirichlet", "solve-continuum", "solve-cem", "estimate-dtn",
        "boundary-trace",  "jump-kernel",     "calibrate",  "oracle"};
    std::vector<CommonArgs> args(solver_cmds.size() + 1);

    for (std::size_t i = 0; i < solver_cmds.size(); ++i) {
        auto* cmd = app.add_subcommand(solver_cmds[i]);
        add_common(cmd, args[i], true);
        cmd->callback([&, i] { std::exit(dispatch(solver_cmds[i], args[i])); });
    }
    auto* validate = app.add_subcommand(
        "validate", "run the full acceptance suite (exit 3 on failure)");
    add_common(validate, args.back(), false);
    validate->callback(
        [&] { std::exit(dispatch("validate", args.back())); });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
