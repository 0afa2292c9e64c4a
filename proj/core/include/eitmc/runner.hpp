#pragma once

#include <string>
#include <vector>

#include "eitmc/run_config.hpp"

namespace eitmc {

struct ReportFile {
    std::string name;
    std::string content;
};

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 1 config error, 2 simulation error, 3 acceptance
    std::vector<ReportFile> reports;
    std::string error;
};

// Known subcommands: solve-dirichlet, solve-continuum, solve-cem,
// estimate-dtn, boundary-trace, jump-kernel, calibrate, oracle, validate.
RunOutcome execute_subcommand(const std::string& subcommand,
                              const RunConfig& config);

// Executes, writes the reports plus a JSON run manifest under
// config.output_dir, and returns the exit code.
int run_and_write(const std::string& subcommand, const RunConfig& config,
                  const std::string& config_path);

}  // namespace eitmc
