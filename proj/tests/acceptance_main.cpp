// Acceptance suite runner: one pass/fail line per criterion, exit code 0 only
// when everything passes.
//
// Usage: eitmc_acceptance [--workers N] [--scale S] [--seed N] [--only k[,k...]]

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "eitmc/acceptance.hpp"

int main(int argc, char** argv) {
    eitmc::AcceptanceOptions opts;
    opts.workers = 8;
    opts.progress = &std::cout;

    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        const auto next = [&]() -> std::string {
            if (i + 1 >= argc) {
                std::cerr << "missing value for " << arg << "\n";
                std::exit(2);
            }
            return argv[++i];
        };
        if (arg == "--workers") {
            opts.workers = std::atoi(next().c_str());
        } else if (arg == "--scale") {
            opts.scale = std::atof(next().c_str());
        } else if (arg == "--seed") {
            opts.seed = std::strtoull(next().c_str(), nullptr, 10);
        } else if (arg == "--only") {
            std::stringstream list(next());
            std::string tok;
            while (std::getline(list, tok, ','))
                opts.only.push_back(std::atoi(tok.c_str()));
        } else {
            std::cerr << "unknown argument: " << arg << "\n";
            return 2;
        }
    }

    const auto results = eitmc::run_acceptance(opts);
    std::size_t passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return eitmc::all_passed(results) ? 0 : 1;
}
