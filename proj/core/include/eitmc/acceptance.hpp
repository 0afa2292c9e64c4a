#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace eitmc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double dt = 0.0;
    std::string detail;
};

struct AcceptanceOptions {
    int workers = 8;
    std::uint64_t seed = 20240811;
    double scale = 1.0;          // multiplies the path budgets
    std::vector<int> only;       // empty: run everything
    std::ostream* progress = nullptr;
};

// Runs the oracle- and property-based acceptance criteria; one result per
// criterion, in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace eitmc
