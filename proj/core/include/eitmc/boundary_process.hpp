#pragma once

#include <cstdint>
#include <vector>

#include "eitmc/boundary_data.hpp"
#include "eitmc/conductivity.hpp"
#include "eitmc/geometry.hpp"
#include "eitmc/reflecting_sde.hpp"

namespace eitmc {

// Sparse record of the local-time increments along one path: cumulative level
// after each increment, together with the step time at which it happened.
struct LocalTimeLedger {
    std::vector<double> times;
    std::vector<double> levels;
    double final_time = 0.0;

    void record(double t, double cumulative_level) {
        times.push_back(t);
        levels.push_back(cumulative_level);
    }
    double final_level() const { return levels.empty() ? 0.0 : levels.back(); }
};

// Discrete right-continuous right-inverse of t -> L_t: the first step time at
// which the accumulated local time exceeds s. Throws LocalTimeExhausted when
// the path ended before reaching s.
double inverse_local_time(const LocalTimeLedger& ledger, double s);

struct TraceSample {
    double s;  // local-time parameter
    BoundaryPoint point;
};

struct TraceJump {
    double s;
    BoundaryPoint from;
    BoundaryPoint to;
    double gap;  // Euclidean jump size
};

// The time-changed boundary trace of one reflected path, sampled on an s-grid.
struct BoundaryTrace {
    std::vector<TraceSample> samples;  // s strictly increasing, starts at 0
    std::vector<TraceJump> jumps;
    double sample_spacing = 0.0;
    double horizon = 0.0;           // requested local-time horizon
    double jump_threshold = 0.0;
    double wall_time = 0.0;         // physical time consumed by the trace
};

struct TraceOptions {
    double sample_spacing = 0.01;  // delta s
    double jump_threshold = 0.0;   // 0: 10 * sqrt(ds * dt / rho) heuristic
    double max_time = 0.0;         // 0: generous default safety cap
};

BoundaryTrace trace_path(const BoundaryPoint& start, double horizon,
                         const ConductivityField& field,
                         const DomainGeometry& domain,
                         const SimulationParams& params,
                         const TraceOptions& options, RandomStream& rng);

struct DtnSample {
    double arc = 0.0;
    Vec2 position;
    double value = 0.0;
    double stderr_ = 0.0;
    double mean_level = 0.0;  // realized local-time divisor
};

// Generator estimate of the Dirichlet-to-Neumann map at boundary grid points:
//   Lambda phi(x) ~ (phi(x) - E phi(Xhat_t)) / t
// with the realized mean local time as the divisor.
std::vector<DtnSample> estimate_dtn(const BoundaryFunction& phi, double t,
                                    const ConductivityField& field,
                                    const DomainGeometry& domain,
                                    const SimulationParams& params,
                                    std::uint64_t n_paths_per_start,
                                    std::size_t start_grid, int workers);

struct DriftSample {
    double arc = 0.0;
    Vec2 position;
    Vec2 b;
    Vec2 stderr_;
};

// b = Lambda_kappa id, estimated coordinate-wise.
std::vector<DriftSample> drift_field(const ConductivityField& field,
                                     const DomainGeometry& domain,
                                     const SimulationParams& params,
                                     std::uint64_t n_paths_per_start,
                                     std::size_t start_grid, int workers);

// Binned jump-intensity estimate via the Levy system normalization
// N(x,y) ~ counts / (2 * exposure * bin measure).
struct JumpKernelEstimate {
    std::size_t n_bins = 0;
    double bin_width = 0.0;
    std::vector<double> exposure;  // per source bin, local-time units
    std::vector<double> counts;    // row-major [from * n_bins + to]
    std::vector<double> estimate;

    double count(std::size_t from, std::size_t to) const {
        return counts[from * n_bins + to];
    }
    double kernel(std::size_t from, std::size_t to) const {
        return estimate[from * n_bins + to];
    }
};

// min_gap = 0 keeps every recorded jump; larger values re-threshold.
JumpKernelEstimate jump_statistics(const std::vector<BoundaryTrace>& traces,
                                   std::size_t n_bins,
                                   const DomainGeometry& domain,
                                   double min_gap = 0.0);

}  // namespace eitmc
