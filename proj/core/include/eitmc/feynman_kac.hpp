#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "eitmc/boundary_data.hpp"
#include "eitmc/conductivity.hpp"
#include "eitmc/geometry.hpp"
#include "eitmc/reflecting_sde.hpp"

namespace eitmc {

// Universal return type of the Monte Carlo solvers.
struct EstimatorResult {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t n_paths = 0;
    double horizon_used = 0.0;
    double truncation_tail_bound = 0.0;
};

struct ContinuumOptions {
    double tolerance = 0.005;   // target for the ergodic truncation tail
    double c3_override = 0.0;   // 0: estimate the spectral gap numerically
    int gap_resolution = 48;    // oracle resolution for the gap estimate
};

// u(x) = E_x phi(X_tau) over first-exit paths.
EstimatorResult solve_dirichlet(Vec2 x, const BoundaryFunction& phi,
                                const ConductivityField& field,
                                const DomainGeometry& domain,
                                const SimulationParams& params,
                                std::uint64_t n_paths, int workers,
                                std::uint64_t stream_base = 0);

// u(x) = lim_t E_x int_0^t f dL, truncated at T = t0 + log(1/tol)/c3 with c3
// the first nonzero Neumann eigenvalue; requires kappa = 1 near the boundary.
EstimatorResult solve_continuum(Vec2 x, const NeumannData& data,
                                const ConductivityField& field,
                                const DomainGeometry& domain,
                                const SimulationParams& params,
                                std::uint64_t n_paths, int workers,
                                const ContinuumOptions& options = {},
                                std::uint64_t stream_base = 0);

// u(x) = E_x int_0^inf e_g(t) f(X_t) dL_t, accumulated until the discount
// falls below the kill threshold.
EstimatorResult solve_cem(Vec2 x, const ElectrodeConfig& electrodes,
                          const ConductivityField& field,
                          const DomainGeometry& domain,
                          const SimulationParams& params,
                          std::uint64_t n_paths, int workers,
                          std::uint64_t stream_base = 0);

// Robin data: f and g on the boundary, the electrode model being the
// piecewise constant special case.
struct RobinData {
    BoundaryFunction f;
    BoundaryFunction g;

    static RobinData from_electrodes(std::shared_ptr<const ElectrodeConfig> e) {
        return {BoundaryFunction::electrode_current(e),
                BoundaryFunction::electrode_indicator(std::move(e))};
    }
};

// Mean and standard error of
//   M_t(u) = u(X_t) - u(x) - int_0^t g u dL + int_0^t f dL
// for each t in t_grid; zero in expectation iff u solves the Robin problem.
std::vector<EstimatorResult> martingale_residual(
    const std::function<double(Vec2)>& u_candidate, const RobinData& data,
    const ConductivityField& field, const DomainGeometry& domain,
    const SimulationParams& params, const std::vector<double>& t_grid, Vec2 x,
    std::uint64_t n_paths, int workers);

std::vector<EstimatorResult> martingale_residual(
    const std::function<double(Vec2)>& u_candidate,
    const ElectrodeConfig& electrodes, const ConductivityField& field,
    const DomainGeometry& domain, const SimulationParams& params,
    const std::vector<double>& t_grid, Vec2 x, std::uint64_t n_paths,
    int workers);

struct OccupationCheckResult {
    EstimatorResult mc;
    double reference = 0.0;
    double z_score = 0.0;
};

// Uniform-start E int_0^t phi dL against the stationary Revuz value
// t * int phi dsigma / |D| (the transient term vanishes for uniform starts).
OccupationCheckResult occupation_check(const BoundaryFunction& phi, double t,
                                       const ConductivityField& field,
                                       const DomainGeometry& domain,
                                       const SimulationParams& params,
                                       std::uint64_t n_paths, int workers);

}  // namespace eitmc
