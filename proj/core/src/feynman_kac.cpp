#include "eitmc/feynman_kac.hpp"

#include <algorithm>
#include <cmath>

#include "eitmc/errors.hpp"
#include "eitmc/parallel.hpp"
#include "eitmc/pde_oracle.hpp"

namespace eitmc {

namespace {

EstimatorResult from_stat(const RunningStat& s) {
    EstimatorResult r;
    r.mean = s.mean;
    r.stderr_ = s.standard_error();
    r.n_paths = s.n;
    return r;
}

double default_exit_horizon(const SimulationParams& params,
                            const DomainGeometry& domain) {
    return params.max_time > 0.0
               ? params.max_time
               : 100.0 * domain.diameter() * domain.diameter();
}

}  // namespace

EstimatorResult solve_dirichlet(Vec2 x, const BoundaryFunction& phi,
                                const ConductivityField& field,
                                const DomainGeometry& domain,
                                const SimulationParams& params,
                                std::uint64_t n_paths, int workers,
                                std::uint64_t stream_base) {
    const double horizon = default_exit_horizon(params, domain);
    const auto stats = run_paths(
        n_paths, 2, workers, [&](std::uint64_t p, std::span<double> out) {
            RandomStream rng(params.seed, stream_base + p);
            const FirstExit e = first_exit(x, field, domain, params, horizon, rng);
            out[0] = phi(e.exit_point);
            out[1] = e.exit_time;
        });
    EstimatorResult r = from_stat(stats[0]);
    r.horizon_used = stats[1].mean;  // mean absorption time
    return r;
}

EstimatorResult solve_continuum(Vec2 x, const NeumannData& data,
                                const ConductivityField& field,
                                const DomainGeometry& domain,
                                const SimulationParams& params,
                                std::uint64_t n_paths, int workers,
                                const ContinuumOptions& options,
                                std::uint64_t stream_base) {
    if (!field.identity_near_boundary())
        throw MissingCollar(
            "the continuum representation requires kappa = 1 near the boundary");
    data.validate(domain);

    const double c3 = options.c3_override > 0.0
                          ? options.c3_override
                          : spectral_gap(domain, field, options.gap_resolution);
    const double t0 = 1.0 / c3;
    const double horizon = t0 + std::log(1.0 / options.tolerance) / c3;

    const BoundaryFunction& f = data.f;
    const auto stats = run_paths(
        n_paths, 1, workers, [&](std::uint64_t p, std::span<double> out) {
            RandomStream rng(params.seed, stream_base + p);
            double acc = 0.0;
            run_reflected(x, field, domain, params, horizon, rng, nullptr,
                          [&](const PathState&, const PathState&, double dL,
                              const BoundaryPoint* contact) {
                              if (contact != nullptr) acc += f(*contact) * dL;
                              return true;
                          });
            out[0] = acc;
        });

    EstimatorResult r = from_stat(stats[0]);
    r.horizon_used = horizon;
    r.truncation_tail_bound = std::exp(-c3 * (horizon - t0));
    return r;
}

EstimatorResult solve_cem(Vec2 x, const ElectrodeConfig& electrodes,
                          const ConductivityField& field,
                          const DomainGeometry& domain,
                          const SimulationParams& params,
                          std::uint64_t n_paths, int workers,
                          std::uint64_t stream_base) {
    const double horizon = params.max_time > 0.0
                               ? params.max_time
                               : 1e4 * domain.diameter() * domain.diameter();
    const BoundaryScalarFn g = [&electrodes](const BoundaryPoint& p) {
        return electrodes.g_at(p);
    };
    double f_sup = 0.0;
    for (const double u : electrodes.voltages())
        f_sup = std::max(f_sup, std::abs(u));
    f_sup /= electrodes.contact_impedance();

    // outputs: functional, gauge mass int e_g dL, termination time
    const auto stats = run_paths(
        n_paths, 3, workers, [&](std::uint64_t p, std::span<double> out) {
            RandomStream rng(params.seed, stream_base + p);
            double acc = 0.0, gauge = 0.0;
            const PathState end = run_reflected(
                x, field, domain, params, horizon, rng, &g,
                [&](const PathState& before, const PathState& after, double dL,
                    const BoundaryPoint* contact) {
                    if (contact != nullptr) {
                        const double gv = electrodes.g_at(*contact);
                        const double fv = electrodes.f_at(*contact);
                        if (gv > 0.0) {
                            // int e_g f dL over this increment, exactly:
                            // f/g * (e_before - e_after)
                            const double de = before.discount - after.discount;
                            acc += fv / gv * de;
                            gauge += de / gv;
                        } else {
                            acc += fv * before.discount * dL;
                            gauge += before.discount * dL;
                        }
                    }
                    return true;
                });
            out[0] = acc;
            out[1] = gauge;
            out[2] = end.time;
        });

    EstimatorResult r = from_stat(stats[0]);
    r.horizon_used = stats[2].mean;
    r.truncation_tail_bound = params.kill_threshold * f_sup * stats[1].mean;
    return r;
}

std::vector<EstimatorResult> martingale_residual(
    const std::function<double(Vec2)>& u_candidate, const RobinData& data,
    const ConductivityField& field, const DomainGeometry& domain,
    const SimulationParams& params, const std::vector<double>& t_grid, Vec2 x,
    std::uint64_t n_paths, int workers) {
    if (t_grid.empty()) return {};
    std::vector<double> grid = t_grid;
    std::sort(grid.begin(), grid.end());
    const double horizon = grid.back();
    const double u0 = u_candidate(x);

    const auto stats = run_paths(
        n_paths, grid.size(), workers,
        [&](std::uint64_t p, std::span<double> out) {
            RandomStream rng(params.seed, p);
            double int_f = 0.0, int_gu = 0.0;
            std::size_t k = 0;
            run_reflected(
                x, field, domain, params, horizon + params.resolved_dt(domain),
                rng, nullptr,
                [&](const PathState&, const PathState& after, double dL,
                    const BoundaryPoint* contact) {
                    if (contact != nullptr) {
                        int_f += data.f(*contact) * dL;
                        int_gu += data.g(*contact) *
                                  u_candidate(contact->position) * dL;
                    }
                    while (k < grid.size() && after.time >= grid[k]) {
                        out[k] = u_candidate(after.position) - u0 - int_gu + int_f;
                        ++k;
                    }
                    return k < grid.size();
                });
        });

    std::vector<EstimatorResult> results;
    results.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EstimatorResult r = from_stat(stats[k]);
        r.horizon_used = grid[k];
        results.push_back(r);
    }
    return results;
}

std::vector<EstimatorResult> martingale_residual(
    const std::function<double(Vec2)>& u_candidate,
    const ElectrodeConfig& electrodes, const ConductivityField& field,
    const DomainGeometry& domain, const SimulationParams& params,
    const std::vector<double>& t_grid, Vec2 x, std::uint64_t n_paths,
    int workers) {
    RobinData data{
        BoundaryFunction::custom(
            [&electrodes](const BoundaryPoint& p) { return electrodes.f_at(p); },
            0.0),
        BoundaryFunction::custom(
            [&electrodes](const BoundaryPoint& p) { return electrodes.g_at(p); },
            0.0)};
    return martingale_residual(u_candidate, data, field, domain, params, t_grid,
                               x, n_paths, workers);
}

OccupationCheckResult occupation_check(const BoundaryFunction& phi, double t,
                                       const ConductivityField& field,
                                       const DomainGeometry& domain,
                                       const SimulationParams& params,
                                       std::uint64_t n_paths, int workers) {
    const auto stats = run_paths(
        n_paths, 1, workers, [&](std::uint64_t p, std::span<double> out) {
            RandomStream start_rng(params.seed, p, StreamPurpose::start_sampling);
            RandomStream rng(params.seed, p);
            const Vec2 x0 = domain.sample_interior(start_rng);
            double acc = 0.0;
            run_reflected(x0, field, domain, params, t, rng, nullptr,
                          [&](const PathState&, const PathState&, double dL,
                              const BoundaryPoint* contact) {
                              if (contact != nullptr) acc += phi(*contact) * dL;
                              return true;
                          });
            out[0] = acc;
        });

    OccupationCheckResult r;
    r.mc = from_stat(stats[0]);
    r.mc.horizon_used = t;
    r.reference = t * phi.integral(domain) / domain.area();
    r.z_score = r.mc.stderr_ > 0.0 ? (r.mc.mean - r.reference) / r.mc.stderr_ : 0.0;
    return r;
}

}  // namespace eitmc
