#include "eitmc/reflecting_sde.hpp"

#include <cmath>

#include "eitmc/parallel.hpp"

namespace eitmc {

FirstExit first_exit(Vec2 start, const ConductivityField& field,
                     const DomainGeometry& domain, const SimulationParams& params,
                     double max_time, RandomStream& rng) {
    const double tol = domain.boundary_tolerance();
    if (domain.signed_distance(start) >= -tol) {
        // boundary start: immediate exit
        return {0.0, domain.project_to_boundary(start)};
    }
    const double dt = params.resolved_dt(domain);
    Vec2 x = start;
    double t = 0.0;
    while (t < max_time) {
        const Mat2Sym kappa = field.evaluate(x);
        const Vec2 a = field.drift(x);
        const Mat2 b = cholesky_lower(2.0 * kappa);
        const auto gauss = rng.gaussian_pair();
        const double sq = std::sqrt(dt);
        const Vec2 y = x + dt * a + b * Vec2{sq * gauss.first, sq * gauss.second};
        t += dt;
        if (domain.signed_distance(y) >= -tol)
            return {t, domain.project_to_boundary(y)};
        x = y;
    }
    throw HorizonExceeded("first_exit did not absorb before max_time");
}

CalibrationResult calibrate_local_time(const DomainGeometry& domain,
                                       const ConductivityField& field,
                                       const SimulationParams& params,
                                       std::uint64_t n_paths, int workers) {
    const bool constant_isotropic =
        field.kind() == ConductivityField::Kind::constant && field.isotropic();
    if (!field.identity_near_boundary() && !constant_isotropic)
        throw MissingCollar(
            "local-time calibration needs an identity collar or a constant "
            "isotropic field");

    const double horizon = 1.0;
    SimulationParams raw = params;
    raw.local_time_constant = 1.0;  // fit the multiplier on raw overshoot mass

    const auto stats = run_paths(
        n_paths, 1, workers, [&](std::uint64_t p, std::span<double> out) {
            RandomStream start_rng(params.seed, p, StreamPurpose::start_sampling);
            RandomStream rng(params.seed, p);
            const Vec2 x0 = domain.sample_interior(start_rng);
            const PathState end = run_reflected(
                x0, field, domain, raw, horizon, rng, nullptr,
                [](const PathState&, const PathState&, double,
                   const BoundaryPoint*) { return true; });
            out[0] = end.local_time;
        });

    const double target = horizon * domain.boundary_measure() / domain.area();
    const double measured = stats[0].mean;
    if (!(measured > 0.0))
        throw CalibrationDiverged("no boundary mass accumulated");

    CalibrationResult r;
    r.rho0 = kHalfSpaceLocalTimeConstant;
    r.rho = target / measured;
    r.rho_stderr = target / (measured * measured) * stats[0].standard_error();
    r.target = target;
    r.measured_raw = measured;
    r.n_paths = n_paths;
    if (std::abs(r.rho - r.rho0) > 0.2 * r.rho0)
        throw CalibrationDiverged("fitted local-time constant " +
                                  std::to_string(r.rho) +
                                  " deviates more than 20% from the analytic "
                                  "half-space value");
    return r;
}

}  // namespace eitmc
