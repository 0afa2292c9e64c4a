#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "eitmc/conductivity.hpp"
#include "eitmc/errors.hpp"
#include "eitmc/geometry.hpp"
#include "eitmc/rng.hpp"
#include "eitmc/vec2.hpp"

namespace eitmc {

// Analytic local-time constant of the projection scheme on the half space
// with unit normal diffusivity: the reflected walk started on the wall has
// E L_t = 2 sqrt(t/pi) while the expected overshoot sum is sqrt(t/pi).
inline constexpr double kHalfSpaceLocalTimeConstant = 2.0;

struct SimulationParams {
    double dt = 0.0;  // 0 selects the default 1e-4 * diameter^2
    double local_time_constant = kHalfSpaceLocalTimeConstant;
    std::uint64_t seed = 0;
    double max_time = 0.0;  // 0 lets each solver choose its own horizon
    double kill_threshold = 1e-6;

    double resolved_dt(const DomainGeometry& d) const {
        return dt > 0.0 ? dt : 1e-4 * d.diameter() * d.diameter();
    }
};

enum class PathStatus { alive, absorbed };

struct PathState {
    Vec2 position;
    double time = 0.0;
    double local_time = 0.0;
    double discount = 1.0;  // e_g(t) = exp(-int g dL)
    PathStatus status = PathStatus::alive;
    Vec2 exit_position;
    double exit_time = 0.0;
};

using BoundaryScalarFn = std::function<double(const BoundaryPoint&)>;

struct StepResult {
    PathState state;
    double local_time_increment = 0.0;
    std::optional<BoundaryPoint> contact;
};

namespace detail {

// One Euler-Maruyama move with conormal projection at the boundary. The
// overshoot distance delta is recycled into the local-time increment
// rho * delta / (nu . kappa nu); the denominator is the normal diffusivity
// that the half-space calibration of rho is relative to.
template <class GFn>
inline void step_inplace(PathState& s, const ConductivityField& field,
                         const DomainGeometry& domain, double dt, double rho,
                         std::pair<double, double> gauss, const GFn* g,
                         double& dL_out, BoundaryPoint& contact_out,
                         bool& reflected_out) {
    const Vec2 x = s.position;
    const Mat2Sym kappa = field.evaluate(x);
    const Vec2 a = field.drift(x);
    const Mat2 b = cholesky_lower(2.0 * kappa);
    const double sq = std::sqrt(dt);
    const Vec2 dw{sq * gauss.first, sq * gauss.second};
    Vec2 y = x + dt * a + b * dw;

    const double tol = domain.boundary_tolerance();
    const double sd = domain.signed_distance(y);
    reflected_out = false;
    dL_out = 0.0;
    if (sd > tol) {
        BoundaryPoint bp = domain.project_to_boundary(y);
        const double delta = sd;
        Mat2Sym kb = field.evaluate(bp.position);
        Vec2 dir = normalized(kb * bp.outward_normal);
        Vec2 xn = bp.position - delta * dir;
        if (domain.signed_distance(xn) > tol) {
            // corner: one more projection pass, then give up
            const BoundaryPoint bp2 = domain.project_to_boundary(xn);
            const double d2 = domain.signed_distance(xn);
            const Vec2 dir2 =
                normalized(field.evaluate(bp2.position) * bp2.outward_normal);
            xn = bp2.position - d2 * dir2;
            if (domain.signed_distance(xn) > tol)
                throw StuckAtCorner(
                    "reflected point is still exterior; dt too large for this "
                    "geometry");
        }
        const double normal_diffusivity = kb.quad(bp.outward_normal);
        dL_out = rho * delta / normal_diffusivity;
        s.position = xn;
        s.local_time += dL_out;
        if constexpr (!std::is_same_v<GFn, std::nullptr_t>) {
            if (g != nullptr)
                s.discount *= std::exp(-(*g)(bp) * dL_out);
        }
        contact_out = bp;
        reflected_out = true;
    } else {
        s.position = y;
    }
    s.time += dt;
}

}  // namespace detail

// Single reflected Euler step (spec-level entry point; the simulation loops
// use the inlined detail::step_inplace).
inline StepResult step(const PathState& state, const ConductivityField& field,
                       const DomainGeometry& domain, double dt,
                       std::pair<double, double> gauss,
                       double rho = kHalfSpaceLocalTimeConstant,
                       const BoundaryScalarFn* g = nullptr) {
    StepResult r;
    r.state = state;
    BoundaryPoint contact;
    bool reflected = false;
    detail::step_inplace(r.state, field, domain, dt, rho, gauss, g,
                         r.local_time_increment, contact, reflected);
    if (reflected) r.contact = contact;
    return r;
}

// Runs the reflected path until max_time, discount kill (when g is given), or
// until on_step returns false. on_step sees every move:
//   bool on_step(const PathState& before, const PathState& after,
//                double dL, const BoundaryPoint* contact)
template <class OnStep>
PathState run_reflected(Vec2 start, const ConductivityField& field,
                        const DomainGeometry& domain,
                        const SimulationParams& params, double max_time,
                        RandomStream& rng, const BoundaryScalarFn* g,
                        OnStep&& on_step) {
    if (!domain.contains(start))
        throw Error("path start must lie in the closed domain");
    PathState s;
    s.position = start;
    const double dt = params.resolved_dt(domain);
    const double rho = params.local_time_constant;
    double dL = 0.0;
    BoundaryPoint contact;
    bool reflected = false;
    while (s.time < max_time) {
        if (g != nullptr && s.discount < params.kill_threshold) break;
        const PathState before = s;
        detail::step_inplace(s, field, domain, dt, rho, rng.gaussian_pair(), g,
                             dL, contact, reflected);
        if (!on_step(static_cast<const PathState&>(before),
                     static_cast<const PathState&>(s), dL,
                     reflected ? &contact : nullptr))
            break;
    }
    return s;
}

// Convenience overload with a void observer.
template <class Observer>
PathState simulate_path(Vec2 start, const ConductivityField& field,
                        const DomainGeometry& domain,
                        const SimulationParams& params, double max_time,
                        RandomStream& rng, Observer&& observer,
                        const BoundaryScalarFn* g = nullptr) {
    return run_reflected(start, field, domain, params, max_time, rng, g,
                         [&](const PathState& before, const PathState& after,
                             double dL, const BoundaryPoint* contact) {
                             observer(before, after, dL, contact);
                             return true;
                         });
}

struct FirstExit {
    double exit_time = 0.0;
    BoundaryPoint exit_point;
};

// Euler walk without reflection; absorbs at the first proposal that reaches
// the boundary (within tolerance) or leaves the domain.
FirstExit first_exit(Vec2 start, const ConductivityField& field,
                     const DomainGeometry& domain, const SimulationParams& params,
                     double max_time, RandomStream& rng);

struct CalibrationResult {
    double rho;           // fitted constant
    double rho0;          // analytic half-space value
    double rho_stderr;
    double target;        // sigma(dD)/|D| * t
    double measured_raw;  // mean overshoot sum at rho = 1
    std::uint64_t n_paths;
};

// Fits the local-time constant against the stationary occupation identity
// E L_1 = sigma(dD)/|D| for uniform starts, and cross-checks the fit against
// the analytic half-space value (throws CalibrationDiverged beyond 20%).
CalibrationResult calibrate_local_time(const DomainGeometry& domain,
                                       const ConductivityField& field,
                                       const SimulationParams& params,
                                       std::uint64_t n_paths, int workers);

}  // namespace eitmc
