#include "eitmc/boundary_process.hpp"

#include <algorithm>
#include <cmath>

#include "eitmc/errors.hpp"
#include "eitmc/parallel.hpp"

namespace eitmc {

double inverse_local_time(const LocalTimeLedger& ledger, double s) {
    const auto it =
        std::upper_bound(ledger.levels.begin(), ledger.levels.end(), s);
    if (it == ledger.levels.end())
        throw LocalTimeExhausted(
            "path ended before the local time reached the requested level");
    return ledger.times[static_cast<std::size_t>(it - ledger.levels.begin())];
}

namespace {

double default_trace_cap(const DomainGeometry& domain, double horizon) {
    // tau(S) concentrates around S * |D| / sigma(dD); the cap only guards
    // against misconfiguration
    const double expected = horizon * domain.area() / domain.boundary_measure();
    return std::max(100.0 * expected, 10.0 * domain.diameter() * domain.diameter());
}

}  // namespace

BoundaryTrace trace_path(const BoundaryPoint& start, double horizon,
                         const ConductivityField& field,
                         const DomainGeometry& domain,
                         const SimulationParams& params,
                         const TraceOptions& options, RandomStream& rng) {
    const double ds = options.sample_spacing;
    if (!(ds > 0.0) || !(horizon > 0.0))
        throw ConfigError("trace needs positive spacing and horizon");
    const double dt = params.resolved_dt(domain);
    const double threshold =
        options.jump_threshold > 0.0
            ? options.jump_threshold
            : 10.0 * std::sqrt(ds * dt / params.local_time_constant);
    const double cap = options.max_time > 0.0
                           ? options.max_time
                           : default_trace_cap(domain, horizon);

    BoundaryTrace trace;
    trace.sample_spacing = ds;
    trace.horizon = horizon;
    trace.jump_threshold = threshold;
    trace.samples.push_back({0.0, start});

    const auto n_levels = static_cast<std::size_t>(std::floor(horizon / ds));
    std::size_t next = 1;  // next level index to record

    const PathState end = run_reflected(
        start.position, field, domain, params, cap, rng, nullptr,
        [&](const PathState&, const PathState& after, double dL,
            const BoundaryPoint* contact) {
            if (contact == nullptr || dL <= 0.0) return true;
            while (next <= n_levels &&
                   after.local_time > static_cast<double>(next) * ds) {
                const double s = static_cast<double>(next) * ds;
                const TraceSample& prev = trace.samples.back();
                const double gap = norm(contact->position - prev.point.position);
                if (gap > threshold)
                    trace.jumps.push_back({s, prev.point, *contact, gap});
                trace.samples.push_back({s, *contact});
                ++next;
            }
            return next <= n_levels;
        });
    trace.wall_time = end.time;
    if (next <= n_levels)
        throw HorizonExceeded(
            "trace did not accumulate the requested local time before the "
            "wall-time cap");
    return trace;
}

namespace {

// One boundary start advanced until the local time first exceeds t; returns
// the boundary point at that step and the realized level.
struct TraceEndpoint {
    BoundaryPoint point;
    double level;
};

TraceEndpoint trace_endpoint(const BoundaryPoint& start, double t,
                             const ConductivityField& field,
                             const DomainGeometry& domain,
                             const SimulationParams& params, double cap,
                             RandomStream& rng) {
    TraceEndpoint out{start, 0.0};
    bool reached = false;
    run_reflected(start.position, field, domain, params, cap, rng, nullptr,
                  [&](const PathState&, const PathState& after, double dL,
                      const BoundaryPoint* contact) {
                      if (contact == nullptr || dL <= 0.0) return true;
                      if (after.local_time > t) {
                          out.point = *contact;
                          out.level = after.local_time;
                          reached = true;
                          return false;
                      }
                      return true;
                  });
    if (!reached)
        throw HorizonExceeded("trace endpoint not reached before the time cap");
    return out;
}

}  // namespace

std::vector<DtnSample> estimate_dtn(const BoundaryFunction& phi, double t,
                                    const ConductivityField& field,
                                    const DomainGeometry& domain,
                                    const SimulationParams& params,
                                    std::uint64_t n_paths_per_start,
                                    std::size_t start_grid, int workers) {
    if (start_grid == 0) throw ConfigError("estimate_dtn needs a start grid");
    const double cap = default_trace_cap(domain, std::max(t, 1.0));
    const double perimeter = domain.boundary_measure();

    std::vector<DtnSample> out;
    out.reserve(start_grid);
    for (std::size_t i = 0; i < start_grid; ++i) {
        const BoundaryPoint x =
            domain.point_at_arc(static_cast<double>(i) * perimeter /
                                static_cast<double>(start_grid));
        const std::uint64_t stream_base = static_cast<std::uint64_t>(i) *
                                          n_paths_per_start;
        const auto stats = run_paths(
            n_paths_per_start, 2, workers,
            [&](std::uint64_t p, std::span<double> o) {
                RandomStream rng(params.seed, stream_base + p);
                const TraceEndpoint e =
                    trace_endpoint(x, t, field, domain, params, cap, rng);
                o[0] = phi(e.point);
                o[1] = e.level;
            });
        DtnSample s;
        s.arc = x.arc_parameter;
        s.position = x.position;
        s.mean_level = stats[1].mean;
        s.value = (phi(x) - stats[0].mean) / s.mean_level;
        s.stderr_ = stats[0].standard_error() / s.mean_level;
        out.push_back(s);
    }
    return out;
}

std::vector<DriftSample> drift_field(const ConductivityField& field,
                                     const DomainGeometry& domain,
                                     const SimulationParams& params,
                                     std::uint64_t n_paths_per_start,
                                     std::size_t start_grid, int workers) {
    if (start_grid == 0) throw ConfigError("drift_field needs a start grid");
    const double cap = default_trace_cap(domain, 1.0);
    const double perimeter = domain.boundary_measure();
    const double t = 0.01;

    std::vector<DriftSample> out;
    out.reserve(start_grid);
    for (std::size_t i = 0; i < start_grid; ++i) {
        const BoundaryPoint x =
            domain.point_at_arc(static_cast<double>(i) * perimeter /
                                static_cast<double>(start_grid));
        const std::uint64_t stream_base = static_cast<std::uint64_t>(i) *
                                          n_paths_per_start;
        const auto stats = run_paths(
            n_paths_per_start, 3, workers,
            [&](std::uint64_t p, std::span<double> o) {
                RandomStream rng(params.seed, stream_base + p);
                const TraceEndpoint e =
                    trace_endpoint(x, t, field, domain, params, cap, rng);
                o[0] = e.point.position.x;
                o[1] = e.point.position.y;
                o[2] = e.level;
            });
        DriftSample s;
        s.arc = x.arc_parameter;
        s.position = x.position;
        const double level = stats[2].mean;
        s.b = {(x.position.x - stats[0].mean) / level,
               (x.position.y - stats[1].mean) / level};
        s.stderr_ = {stats[0].standard_error() / level,
                     stats[1].standard_error() / level};
        out.push_back(s);
    }
    return out;
}

JumpKernelEstimate jump_statistics(const std::vector<BoundaryTrace>& traces,
                                   std::size_t n_bins,
                                   const DomainGeometry& domain,
                                   double min_gap) {
    if (n_bins == 0 || traces.empty())
        throw InsufficientData("jump_statistics needs traces and bins");
    const double perimeter = domain.boundary_measure();

    JumpKernelEstimate est;
    est.n_bins = n_bins;
    est.bin_width = perimeter / static_cast<double>(n_bins);
    est.exposure.assign(n_bins, 0.0);
    est.counts.assign(n_bins * n_bins, 0.0);

    const auto bin_of = [&](double arc) {
        auto b = static_cast<std::size_t>(arc / est.bin_width);
        return std::min(b, n_bins - 1);
    };

    for (const BoundaryTrace& tr : traces) {
        for (const TraceSample& s : tr.samples)
            est.exposure[bin_of(s.point.arc_parameter)] += tr.sample_spacing;
        for (const TraceJump& j : tr.jumps) {
            if (j.gap < min_gap) continue;
            est.counts[bin_of(j.from.arc_parameter) * n_bins +
                       bin_of(j.to.arc_parameter)] += 1.0;
        }
    }

    for (std::size_t i = 0; i < n_bins; ++i)
        if (!(est.exposure[i] > 0.0))
            throw InsufficientData("a source bin has zero trace exposure");

    est.estimate.assign(n_bins * n_bins, 0.0);
    for (std::size_t i = 0; i < n_bins; ++i)
        for (std::size_t j = 0; j < n_bins; ++j)
            est.estimate[i * n_bins + j] =
                est.counts[i * n_bins + j] /
                (2.0 * est.exposure[i] * est.bin_width);
    return est;
}

}  // namespace eitmc
