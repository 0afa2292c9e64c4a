#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "eitmc/boundary_process.hpp"
#include "eitmc/errors.hpp"
#include "eitmc/feynman_kac.hpp"
#include "eitmc/parallel.hpp"
#include "test_support.hpp"

using namespace eitmc;

namespace {
constexpr double kPi = std::numbers::pi;
const auto kDisk = DomainGeometry::disk({0, 0}, 1.0);
const auto kIdentity = ConductivityField::constant(Mat2Sym::identity(), 1.0);

BoundaryFunction cos_n(std::size_t n) {
    FourierSeries s;
    s.period = 2.0 * kPi;
    s.cos_coeffs.assign(n, 0.0);
    s.cos_coeffs[n - 1] = 1.0;
    return BoundaryFunction::fourier(s);
}
}  // namespace

TEST_CASE("inverse local time on a hand-built ledger") {
    LocalTimeLedger ledger;
    ledger.record(0.1, 0.5);
    ledger.record(0.2, 1.0);
    ledger.record(0.3, 1.5);
    CHECK(inverse_local_time(ledger, 0.0) == doctest::Approx(0.1));
    CHECK(inverse_local_time(ledger, 0.49) == doctest::Approx(0.1));
    CHECK(inverse_local_time(ledger, 0.5) == doctest::Approx(0.2));  // right-continuous
    CHECK(inverse_local_time(ledger, 1.2) == doctest::Approx(0.3));
    CHECK_THROWS_AS((void)inverse_local_time(ledger, 1.5), LocalTimeExhausted);
    CHECK_THROWS_AS((void)inverse_local_time(ledger, 7.0), LocalTimeExhausted);
}

TEST_CASE("inverse local time is monotone on simulated ledgers") {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = 3;
    std::vector<double> tau0;
    for (std::uint64_t p = 0; p < 20; ++p) {
        RandomStream rng(params.seed, p);
        LocalTimeLedger ledger;
        run_reflected(kDisk.point_at_arc(0.0).position, kIdentity, kDisk, params,
                      0.2, rng, nullptr,
                      [&](const PathState&, const PathState& after, double dL,
                          const BoundaryPoint*) {
                          if (dL > 0.0) ledger.record(after.time, after.local_time);
                          return true;
                      });
        REQUIRE(ledger.final_level() > 0.1);
        tau0.push_back(inverse_local_time(ledger, 0.0));
        CHECK(tau0.back() >= params.dt);  // the first step is the earliest touch
        double prev = 0.0;
        for (double s = 0.0; s < ledger.final_level() - 0.02; s += 0.005) {
            const double tau = inverse_local_time(ledger, s);
            CHECK(tau >= prev);
            prev = tau;
        }
    }
    // boundary starts touch quickly in the typical case; the discrete first
    // touch is heavy-tailed, so assert the median rather than the worst case
    std::sort(tau0.begin(), tau0.end());
    CHECK(tau0[tau0.size() / 2] <= 20.0 * params.dt);
}

TEST_CASE("trace samples live on the boundary with increasing s") {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = 5;
    TraceOptions opts;
    opts.sample_spacing = 0.01;
    RandomStream rng(params.seed, 0);
    const auto trace = trace_path(kDisk.point_at_arc(1.0), 1.0, kIdentity,
                                  kDisk, params, opts, rng);
    REQUIRE(trace.samples.size() == 101);  // s = 0 start plus 100 levels
    double prev = -1.0;
    for (const auto& s : trace.samples) {
        CHECK(s.s > prev);
        prev = s.s;
        CHECK(std::abs(kDisk.signed_distance(s.point.position)) < 1e-9);
    }
    CHECK(trace.jump_threshold > 0.0);
}

TEST_CASE("long-run trace distribution is uniform in angle") {
    SimulationParams params;
    params.dt = 1e-3;
    params.seed = 6;
    TraceOptions opts;
    opts.sample_spacing = 1.0;  // spacing of one mixing time decorrelates
    std::vector<double> arcs_small, arcs_large;
    for (std::uint64_t p = 0; p < 25; ++p) {
        RandomStream rng(params.seed, p);
        const auto trace = trace_path(kDisk.point_at_arc(0.0), 40.0, kIdentity,
                                      kDisk, params, opts, rng);
        for (std::size_t k = 1; k < trace.samples.size(); ++k) {
            const double u =
                trace.samples[k].point.arc_parameter / kDisk.boundary_measure();
            if (k <= 10) arcs_small.push_back(u);
            arcs_large.push_back(u);
        }
    }
    const auto uniform_cdf = [](double x) { return x; };
    const double d_small =
        testsupport::ks_statistic(std::move(arcs_small), uniform_cdf);
    const double d_large =
        testsupport::ks_statistic(std::move(arcs_large), uniform_cdf);
    CHECK(d_large < testsupport::ks_critical(25 * 40));
    // convergence toward stationarity: more trace time, smaller KS statistic
    CHECK(d_large < d_small);
}

TEST_CASE("change of variables: trace Riemann sum equals the dL integral") {
    // phi = indicator of the upper half circle, piecewise constant
    const auto phi = BoundaryFunction::custom(
        [](const BoundaryPoint& p) { return p.arc_parameter < kPi ? 1.0 : 0.0; },
        1.0);
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = 7;
    const double ds = 0.01;
    const double s_target = 2.0;

    for (std::uint64_t p = 0; p < 20; ++p) {
        RandomStream rng(params.seed, p);
        double integral = 0.0;       // int phi dL over [0, K ds] in level units
        double riemann = 0.0;        // sum phi(Xhat_{k ds}) ds
        double variation = 0.0;      // total variation of phi along contacts
        double last_phi = 0.0;
        bool have_last = false;
        std::size_t next_level = 1;
        const auto n_levels = static_cast<std::size_t>(s_target / ds);
        run_reflected(
            kDisk.point_at_arc(0.5).position, kIdentity, kDisk, params, 50.0,
            rng, nullptr,
            [&](const PathState& before, const PathState& after, double dL,
                const BoundaryPoint* contact) {
                if (contact == nullptr) return true;
                const double value = phi(*contact);
                if (have_last) variation += std::abs(value - last_phi);
                last_phi = value;
                have_last = true;
                const double lo = before.local_time;
                const double hi = after.local_time;
                const double cap = static_cast<double>(n_levels) * ds;
                integral += value * (std::min(hi, cap) - std::min(lo, cap));
                while (next_level <= n_levels &&
                       hi > static_cast<double>(next_level) * ds) {
                    riemann += value * ds;
                    ++next_level;
                }
                (void)dL;
                return next_level <= n_levels;
            });
        REQUIRE(next_level > n_levels);  // reached the local-time horizon
        const double bound = ds * (variation + 2.0);
        CHECK(std::abs(integral - riemann) <= bound);
    }
}

TEST_CASE("jump census: counts grow linearly with the trace horizon") {
    SimulationParams params;
    params.dt = 1e-5;
    params.seed = 8;
    TraceOptions opts;
    opts.sample_spacing = 0.002;
    opts.jump_threshold = 1e-3;
    const double gap_cut = 0.02;
    double counts[3] = {0, 0, 0};
    const double horizons[3] = {1.0, 2.0, 4.0};
    for (int h = 0; h < 3; ++h) {
        for (std::uint64_t p = 0; p < 20; ++p) {
            RandomStream rng(params.seed + static_cast<std::uint64_t>(h), p);
            const auto trace = trace_path(kDisk.point_at_arc(0.0), horizons[h],
                                          kIdentity, kDisk, params, opts, rng);
            for (const auto& j : trace.jumps)
                if (j.gap > gap_cut) counts[h] += 1.0;
        }
    }
    CHECK(counts[0] > 50);  // small jumps are plentiful
    CHECK(counts[1] / counts[0] == doctest::Approx(2.0).epsilon(0.35));
    CHECK(counts[2] / counts[1] == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("dtn estimate: constants are in the kernel, exactly") {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = 9;
    const auto est = estimate_dtn(BoundaryFunction::constant(1.0), 0.05,
                                  kIdentity, kDisk, params, 200, 2, 2);
    for (const auto& e : est) {
        CHECK(e.value == 0.0);
        CHECK(e.stderr_ == 0.0);
    }
}

TEST_CASE("dtn estimate: first harmonic multiplier near one") {
    SimulationParams params;
    params.dt = 1e-5;
    params.seed = 10;
    const double t = 0.02;
    const auto est =
        estimate_dtn(cos_n(1), t, kIdentity, kDisk, params, 4000, 2, 2);
    REQUIRE(est.size() == 2);  // starts at theta = 0 and theta = pi
    for (const auto& e : est) {
        const double target = std::cos(e.arc);
        CHECK(std::abs(e.value - target) <= 4.0 * e.stderr_ + 0.1);
    }
}

TEST_CASE("dtn estimate is linear in phi under coupled RNG") {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = 11;
    const double t = 0.05;
    // phi3 = 2 phi1 + phi2 evaluated on identical trace endpoints
    FourierSeries s1, s2, s3;
    s1.period = s2.period = s3.period = 2.0 * kPi;
    s1.cos_coeffs = {1.0};
    s2.sin_coeffs = {1.0};
    s3.cos_coeffs = {2.0};
    s3.sin_coeffs = {1.0};
    const auto e1 = estimate_dtn(BoundaryFunction::fourier(s1), t, kIdentity,
                                 kDisk, params, 300, 3, 2);
    const auto e2 = estimate_dtn(BoundaryFunction::fourier(s2), t, kIdentity,
                                 kDisk, params, 300, 3, 2);
    const auto e3 = estimate_dtn(BoundaryFunction::fourier(s3), t, kIdentity,
                                 kDisk, params, 300, 3, 2);
    for (std::size_t i = 0; i < e1.size(); ++i)
        CHECK(e3[i].value ==
              doctest::Approx(2.0 * e1[i].value + e2[i].value).epsilon(1e-9));
}

TEST_CASE("drift field points along the conormal") {
    SimulationParams params;
    params.dt = 1e-5;
    params.seed = 12;
    const auto disk_b = drift_field(kIdentity, kDisk, params, 3000, 4, 2);
    for (const auto& d : disk_b) {
        // b(x) = x on the unit disk with kappa = 1
        CHECK(std::abs(d.b.x - d.position.x) <= 4.0 * d.stderr_.x + 0.12);
        CHECK(std::abs(d.b.y - d.position.y) <= 4.0 * d.stderr_.y + 0.12);
    }

    // radial conductivity keeps b radial
    const auto radial =
        ConductivityField::radial_isotropic({0, 0}, {1.0, 0.5}, 4.0);
    const auto rad_b = drift_field(radial, kDisk, params, 3000, 4, 2);
    for (const auto& d : rad_b) {
        const Vec2 tangent = perp(d.position);
        const double tang = dot(d.b, tangent);
        const double se =
            std::abs(tangent.x) * d.stderr_.x + std::abs(tangent.y) * d.stderr_.y;
        CHECK(std::abs(tang) <= 4.0 * se + 0.12);
    }

    // rectangle face midpoints: the drift is normal to the face
    const auto square = DomainGeometry::rectangle({0, 0}, {1, 1});
    const auto sq_b = drift_field(kIdentity, square, params, 3000, 8, 2);
    int checked = 0;
    for (const auto& d : sq_b) {
        const BoundaryPoint p = square.point_at_arc(d.arc);
        const double frac = std::fmod(d.arc, 1.0);
        if (std::abs(frac - 0.5) > 1e-9) continue;  // skip corners
        const Vec2 tangent = perp(p.outward_normal);
        const double tang = dot(d.b, tangent);
        const double se =
            std::abs(tangent.x) * d.stderr_.x + std::abs(tangent.y) * d.stderr_.y;
        CHECK(std::abs(tang) <= 4.0 * se + 0.12);
        ++checked;
    }
    CHECK(checked == 4);
}

TEST_CASE("jump kernel statistics on the rotation-invariant disk") {
    SimulationParams params;
    params.dt = 1e-5;
    params.seed = 13;
    TraceOptions opts;
    opts.sample_spacing = 0.005;
    opts.jump_threshold = 1e-3;
    std::vector<BoundaryTrace> traces;
    for (std::uint64_t p = 0; p < 16; ++p) {
        RandomStream rng(params.seed, p);
        traces.push_back(trace_path(
            kDisk.point_at_arc(static_cast<double>(p) * kDisk.boundary_measure() / 16.0),
            4.0, kIdentity, kDisk, params, opts, rng));
    }
    const std::size_t bins = 6;
    const auto est = jump_statistics(traces, bins, kDisk);

    for (std::size_t i = 0; i < bins; ++i) {
        CHECK(est.exposure[i] > 0.0);
        for (std::size_t j = 0; j < bins; ++j)
            CHECK(est.kernel(i, j) >= 0.0);
    }

    // chi-square homogeneity across source bins per angular separation
    std::vector<double> sep_rate(bins, 0.0);
    double total_exposure = 0.0;
    for (std::size_t i = 0; i < bins; ++i) total_exposure += est.exposure[i];
    for (std::size_t k = 0; k < bins; ++k) {
        double c = 0.0;
        for (std::size_t i = 0; i < bins; ++i) c += est.count(i, (i + k) % bins);
        sep_rate[k] = c / total_exposure;
    }
    double chi2 = 0.0;
    int dof = 0;
    for (std::size_t i = 0; i < bins; ++i)
        for (std::size_t k = 0; k < bins; ++k) {
            const double expectation = est.exposure[i] * sep_rate[k];
            if (expectation < 5.0) continue;
            const double c = est.count(i, (i + k) % bins);
            chi2 += (c - expectation) * (c - expectation) / expectation;
            ++dof;
        }
    REQUIRE(dof > 8);
    CHECK(chi2 < static_cast<double>(dof) +
                     6.0 * std::sqrt(2.0 * static_cast<double>(dof)));

    // quadratic integrability proxy is stable as the gap threshold shrinks
    const double cuts[3] = {1e-1, 1e-2, 1e-3};
    double proxy[3];
    for (int c = 0; c < 3; ++c) {
        const auto e = jump_statistics(traces, bins, kDisk, cuts[c]);
        double sum = 0.0;
        for (std::size_t i = 0; i < bins; ++i)
            for (std::size_t j = 0; j < bins; ++j) {
                const Vec2 xi = kDisk.point_at_arc(
                    (static_cast<double>(i) + 0.5) * e.bin_width).position;
                const Vec2 yj = kDisk.point_at_arc(
                    (static_cast<double>(j) + 0.5) * e.bin_width).position;
                sum += e.kernel(i, j) * norm2(yj - xi) * e.bin_width;
            }
        proxy[c] = sum / static_cast<double>(bins);
    }
    CHECK(proxy[1] > proxy[0]);
    CHECK(proxy[2] > proxy[1]);
    // increments shrink geometrically: the small-jump tail is integrable
    CHECK(proxy[2] - proxy[1] <= 0.5 * (proxy[1] - proxy[0]));
}

TEST_CASE("continuum solution via the trace clock matches the direct solver") {
    // two-stage path: absorb at the boundary, then restart the reflected walk
    // there and accumulate int f dL until the local time reaches S; by the
    // change of variables this mirrors int_0^S f(Xhat_s) ds from the exit point
    FourierSeries fs;
    fs.period = 2.0 * kPi;
    fs.cos_coeffs = {1.0};
    const auto f = BoundaryFunction::fourier(fs);

    SimulationParams params;
    params.dt = 2e-4;
    params.seed = 15;
    const double s_horizon = 4.0;  // trace-clock analogue of the ergodic cutoff

    ContinuumOptions opts;
    opts.c3_override = 3.39;
    opts.tolerance = 0.01;

    const Vec2 probes[5] = {
        {0.5, 0.0}, {0.0, 0.0}, {-0.4, 0.3}, {0.2, 0.6}, {0.0, -0.5}};
    for (std::size_t i = 0; i < 5; ++i) {
        const Vec2 x = probes[i];
        const auto direct = solve_continuum(x, NeumannData{f}, kIdentity, kDisk,
                                            params, 2500, 2,
                                            opts, 1000000 + i * 2500);
        const auto stats = run_paths(
            2500, 1, 2, [&](std::uint64_t p, std::span<double> out) {
                RandomStream rng(params.seed, i * 2500 + p);
                const auto exit =
                    first_exit(x, kIdentity, kDisk, params, 1e3, rng);
                double acc = 0.0;
                run_reflected(exit.exit_point.position, kIdentity, kDisk,
                              params, 1e3, rng, nullptr,
                              [&](const PathState&, const PathState& after,
                                  double dL, const BoundaryPoint* contact) {
                                  if (contact != nullptr) acc += f(*contact) * dL;
                                  return after.local_time < s_horizon;
                              });
                out[0] = acc;
            });
        const double se = std::sqrt(stats[0].standard_error() *
                                        stats[0].standard_error() +
                                    direct.stderr_ * direct.stderr_);
        CHECK(std::abs(stats[0].mean - direct.mean) <= 3.0 * se + 0.05);
    }
}

TEST_CASE("jump statistics reports empty exposure") {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = 14;
    TraceOptions opts;
    opts.sample_spacing = 0.01;
    RandomStream rng(params.seed, 0);
    std::vector<BoundaryTrace> traces = {trace_path(
        kDisk.point_at_arc(0.0), 0.05, kIdentity, kDisk, params, opts, rng)};
    CHECK_THROWS_AS((void)jump_statistics(traces, 64, kDisk), InsufficientData);
}
