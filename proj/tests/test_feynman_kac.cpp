#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "eitmc/errors.hpp"
#include "eitmc/feynman_kac.hpp"
#include "eitmc/pde_oracle.hpp"
#include "test_support.hpp"

using namespace eitmc;

namespace {
constexpr double kPi = std::numbers::pi;
const auto kDisk = DomainGeometry::disk({0, 0}, 1.0);
const auto kIdentity = ConductivityField::constant(Mat2Sym::identity(), 1.0);

BoundaryFunction cos_theta() {
    FourierSeries s;
    s.period = 2.0 * kPi;
    s.cos_coeffs = {1.0};
    return BoundaryFunction::fourier(s);
}

SimulationParams quick_params(std::uint64_t seed, double dt = 2e-4) {
    SimulationParams p;
    p.dt = dt;
    p.seed = seed;
    return p;
}
}  // namespace

TEST_CASE("dirichlet: constant data is exact with zero stderr") {
    const auto r = solve_dirichlet({0.3, 0.1}, BoundaryFunction::constant(2.5),
                                   kIdentity, kDisk, quick_params(1), 500, 2);
    CHECK(r.mean == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(r.stderr_ == 0.0);
    CHECK(r.n_paths == 500);
}

TEST_CASE("dirichlet: boundary start returns phi(x) immediately") {
    const auto r = solve_dirichlet({1.0, 0.0}, cos_theta(), kIdentity, kDisk,
                                   quick_params(2), 64, 1);
    CHECK(r.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.stderr_ == 0.0);
    CHECK(r.horizon_used == 0.0);
}

TEST_CASE("dirichlet: harmonic extension of cos theta") {
    const auto r = solve_dirichlet({0.5, 0.0}, cos_theta(), kIdentity, kDisk,
                                   quick_params(3), 20000, 2);
    const double exact = testsupport::harmonic_extension_cos(1, 0.5, 0.0);
    CHECK(std::abs(r.mean - exact) <= 3.0 * r.stderr_ + 0.015);
}

TEST_CASE("dirichlet: shift covariance under coupled RNG") {
    const auto base = solve_dirichlet({0.4, 0.2}, cos_theta(), kIdentity, kDisk,
                                      quick_params(5), 2000, 2);
    FourierSeries shifted;
    shifted.period = 2.0 * kPi;
    shifted.mean = 0.75;
    shifted.cos_coeffs = {1.0};
    const auto plus =
        solve_dirichlet({0.4, 0.2}, BoundaryFunction::fourier(shifted),
                        kIdentity, kDisk, quick_params(5), 2000, 2);
    CHECK(plus.mean - base.mean == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("continuum: zero data gives zero") {
    FourierSeries z;
    z.period = 2.0 * kPi;
    ContinuumOptions opts;
    opts.c3_override = 3.39;
    const auto r =
        solve_continuum({0.25, 0.0}, NeumannData{BoundaryFunction::fourier(z)},
                        kIdentity, kDisk, quick_params(6), 200, 2, opts);
    CHECK(r.mean == 0.0);
    CHECK(r.stderr_ == 0.0);
    CHECK(r.truncation_tail_bound <= 0.005 + 1e-12);
}

TEST_CASE("continuum: cos theta current at (0.5, 0) and odd symmetry at 0") {
    ContinuumOptions opts;
    opts.c3_override = 3.39;  // oracle spectral gap of the unit disk
    const auto params = quick_params(7);
    const auto r = solve_continuum({0.5, 0.0}, NeumannData{cos_theta()},
                                   kIdentity, kDisk, params, 10000, 2, opts);
    CHECK(std::abs(r.mean - 0.5) <= 3.0 * r.stderr_ + 0.02);
    CHECK(r.truncation_tail_bound <= 0.005 + 1e-12);

    const auto center = solve_continuum({0.0, 0.0}, NeumannData{cos_theta()},
                                        kIdentity, kDisk, params, 10000, 2, opts);
    CHECK(std::abs(center.mean) <= 3.0 * center.stderr_ + 0.01);
}

TEST_CASE("continuum: spatial average over uniform probes is zero") {
    ContinuumOptions opts;
    opts.c3_override = 3.39;
    opts.tolerance = 0.02;
    const auto params = quick_params(8);
    RandomStream probe_rng(1234, 0);
    const int m = 8;
    double estimates[m];
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec2 x = kDisk.sample_interior(probe_rng);
        const auto r =
            solve_continuum(x, NeumannData{cos_theta()}, kIdentity, kDisk,
                            params, 4000, 2, opts, static_cast<std::uint64_t>(i) * 4000);
        estimates[i] = r.mean;
        sum += r.mean;
    }
    const double avg = sum / m;
    // the spread of u over uniform probes dominates the per-probe MC error
    double var = 0.0;
    for (const double e : estimates) var += (e - avg) * (e - avg);
    const double se = std::sqrt(var / (m - 1) / m);
    CHECK(std::abs(avg) <= 3.0 * se + 0.02);
}

TEST_CASE("continuum rejects incompatible or non-collar inputs") {
    FourierSeries bad;
    bad.period = 2.0 * kPi;
    bad.mean = 0.3;
    CHECK_THROWS_AS(
        (void)solve_continuum({0, 0}, NeumannData{BoundaryFunction::fourier(bad)},
                              kIdentity, kDisk, quick_params(9), 100, 1),
        CompatibilityViolation);

    const auto bump = ConductivityField::smooth_bump(Mat2Sym::identity(),
                                                     {0, 0}, 0.5, 2.0, 4.0);
    CHECK_THROWS_AS((void)solve_continuum({0, 0}, NeumannData{cos_theta()},
                                          bump, kDisk, quick_params(10), 100, 1),
                    MissingCollar);

    // the same bump inside an (A1) collar is admissible
    const auto collared = bump.with_collar(0.3, kDisk);
    ContinuumOptions opts;
    opts.c3_override = 3.0;
    CHECK_NOTHROW((void)solve_continuum({0, 0}, NeumannData{cos_theta()},
                                        collared, kDisk, quick_params(11), 200,
                                        2, opts));
}

TEST_CASE("cem: grounded zero voltages give zero") {
    const auto electrodes = std::make_shared<ElectrodeConfig>(
        kDisk, std::vector<ElectrodeConfig::Arc>{{0.0, kPi}, {kPi, 2.0 * kPi}},
        std::vector<double>{0.0, 0.0}, 1.0);
    auto params = quick_params(12, 1e-3);
    params.kill_threshold = 1e-3;
    const auto r =
        solve_cem({0.2, 0.2}, *electrodes, kIdentity, kDisk, params, 200, 2);
    CHECK(r.mean == 0.0);
    CHECK(r.stderr_ == 0.0);
}

TEST_CASE("cem: full-boundary electrode with unit voltage gives u = 1") {
    // Robin data with g = f: the constant 1 solves the problem and the path
    // functional telescopes to 1 - e_g(infinity) exactly
    const auto full = std::make_shared<ElectrodeConfig>(
        kDisk, std::vector<ElectrodeConfig::Arc>{{0.0, 2.0 * kPi}},
        std::vector<double>{1.0}, 0.7, /*allow_ungrounded=*/true);
    auto params = quick_params(13, 1e-3);
    params.kill_threshold = 1e-6;
    const auto r =
        solve_cem({0.4, -0.1}, *full, kIdentity, kDisk, params, 200, 2);
    CHECK(std::abs(r.mean - 1.0) <= 2e-6);
    CHECK(r.stderr_ <= 1e-6);
    CHECK(r.truncation_tail_bound <= 1e-5);
}

TEST_CASE("cem: linearity in the voltage pattern under coupled RNG") {
    const auto base = std::make_shared<ElectrodeConfig>(
        kDisk, std::vector<ElectrodeConfig::Arc>{{0.0, kPi}, {kPi, 2.0 * kPi}},
        std::vector<double>{1.0, -1.0}, 1.0);
    const auto scaled = std::make_shared<ElectrodeConfig>(
        kDisk, std::vector<ElectrodeConfig::Arc>{{0.0, kPi}, {kPi, 2.0 * kPi}},
        std::vector<double>{3.0, -3.0}, 1.0);
    auto params = quick_params(14, 1e-3);
    params.kill_threshold = 1e-4;
    const auto r1 =
        solve_cem({0.5, 0.0}, *base, kIdentity, kDisk, params, 500, 2);
    const auto r3 =
        solve_cem({0.5, 0.0}, *scaled, kIdentity, kDisk, params, 500, 2);
    CHECK(r3.mean == doctest::Approx(3.0 * r1.mean).epsilon(1e-12));
}

TEST_CASE("cem: antisymmetry at the center") {
    const auto electrodes = std::make_shared<ElectrodeConfig>(
        kDisk, std::vector<ElectrodeConfig::Arc>{{0.0, kPi}, {kPi, 2.0 * kPi}},
        std::vector<double>{1.0, -1.0}, 1.0);
    auto params = quick_params(15, 1e-3);
    params.kill_threshold = 1e-4;
    const auto r =
        solve_cem({0.0, 0.0}, *electrodes, kIdentity, kDisk, params, 4000, 2);
    CHECK(std::abs(r.mean) <= 3.0 * r.stderr_);
}

TEST_CASE("martingale residual: f = g = 0 with constant candidate is exactly 0") {
    RobinData zero{BoundaryFunction::zero(), BoundaryFunction::zero()};
    const auto res = martingale_residual([](Vec2) { return 4.2; }, zero,
                                         kIdentity, kDisk, quick_params(16, 1e-3),
                                         {0.05, 0.2}, {0.1, 0.1}, 300, 2);
    REQUIRE(res.size() == 2);
    for (const auto& r : res) {
        CHECK(r.mean == 0.0);
        CHECK(r.stderr_ == 0.0);
    }
}

TEST_CASE("martingale residual: shifted candidate is detected") {
    const auto electrodes = std::make_shared<ElectrodeConfig>(
        kDisk, std::vector<ElectrodeConfig::Arc>{{0.0, kPi}, {kPi, 2.0 * kPi}},
        std::vector<double>{1.0, -1.0}, 1.0);
    const auto oracle = fd_solve(ProblemKind::cem, kDisk,
                                 [](Vec2) { return 1.0; }, nullptr,
                                 electrodes.get(), 64);
    const auto res = martingale_residual(
        [&](Vec2 p) { return oracle.evaluate(p) + 0.1; }, *electrodes,
        kIdentity, kDisk, quick_params(17), {1.0}, {0.5, 0.0}, 4000, 2);
    REQUIRE(res.size() == 1);
    // shift enters through the g u term: residual = -0.1 E int g dL < 0
    CHECK(res[0].mean < 0.0);
    CHECK(std::abs(res[0].mean) > 3.0 * res[0].stderr_);
}

TEST_CASE("occupation check on the unit disk") {
    const auto params = quick_params(18);
    const auto one = occupation_check(BoundaryFunction::constant(1.0), 1.0,
                                      kIdentity, kDisk, params, 5000, 2);
    CHECK(one.reference == doctest::Approx(2.0));
    CHECK(std::abs(one.z_score) < 3.0);

    const auto odd = occupation_check(cos_theta(), 1.0, kIdentity, kDisk,
                                      params, 5000, 2);
    CHECK(odd.reference == doctest::Approx(0.0));
    CHECK(std::abs(odd.z_score) < 3.0);

    const auto small = occupation_check(BoundaryFunction::constant(1.0), 0.01,
                                        kIdentity, kDisk, params, 2000, 2);
    CHECK(small.mc.mean < 0.05);
}
