#include "eitmc/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "eitmc/boundary_process.hpp"
#include "eitmc/feynman_kac.hpp"
#include "eitmc/parallel.hpp"
#include "eitmc/pde_oracle.hpp"

namespace eitmc {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Suite {
    const AcceptanceOptions& opts;
    std::vector<CriterionResult> results;

    bool wanted(int id) const {
        if (opts.only.empty()) return true;
        for (const int k : opts.only)
            if (k == id) return true;
        return false;
    }

    std::uint64_t budget(double n) const {
        return static_cast<std::uint64_t>(
            std::max(64.0, std::round(n * opts.scale)));
    }

    void record(int id, const std::string& name, bool pass, double dt,
                const std::string& detail) {
        results.push_back({id, name, pass, dt, detail});
        if (opts.progress != nullptr) {
            char line[512];
            std::snprintf(line, sizeof(line), "[%s] %2d %-20s %s\n",
                          pass ? "PASS" : "FAIL", id, name.c_str(),
                          detail.c_str());
            *opts.progress << line << std::flush;
        }
    }

    DomainGeometry unit_disk = DomainGeometry::disk({0.0, 0.0}, 1.0);
    ConductivityField unit_field =
        ConductivityField::constant(Mat2Sym::identity(), 1.0);

    BoundaryFunction cos_theta() const {
        FourierSeries s;
        s.period = 2.0 * kPi;
        s.cos_coeffs = {1.0};
        return BoundaryFunction::fourier(s);
    }
    BoundaryFunction cos_n_theta(std::size_t n) const {
        FourierSeries s;
        s.period = 2.0 * kPi;
        s.cos_coeffs.assign(n, 0.0);
        s.cos_coeffs[n - 1] = 1.0;
        return BoundaryFunction::fourier(s);
    }
    std::shared_ptr<ElectrodeConfig> half_circle_electrodes() const {
        return std::make_shared<ElectrodeConfig>(
            unit_disk,
            std::vector<ElectrodeConfig::Arc>{{0.0, kPi}, {kPi, 2.0 * kPi}},
            std::vector<double>{1.0, -1.0}, 1.0);
    }
};

void criterion_1_dirichlet(Suite& s) {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = s.opts.seed;
    const auto start = std::chrono::steady_clock::now();
    const EstimatorResult r =
        solve_dirichlet({0.5, 0.0}, s.cos_theta(), s.unit_field, s.unit_disk,
                        params, s.budget(1e5), s.opts.workers);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const double err = std::abs(r.mean - 0.5);
    const double tol = 3.0 * r.stderr_ + 0.01;
    const bool stderr_ok = r.stderr_ <= 0.005 || s.opts.scale < 1.0;
    const bool runtime_ok = s.opts.workers < 8 || wall <= 120.0;
    s.record(1, "dirichlet-fk", err <= tol && stderr_ok && runtime_ok, params.dt,
             "est=" + fmt(r.mean) + " err=" + fmt(err) + " tol=" + fmt(tol) +
                 " stderr=" + fmt(r.stderr_) + " wall=" + fmt(wall) + "s");
}

void criterion_2_continuum(Suite& s) {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = s.opts.seed + 2;
    ContinuumOptions copts;
    copts.tolerance = 0.004;  // keeps the reported tail bound under 0.005
    copts.gap_resolution = 64;
    FourierSeries f;
    f.period = 2.0 * kPi;
    f.cos_coeffs = {1.0};
    const EstimatorResult r = solve_continuum(
        {0.5, 0.0}, NeumannData{BoundaryFunction::fourier(f)}, s.unit_field,
        s.unit_disk, params, s.budget(1e5), s.opts.workers, copts);
    const double err = std::abs(r.mean - 0.5);
    const double tol = 3.0 * r.stderr_ + 0.02;
    const bool tail_ok = r.truncation_tail_bound <= 0.005;
    s.record(2, "continuum-fk", err <= tol && tail_ok, params.dt,
             "est=" + fmt(r.mean) + " err=" + fmt(err) + " tol=" + fmt(tol) +
                 " tail=" + fmt(r.truncation_tail_bound) +
                 " T=" + fmt(r.horizon_used));
}

void criterion_3_cem(Suite& s) {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = s.opts.seed + 3;
    params.kill_threshold = 1e-4;
    const auto electrodes = s.half_circle_electrodes();

    const GridSolution coarse = fd_solve(ProblemKind::cem, s.unit_disk,
                                         s.unit_field, nullptr,
                                         electrodes.get(), 128);
    const GridSolution fine = fd_solve(ProblemKind::cem, s.unit_disk,
                                       s.unit_field, nullptr, electrodes.get(),
                                       256);

    const Vec2 probes[5] = {
        {0.0, 0.0}, {0.5, 0.0}, {-0.5, 0.0}, {0.0, 0.5}, {0.3, -0.4}};
    const std::uint64_t n = s.budget(1e4);
    bool pass = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < 5; ++i) {
        const EstimatorResult r =
            solve_cem(probes[i], *electrodes, s.unit_field, s.unit_disk, params,
                      n, s.opts.workers, i * n);
        const double ref = fine.evaluate(probes[i]);
        const double oracle_err =
            2.0 * std::abs(fine.evaluate(probes[i]) - coarse.evaluate(probes[i]));
        const double err = std::abs(r.mean - ref);
        const double tol = 3.0 * r.stderr_ + 2.0 * oracle_err;
        bool ok = err <= tol;
        if (i == 0) ok = ok && std::abs(r.mean) <= 3.0 * r.stderr_;
        pass = pass && ok;
        if (i == 1)
            detail << "probe(0.5,0): mc=" << fmt(r.mean) << " fd=" << fmt(ref)
                   << " err=" << fmt(err) << " tol=" << fmt(tol);
        if (i == 0) detail << "center=" << fmt(r.mean) << " ";
    }
    s.record(3, "cem-fk", pass, params.dt, detail.str());
}

void criterion_4_occupation(Suite& s) {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = s.opts.seed + 4;
    bool pass = false;
    std::string detail;
    try {
        const CalibrationResult cal = calibrate_local_time(
            s.unit_disk, s.unit_field, params, s.budget(1e5), s.opts.workers);
        // fresh seed, calibrated constant, uniform-start E L_1 against 2
        SimulationParams check = params;
        check.seed = params.seed + 1;
        check.local_time_constant = cal.rho;
        const OccupationCheckResult occ =
            occupation_check(BoundaryFunction::constant(1.0), 1.0, s.unit_field,
                             s.unit_disk, check, s.budget(5e4), s.opts.workers);
        const double err = std::abs(occ.mc.mean - 2.0);
        const bool rho_ok = std::abs(cal.rho - cal.rho0) <= 0.2 * cal.rho0;
        pass = err <= 3.0 * occ.mc.stderr_ && rho_ok;
        detail = "rho=" + fmt(cal.rho) + " EL1=" + fmt(occ.mc.mean) +
                 " err=" + fmt(err) + " 3se=" + fmt(3.0 * occ.mc.stderr_);
    } catch (const std::exception& e) {
        detail = std::string("calibration failed: ") + e.what();
    }
    s.record(4, "occupation-revuz", pass, params.dt, detail);
}

void criterion_5_scaling(Suite& s) {
    // paired simulation of (unit disk, kappa = 1) and (2D, kappa = 4); the
    // transformed local time must double the base one path by path
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = s.opts.seed + 5;
    const DomainGeometry big = DomainGeometry::disk({0.0, 0.0}, 2.0);
    const ConductivityField big_field =
        ConductivityField::constant(Mat2Sym::isotropic(4.0), 4.0);
    const double dt = params.dt;
    const double horizon = 1.0;
    const std::uint64_t n = s.budget(1e3);

    double worst = 0.0;
    for (std::uint64_t p = 0; p < n; ++p) {
        RandomStream start_rng(params.seed, p, StreamPurpose::start_sampling);
        RandomStream rng(params.seed, p);
        PathState unit;
        unit.position = s.unit_disk.sample_interior(start_rng);
        PathState scaled;
        scaled.position = 2.0 * unit.position;
        while (unit.time < horizon) {
            const auto gauss = rng.gaussian_pair();
            unit = step(unit, s.unit_field, s.unit_disk, dt, gauss,
                        params.local_time_constant)
                       .state;
            scaled = step(scaled, big_field, big, dt, gauss,
                          params.local_time_constant)
                         .state;
            worst = std::max(worst,
                             std::abs(unit.local_time - 2.0 * scaled.local_time));
        }
    }
    const double tol = 5.0 * std::sqrt(dt) * big.diameter();
    s.record(5, "local-time-scaling", worst <= tol, dt,
             "max|L_unit - 2 L_big|=" + fmt(worst) + " tol=" + fmt(tol));
}

void criterion_6_dtn(Suite& s) {
    SimulationParams params;
    params.dt = 1e-6;
    params.seed = s.opts.seed + 6;
    const double t = 0.01;
    const std::size_t grid = 4;
    const std::uint64_t per_start = s.budget(2.5e4);

    bool pass = true;
    std::ostringstream detail;
    const std::size_t orders[2] = {1, 2};
    for (const std::size_t n : orders) {
        const auto est = estimate_dtn(s.cos_n_theta(n), t, s.unit_field,
                                      s.unit_disk, params, per_start, grid,
                                      s.opts.workers);
        double num = 0.0, den = 0.0;
        for (const auto& e : est) {
            const double target =
                static_cast<double>(n) * std::cos(static_cast<double>(n) * e.arc);
            num += (e.value - target) * (e.value - target);
            den += target * target;
        }
        const double rel = std::sqrt(num / den);
        pass = pass && rel <= 0.15;
        detail << "cos" << n << ": relL2=" << fmt(rel) << " ";
    }
    s.record(6, "dtn-generator", pass, params.dt, detail.str());
}

void criterion_7_martingale(Suite& s) {
    SimulationParams params;
    params.dt = 1e-4;
    params.seed = s.opts.seed + 7;
    const auto electrodes = s.half_circle_electrodes();
    const GridSolution oracle = fd_solve(ProblemKind::cem, s.unit_disk,
                                         s.unit_field, nullptr,
                                         electrodes.get(), 128);
    const std::vector<double> t_grid = {0.1, 0.5, 1.0};
    const Vec2 x{0.5, 0.0};
    const std::uint64_t n = s.budget(2e4);

    const auto res_true = martingale_residual(
        [&oracle](Vec2 p) { return oracle.evaluate(p); }, *electrodes,
        s.unit_field, s.unit_disk, params, t_grid, x, n, s.opts.workers);
    bool true_ok = true;
    for (const auto& r : res_true)
        true_ok = true_ok && std::abs(r.mean) <= 3.0 * r.stderr_;

    SimulationParams params2 = params;
    params2.seed = params.seed + 1;
    const auto res_pert = martingale_residual(
        [&oracle](Vec2 p) { return oracle.evaluate(p) + 0.1; }, *electrodes,
        s.unit_field, s.unit_disk, params2, t_grid, x, n, s.opts.workers);
    bool pert_detected = false;
    for (const auto& r : res_pert)
        pert_detected = pert_detected || std::abs(r.mean) > 3.0 * r.stderr_;

    std::ostringstream detail;
    detail << "true:";
    for (const auto& r : res_true) detail << " " << fmt(r.mean / (r.stderr_ > 0 ? r.stderr_ : 1.0)) << "se";
    detail << " perturbed-detected=" << (pert_detected ? "yes" : "no");
    s.record(7, "martingale-residual", true_ok && pert_detected, params.dt,
             detail.str());
}

void criterion_8_weak_order(Suite& s) {
    // common-random-number coupling: the coarse walk consumes the summed fine
    // Gaussian increments, so the bias difference is measured pathwise
    const double dt_f = 1e-4;
    const std::uint64_t n = s.budget(1e6);
    const std::uint64_t seed = s.opts.seed + 8;
    const DomainGeometry& disk = s.unit_disk;
    const double sqf = std::sqrt(dt_f);
    const double tol_b = disk.boundary_tolerance();

    const auto stats = run_paths(
        n, 2, s.opts.workers, [&](std::uint64_t p, std::span<double> out) {
            RandomStream rng(seed, p);
            Vec2 xf{0.5, 0.0}, xc{0.5, 0.0};
            bool fine_done = false, coarse_done = false;
            const Mat2 b = cholesky_lower(Mat2Sym::isotropic(2.0));
            while (!fine_done || !coarse_done) {
                const auto g1 = rng.gaussian_pair();
                const auto g2 = rng.gaussian_pair();
                if (!fine_done) {
                    Vec2 y = xf + b * Vec2{sqf * g1.first, sqf * g1.second};
                    if (disk.signed_distance(y) >= -tol_b) {
                        out[0] = std::cos(std::atan2(y.y, y.x));
                        fine_done = true;
                    } else {
                        xf = y;
                        y = xf + b * Vec2{sqf * g2.first, sqf * g2.second};
                        if (disk.signed_distance(y) >= -tol_b) {
                            out[0] = std::cos(std::atan2(y.y, y.x));
                            fine_done = true;
                        } else {
                            xf = y;
                        }
                    }
                }
                if (!coarse_done) {
                    const Vec2 dw{sqf * (g1.first + g2.first),
                                  sqf * (g1.second + g2.second)};
                    const Vec2 y = xc + b * dw;
                    if (disk.signed_distance(y) >= -tol_b) {
                        out[1] = std::cos(std::atan2(y.y, y.x));
                        coarse_done = true;
                    } else {
                        xc = y;
                    }
                }
            }
        });
    const double bias_f = std::abs(stats[0].mean - 0.5);
    const double bias_c = std::abs(stats[1].mean - 0.5);
    const double order = std::log2(bias_c / bias_f);
    const bool pass = bias_f < bias_c && order >= 0.4;
    s.record(8, "weak-order", pass, dt_f,
             "bias(2e-4)=" + fmt(bias_c) + " bias(1e-4)=" + fmt(bias_f) +
                 " order=" + fmt(order));
}

void criterion_9_determinism(Suite& s) {
    SimulationParams params;
    params.dt = 1e-3;
    params.seed = s.opts.seed + 9;
    params.kill_threshold = 1e-3;
    const auto electrodes = s.half_circle_electrodes();
    const Vec2 probes[2] = {{0.5, 0.0}, {0.0, 0.25}};
    const std::uint64_t n = s.budget(4e3);

    std::string rendered[3];
    const int worker_counts[3] = {1, 4, 8};
    for (int k = 0; k < 3; ++k) {
        std::ostringstream out;
        for (std::size_t i = 0; i < 2; ++i) {
            const EstimatorResult r =
                solve_cem(probes[i], *electrodes, s.unit_field, s.unit_disk,
                          params, n, worker_counts[k], i * n);
            char buf[80];
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", r.mean, r.stderr_);
            out << buf;
        }
        rendered[k] = out.str();
    }
    const bool pass = rendered[0] == rendered[1] && rendered[1] == rendered[2];
    s.record(9, "determinism", pass, params.dt,
             pass ? "estimates byte-identical for workers {1,4,8}"
                  : "estimate bytes differ across worker counts");
}

void criterion_10_oracle(Suite& s) {
    // convergence order of the deterministic solver against the analytic
    // Neumann solution, plus spectral gaps against Bessel / pi^2 references
    FourierSeries f;
    f.period = 2.0 * kPi;
    f.cos_coeffs = {1.0};
    const BoundaryFunction data = BoundaryFunction::fourier(f);
    const FourierBoundaryData fd_data = FourierBoundaryData::harmonic_cos(1);

    const Vec2 probes[3] = {{0.5, 0.0}, {0.3, 0.4}, {0.0, 0.7}};
    double errs[3];
    const int resolutions[3] = {32, 64, 128};
    for (int k = 0; k < 3; ++k) {
        const GridSolution sol =
            fd_solve(ProblemKind::continuum, s.unit_disk, s.unit_field, &data,
                     nullptr, resolutions[k]);
        double e = 0.0;
        for (const Vec2 p : probes) {
            const double r = norm(p);
            const double theta = std::atan2(p.y, p.x);
            e = std::max(e, std::abs(sol.evaluate(p) -
                                     disk_neumann_analytic(fd_data, r, theta)));
        }
        errs[k] = e;
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    const bool order_ok = std::min(order1, order2) >= 1.9;

    const double bessel_gap = 1.8411837813406593 * 1.8411837813406593;
    const double disk_gap = spectral_gap(
        s.unit_disk, [](Vec2) { return 1.0; }, 64);
    const DomainGeometry square = DomainGeometry::rectangle({0.0, 0.0}, {1.0, 1.0});
    const double square_gap = spectral_gap(square, [](Vec2) { return 1.0; }, 64);
    const double disk_rel = std::abs(disk_gap - bessel_gap) / bessel_gap;
    const double square_rel = std::abs(square_gap - kPi * kPi) / (kPi * kPi);
    const bool gaps_ok = disk_rel <= 0.02 && square_rel <= 0.02;

    s.record(10, "oracle-self-check", order_ok && gaps_ok, 0.0,
             "orders=" + fmt(order1) + "," + fmt(order2) +
                 " disk-gap=" + fmt(disk_gap) + " (" + fmt(disk_rel * 100) +
                 "%) square-gap=" + fmt(square_gap) + " (" +
                 fmt(square_rel * 100) + "%)");
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
    Suite s{options};
    if (s.wanted(1)) criterion_1_dirichlet(s);
    if (s.wanted(2)) criterion_2_continuum(s);
    if (s.wanted(3)) criterion_3_cem(s);
    if (s.wanted(4)) criterion_4_occupation(s);
    if (s.wanted(5)) criterion_5_scaling(s);
    if (s.wanted(6)) criterion_6_dtn(s);
    if (s.wanted(7)) criterion_7_martingale(s);
    if (s.wanted(8)) criterion_8_weak_order(s);
    if (s.wanted(9)) criterion_9_determinism(s);
    if (s.wanted(10)) criterion_10_oracle(s);
    return s.results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace eitmc
