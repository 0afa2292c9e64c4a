#include "eitmc/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "eitmc/acceptance.hpp"
#include "eitmc/boundary_process.hpp"
#include "eitmc/errors.hpp"
#include "eitmc/feynman_kac.hpp"
#include "eitmc/pde_oracle.hpp"
#include "eitmc/version.hpp"

namespace eitmc {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Csv {
    std::ostringstream out;
    explicit Csv(const std::string& header) { out << header << "\n"; }
    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((out << (first ? "" : ","), first = false, emit(cells)), ...);
        out << "\n";
    }
    void emit(double v) { out << fmt(v); }
    void emit(std::uint64_t v) { out << v; }
    void emit(int v) { out << v; }
    void emit(const std::string& s) { out << s; }
    void emit(const char* s) { out << s; }
    std::string str() const { return out.str(); }
};

RunOutcome solve_report(const std::string& subcommand, const RunConfig& c) {
    if (c.probes.empty())
        throw ConfigError(subcommand + " needs at least one probe point");
    const double dt = c.params.resolved_dt(c.domain);

    Csv csv("probe_x,probe_y,mean,stderr,n_paths,horizon,tail_bound,dt,seed");
    for (std::size_t i = 0; i < c.probes.size(); ++i) {
        const Vec2 x = c.probes[i];
        // independent path budget per probe
        const std::uint64_t stream_base = static_cast<std::uint64_t>(i) * c.n_paths;
        EstimatorResult r;
        if (subcommand == "solve-dirichlet") {
            if (!c.has_data) throw ConfigError("solve-dirichlet needs data.*");
            r = solve_dirichlet(x, c.data, c.field, c.domain, c.params, c.n_paths,
                                c.workers, stream_base);
        } else if (subcommand == "solve-continuum") {
            if (!c.has_data) throw ConfigError("solve-continuum needs data.*");
            ContinuumOptions opts;
            opts.tolerance = c.continuum_tolerance;
            opts.c3_override = c.c3_override;
            r = solve_continuum(x, NeumannData{c.data}, c.field, c.domain,
                                c.params, c.n_paths, c.workers, opts, stream_base);
        } else {
            if (!c.electrodes) throw ConfigError("solve-cem needs electrodes.*");
            r = solve_cem(x, *c.electrodes, c.field, c.domain, c.params,
                          c.n_paths, c.workers, stream_base);
        }
        csv.row(x.x, x.y, r.mean, r.stderr_, r.n_paths, r.horizon_used,
                r.truncation_tail_bound, dt, c.params.seed);
    }
    RunOutcome out;
    out.reports.push_back({subcommand + ".csv", csv.str()});
    return out;
}

RunOutcome dtn_report(const RunConfig& c) {
    if (!c.has_data) throw ConfigError("estimate-dtn needs data.*");
    const double dt = c.params.resolved_dt(c.domain);
    const auto samples =
        estimate_dtn(c.data, c.dtn_t, c.field, c.domain, c.params, c.n_paths,
                     c.dtn_start_grid, c.workers);
    Csv csv("arc,phi,dtn_mean,dtn_stderr,mean_level,n_paths,dt,seed");
    for (const auto& s : samples) {
        const BoundaryPoint p = c.domain.point_at_arc(s.arc);
        csv.row(s.arc, c.data(p), s.value, s.stderr_, s.mean_level, c.n_paths,
                dt, c.params.seed);
    }
    RunOutcome out;
    out.reports.push_back({"estimate-dtn.csv", csv.str()});
    return out;
}

std::vector<BoundaryTrace> generate_traces(const RunConfig& c,
                                           bool spread_starts) {
    TraceOptions opts;
    opts.sample_spacing = c.trace_spacing;
    opts.jump_threshold = c.trace_jump_threshold;
    const std::uint64_t n = c.trace_n_paths;
    std::vector<BoundaryTrace> traces(n);
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto work = [&] {
        try {
            for (;;) {
                const std::uint64_t p = next.fetch_add(1);
                if (p >= n || failed.load()) break;
                const double arc =
                    spread_starts
                        ? static_cast<double>(p) * c.domain.boundary_measure() /
                              static_cast<double>(n)
                        : c.trace_start_arc;
                RandomStream rng(c.params.seed, p);
                traces[p] = trace_path(c.domain.point_at_arc(arc),
                                       c.trace_horizon, c.field, c.domain,
                                       c.params, opts, rng);
            }
        } catch (...) {
            std::scoped_lock lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
        }
    };
    if (c.workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < c.workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return traces;
}

RunOutcome trace_report(const RunConfig& c) {
    const double dt = c.params.resolved_dt(c.domain);
    const auto traces = generate_traces(c, false);
    Csv csv("path_id,s,arc,jump_flag,dt,seed");
    for (std::uint64_t p = 0; p < traces.size(); ++p) {
        const auto& tr = traces[p];
        std::size_t jump_idx = 0;
        for (const auto& s : tr.samples) {
            int flag = 0;
            while (jump_idx < tr.jumps.size() && tr.jumps[jump_idx].s < s.s)
                ++jump_idx;
            if (jump_idx < tr.jumps.size() && tr.jumps[jump_idx].s == s.s)
                flag = 1;
            csv.row(p, s.s, s.point.arc_parameter, flag, dt, c.params.seed);
        }
    }
    RunOutcome out;
    out.reports.push_back({"boundary-trace.csv", csv.str()});
    return out;
}

RunOutcome jump_kernel_report(const RunConfig& c) {
    const double dt = c.params.resolved_dt(c.domain);
    const auto traces = generate_traces(c, true);
    const auto est =
        jump_statistics(traces, c.jump_bins, c.domain, c.jump_min_gap);
    Csv csv("from_arc,to_arc,count,exposure_from,estimate,dt,seed");
    for (std::size_t i = 0; i < est.n_bins; ++i)
        for (std::size_t j = 0; j < est.n_bins; ++j)
            csv.row((static_cast<double>(i) + 0.5) * est.bin_width,
                    (static_cast<double>(j) + 0.5) * est.bin_width,
                    est.count(i, j), est.exposure[i], est.kernel(i, j), dt,
                    c.params.seed);
    RunOutcome out;
    out.reports.push_back({"jump-kernel.csv", csv.str()});
    return out;
}

RunOutcome calibrate_report(const RunConfig& c) {
    const double dt = c.params.resolved_dt(c.domain);
    const auto r = calibrate_local_time(c.domain, c.field, c.params, c.n_paths,
                                        c.workers);
    Csv csv("rho,rho0,rho_stderr,target,measured_raw,n_paths,dt,seed");
    csv.row(r.rho, r.rho0, r.rho_stderr, r.target, r.measured_raw, r.n_paths,
            dt, c.params.seed);
    RunOutcome out;
    out.reports.push_back({"calibrate.csv", csv.str()});
    return out;
}

RunOutcome oracle_report(const RunConfig& c) {
    ProblemKind kind;
    if (c.oracle_kind == "dirichlet") kind = ProblemKind::dirichlet;
    else if (c.oracle_kind == "continuum") kind = ProblemKind::continuum;
    else if (c.oracle_kind == "cem") kind = ProblemKind::cem;
    else throw ConfigError("unknown oracle.kind: " + c.oracle_kind);

    const BoundaryFunction* data = c.has_data ? &c.data : nullptr;
    const GridSolution sol = fd_solve(kind, c.domain, c.field, data,
                                      c.electrodes.get(), c.oracle_resolution);
    Csv csv("x,y,value,resolution,dt,seed");
    const double dt = c.params.resolved_dt(c.domain);
    for (std::size_t j = 0; j < sol.n2(); ++j)
        for (std::size_t i = 0; i < sol.n1(); ++i) {
            const Vec2 p = sol.cell_center(i, j);
            csv.row(p.x, p.y, sol.values()[j * sol.n1() + i],
                    c.oracle_resolution, dt, c.params.seed);
        }
    RunOutcome out;
    out.reports.push_back({"oracle.csv", csv.str()});
    return out;
}

RunOutcome validate_report(const RunConfig& c) {
    AcceptanceOptions opts;
    opts.workers = c.workers;
    opts.seed = c.params.seed != 0 ? c.params.seed : 20240811;
    opts.scale = c.acceptance_scale;
    opts.progress = &std::cout;
    const auto results = run_acceptance(opts);
    Csv csv("criterion,name,pass,detail,dt,seed");
    for (const auto& r : results)
        csv.row(r.id, r.name, r.pass ? 1 : 0, "\"" + r.detail + "\"", r.dt,
                opts.seed);
    RunOutcome out;
    out.reports.push_back({"validate.csv", csv.str()});
    if (!all_passed(results)) out.exit_code = 3;
    return out;
}

}  // namespace

RunOutcome execute_subcommand(const std::string& subcommand,
                              const RunConfig& config) {
    try {
        if (subcommand == "solve-dirichlet" || subcommand == "solve-continuum" ||
            subcommand == "solve-cem")
            return solve_report(subcommand, config);
        if (subcommand == "estimate-dtn") return dtn_report(config);
        if (subcommand == "boundary-trace") return trace_report(config);
        if (subcommand == "jump-kernel") return jump_kernel_report(config);
        if (subcommand == "calibrate") return calibrate_report(config);
        if (subcommand == "oracle") return oracle_report(config);
        if (subcommand == "validate") return validate_report(config);
        throw ConfigError("unknown subcommand: " + subcommand);
    } catch (const ConfigError& e) {
        return {1, {}, e.what()};
    } catch (const std::exception& e) {
        return {2, {}, e.what()};
    }
}

int run_and_write(const std::string& subcommand, const RunConfig& config,
                  const std::string& config_path) {
    const auto start = std::chrono::steady_clock::now();
    const RunOutcome outcome = execute_subcommand(subcommand, config);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    if (outcome.exit_code == 1 || outcome.exit_code == 2) {
        std::cerr << "error: " << outcome.error << "\n";
        return outcome.exit_code;
    }

    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    std::vector<std::string> written;
    for (const auto& report : outcome.reports) {
        const fs::path p = fs::path(config.output_dir) / report.name;
        std::ofstream out(p);
        if (!out) {
            std::cerr << "error: cannot write " << p << "\n";
            return 2;
        }
        out << report.content;
        written.push_back(p.string());
    }

    nlohmann::json manifest;
    manifest["subcommand"] = subcommand;
    manifest["version"] = kVersion;
    manifest["config_path"] = config_path;
    manifest["config"] = config.raw;
    manifest["seed"] = config.params.seed;
    manifest["dt"] = config.params.resolved_dt(config.domain);
    manifest["n_paths"] = config.n_paths;
    manifest["workers"] = config.workers;
    manifest["wall_time_s"] = wall;
    manifest["outputs"] = written;
    const fs::path mpath =
        fs::path(config.output_dir) / (subcommand + "_manifest.json");
    std::ofstream mout(mpath);
    mout << manifest.dump(2) << "\n";

    for (const auto& p : written) std::cout << "wrote " << p << "\n";
    std::cout << "wrote " << mpath.string() << "\n";
    return outcome.exit_code;
}

}  // namespace eitmc
