#include "eitmc/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eitmc/errors.hpp"

namespace eitmc {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_numbers(const std::string& v, const std::string& key) {
    std::istringstream in(v);
    std::vector<double> out;
    double x;
    while (in >> x) out.push_back(x);
    std::string rest;
    if (in.clear(), in >> rest)
        throw ConfigError("non-numeric token in '" + key + "'");
    return out;
}

class Lookup {
  public:
    explicit Lookup(const std::map<std::string, std::string>& raw) : raw_(raw) {}

    bool has(const std::string& key) const { return raw_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) const {
        const auto it = raw_.find(key);
        return it == raw_.end() ? fallback : trim(it->second);
    }

    double num(const std::string& key, double fallback) const {
        const auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        const auto v = parse_numbers(it->second, key);
        if (v.size() != 1) throw ConfigError("'" + key + "' needs one number");
        return v[0];
    }

    std::vector<double> nums(const std::string& key) const {
        const auto it = raw_.find(key);
        if (it == raw_.end()) return {};
        return parse_numbers(it->second, key);
    }

    bool flag(const std::string& key, bool fallback) const {
        const auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        const std::string v = trim(it->second);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("'" + key + "' must be a boolean");
    }

  private:
    const std::map<std::string, std::string>& raw_;
};

DomainGeometry build_domain(const Lookup& cfg) {
    const std::string shape = cfg.str("domain.shape", "disk");
    if (shape == "disk") {
        const auto c = cfg.nums("domain.center");
        if (!c.empty() && c.size() != 2)
            throw ConfigError("domain.center needs two numbers");
        return DomainGeometry::disk(c.empty() ? Vec2{0.0, 0.0} : Vec2{c[0], c[1]},
                                    cfg.num("domain.radius", 1.0));
    }
    if (shape == "rectangle") {
        const auto lo = cfg.nums("domain.lo");
        const auto hi = cfg.nums("domain.hi");
        if (lo.size() != 2 || hi.size() != 2)
            throw ConfigError("rectangle needs domain.lo and domain.hi pairs");
        return DomainGeometry::rectangle({lo[0], lo[1]}, {hi[0], hi[1]});
    }
    if (shape == "polygon") {
        const auto v = cfg.nums("domain.vertices");
        if (v.size() < 6 || v.size() % 2 != 0)
            throw ConfigError("domain.vertices needs x y pairs (>= 3 vertices)");
        std::vector<Vec2> verts;
        for (std::size_t i = 0; i + 1 < v.size(); i += 2)
            verts.push_back({v[i], v[i + 1]});
        return DomainGeometry::convex_polygon(std::move(verts));
    }
    throw ConfigError("unknown domain.shape: " + shape);
}

ConductivityField build_field(const Lookup& cfg, const DomainGeometry& domain) {
    const std::string kind = cfg.str("conductivity.kind", "constant");
    const double c0 = cfg.num("conductivity.c0", 1.0);
    if (!(c0 >= 1.0))
        throw ConfigError("conductivity.c0 (declared ellipticity) must be >= 1");

    ConductivityField field = ConductivityField::constant(Mat2Sym::identity(), c0);
    if (kind == "constant") {
        const auto m = cfg.nums("conductivity.matrix");
        Mat2Sym k = Mat2Sym::identity();
        if (m.size() == 1) k = Mat2Sym::isotropic(m[0]);
        else if (m.size() == 3) k = {m[0], m[1], m[2]};
        else if (!m.empty())
            throw ConfigError("conductivity.matrix needs 'c' or 'k11 k12 k22'");
        field = ConductivityField::constant(k, c0);
    } else if (kind == "radial") {
        const auto c = cfg.nums("conductivity.center");
        const auto coeffs = cfg.nums("conductivity.radial_coeffs");
        if (coeffs.empty())
            throw ConfigError("radial conductivity needs radial_coeffs");
        field = ConductivityField::radial_isotropic(
            c.size() == 2 ? Vec2{c[0], c[1]} : Vec2{0.0, 0.0}, coeffs, c0);
    } else if (kind == "bump") {
        const auto bg = cfg.nums("conductivity.background");
        Mat2Sym background = Mat2Sym::identity();
        if (bg.size() == 1) background = Mat2Sym::isotropic(bg[0]);
        else if (bg.size() == 3) background = {bg[0], bg[1], bg[2]};
        else if (!bg.empty())
            throw ConfigError("conductivity.background needs 'c' or 'k11 k12 k22'");
        const auto c = cfg.nums("conductivity.center");
        field = ConductivityField::smooth_bump(
            background, c.size() == 2 ? Vec2{c[0], c[1]} : Vec2{0.0, 0.0},
            cfg.num("conductivity.bump_radius", 0.5),
            cfg.num("conductivity.bump_amplitude", 0.0), c0);
    } else if (kind == "grid") {
        const std::string file = cfg.str("conductivity.grid_file", "");
        if (file.empty()) throw ConfigError("grid conductivity needs grid_file");
        field = ConductivityField::grid_sampled(GridField::load_csv(file), c0);
    } else {
        throw ConfigError("unknown conductivity.kind: " + kind);
    }

    const double collar = cfg.num("conductivity.collar", 0.0);
    if (collar > 0.0) field = field.with_collar(collar, domain);
    return field;
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
    std::map<std::string, std::string> raw;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        raw[key] = trim(line.substr(eq + 1));
    }
    return from_raw(std::move(raw));
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

RunConfig RunConfig::from_raw(std::map<std::string, std::string> raw_map) {
    RunConfig c;
    c.raw = std::move(raw_map);
    const Lookup cfg(c.raw);

    c.domain = build_domain(cfg);
    c.field = build_field(cfg, c.domain);

    c.params.dt = cfg.num("sim.dt", 0.0);
    if (cfg.has("sim.dt") && !(c.params.dt > 0.0))
        throw ConfigError("sim.dt must be positive");
    c.params.seed = static_cast<std::uint64_t>(cfg.num("sim.seed", 0.0));
    c.params.max_time = cfg.num("sim.max_time", 0.0);
    c.params.kill_threshold = cfg.num("sim.kill_threshold", 1e-6);
    c.params.local_time_constant =
        cfg.num("sim.local_time_constant", kHalfSpaceLocalTimeConstant);
    c.workers = static_cast<int>(cfg.num("sim.workers", 1.0));
    if (c.workers < 1) throw ConfigError("sim.workers must be >= 1");
    c.continuum_tolerance = cfg.num("sim.tolerance", 0.005);
    c.c3_override = cfg.num("sim.c3", 0.0);

    const auto probes = cfg.nums("probes");
    if (probes.size() % 2 != 0) throw ConfigError("probes needs x y pairs");
    for (std::size_t i = 0; i + 1 < probes.size(); i += 2)
        c.probes.push_back({probes[i], probes[i + 1]});

    if (cfg.has("electrodes.arcs")) {
        const auto arcs = cfg.nums("electrodes.arcs");
        if (arcs.size() % 2 != 0 || arcs.empty())
            throw ConfigError("electrodes.arcs needs begin end pairs");
        std::vector<ElectrodeConfig::Arc> intervals;
        for (std::size_t i = 0; i + 1 < arcs.size(); i += 2)
            intervals.push_back({arcs[i], arcs[i + 1]});
        const auto voltages = cfg.nums("electrodes.voltages");
        c.electrodes = std::make_shared<ElectrodeConfig>(
            c.domain, std::move(intervals), voltages,
            cfg.num("electrodes.z", 1.0),
            cfg.flag("electrodes.allow_ungrounded", false));
    }

    const std::string data_kind = cfg.str("data.kind", "");
    if (data_kind == "fourier") {
        FourierSeries s;
        s.period = c.domain.boundary_measure();
        s.mean = cfg.num("data.mean", 0.0);
        s.cos_coeffs = cfg.nums("data.cos");
        s.sin_coeffs = cfg.nums("data.sin");
        c.data = BoundaryFunction::fourier(std::move(s));
        c.has_data = true;
    } else if (data_kind == "electrodes") {
        if (!c.electrodes)
            throw ConfigError("data.kind = electrodes needs an electrode config");
        c.data = BoundaryFunction::electrode_current(c.electrodes);
        c.has_data = true;
    } else if (data_kind == "constant") {
        c.data = BoundaryFunction::constant(cfg.num("data.value", 0.0));
        c.has_data = true;
    } else if (!data_kind.empty()) {
        throw ConfigError("unknown data.kind: " + data_kind);
    }

    // Neumann compatibility is enforced at load when the intent is explicit.
    if (cfg.str("problem.type", "") == "continuum" && c.has_data) {
        NeumannData nd{c.data};
        nd.validate(c.domain);
    }

    c.trace_horizon = cfg.num("trace.horizon", 1.0);
    c.trace_spacing = cfg.num("trace.spacing", 0.01);
    c.trace_jump_threshold = cfg.num("trace.jump_threshold", 0.0);
    c.trace_start_arc = cfg.num("trace.start_arc", 0.0);
    c.trace_n_paths =
        static_cast<std::uint64_t>(cfg.num("trace.n_paths", 64.0));
    c.dtn_t = cfg.num("dtn.t", 0.01);
    c.dtn_start_grid = static_cast<std::size_t>(cfg.num("dtn.start_grid", 4.0));
    c.jump_bins = static_cast<std::size_t>(cfg.num("jump.bins", 8.0));
    c.jump_min_gap = cfg.num("jump.min_gap", 0.0);

    c.oracle_kind = cfg.str("oracle.kind", "continuum");
    c.oracle_resolution = static_cast<int>(cfg.num("oracle.resolution", 64.0));
    c.acceptance_scale = cfg.num("validate.scale", 1.0);
    c.output_dir = cfg.str("output.dir", "out");

    const double n_paths = cfg.num("sim.n_paths", 10000.0);
    if (!(n_paths >= 2.0)) throw ConfigError("sim.n_paths must be >= 2");
    c.n_paths = static_cast<std::uint64_t>(n_paths);
    return c;
}

}  // namespace eitmc
