#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eitmc/boundary_data.hpp"
#include "eitmc/conductivity.hpp"
#include "eitmc/geometry.hpp"
#include "eitmc/reflecting_sde.hpp"

namespace eitmc {

// Flat key-value run configuration ("key = value" lines, '#' comments).
// Lengths are in abstract length units, times in diffusion time units.
// Parsing keeps the raw map so a manifest echo can round-trip losslessly.
struct RunConfig {
    std::map<std::string, std::string> raw;

    DomainGeometry domain = DomainGeometry::disk({0.0, 0.0}, 1.0);
    ConductivityField field =
        ConductivityField::constant(Mat2Sym::identity(), 1.0);
    SimulationParams params;
    std::uint64_t n_paths = 10000;
    int workers = 1;
    std::vector<Vec2> probes;

    std::shared_ptr<const ElectrodeConfig> electrodes;  // null if absent
    BoundaryFunction data = BoundaryFunction::zero();   // f or phi by context
    bool has_data = false;

    double continuum_tolerance = 0.005;
    double c3_override = 0.0;

    // trace / dtn / jump-kernel settings
    double trace_horizon = 1.0;
    double trace_spacing = 0.01;
    double trace_jump_threshold = 0.0;
    double trace_start_arc = 0.0;
    std::uint64_t trace_n_paths = 64;
    double dtn_t = 0.01;
    std::size_t dtn_start_grid = 4;
    std::size_t jump_bins = 8;
    double jump_min_gap = 0.0;

    std::string oracle_kind = "continuum";
    int oracle_resolution = 64;

    double acceptance_scale = 1.0;  // validate subcommand path budget factor

    std::string output_dir = "out";

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text);
    static RunConfig from_raw(std::map<std::string, std::string> raw);
};

}  // namespace eitmc
