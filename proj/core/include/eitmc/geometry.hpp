#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "eitmc/rng.hpp"
#include "eitmc/vec2.hpp"

namespace eitmc {

// A point on the boundary together with the outward unit normal and its
// arclength coordinate in [0, perimeter).
struct BoundaryPoint {
    Vec2 position;
    Vec2 outward_normal;
    double arc_parameter = 0.0;
};

enum class ShapeKind { disk, rectangle, polygon };

// Bounded convex 2-D domain: disk, axis-aligned rectangle, or strictly convex
// counter-clockwise polygon. Immutable after construction and cheap to copy,
// so it can be shared freely across workers.
class DomainGeometry {
  public:
    static DomainGeometry disk(Vec2 center, double radius);
    static DomainGeometry rectangle(Vec2 lo, Vec2 hi);
    static DomainGeometry convex_polygon(std::vector<Vec2> vertices);

    ShapeKind kind() const { return kind_; }

    // Negative inside, zero on the boundary, positive outside; |value| is the
    // Euclidean distance to the boundary.
    double signed_distance(Vec2 x) const;

    BoundaryPoint project_to_boundary(Vec2 x) const;

    double boundary_measure() const { return perimeter_; }
    double area() const { return area_; }
    double diameter() const { return diameter_; }

    // Points with |signed_distance| below this count as lying on the boundary.
    double boundary_tolerance() const { return 1e-12 * diameter_; }

    bool contains(Vec2 x) const {
        return signed_distance(x) <= boundary_tolerance();
    }

    // Maps an arclength coordinate (taken mod the perimeter) to the boundary.
    BoundaryPoint point_at_arc(double s) const;

    // Inverse of point_at_arc for points on (or near) the boundary.
    double arc_parameter_of(Vec2 position_near_boundary) const;

    Vec2 sample_interior(RandomStream& rng) const;
    BoundaryPoint sample_boundary(RandomStream& rng) const;

    // Shape accessors (valid for the matching kind only).
    Vec2 disk_center() const { return center_; }
    double disk_radius() const { return radius_; }
    Vec2 rect_lo() const { return lo_; }
    Vec2 rect_hi() const { return hi_; }
    const std::vector<Vec2>& polygon_vertices() const { return vertices_; }

  private:
    DomainGeometry() = default;

    BoundaryPoint project_disk(Vec2 x) const;
    BoundaryPoint project_rectangle(Vec2 x) const;
    BoundaryPoint project_polygon(Vec2 x) const;

    ShapeKind kind_ = ShapeKind::disk;
    // disk
    Vec2 center_;
    double radius_ = 0.0;
    // rectangle
    Vec2 lo_, hi_;
    // polygon
    std::vector<Vec2> vertices_;
    std::vector<Vec2> edge_normals_;
    std::vector<double> cumulative_arc_;  // arc coordinate of each vertex

    double perimeter_ = 0.0;
    double area_ = 0.0;
    double diameter_ = 0.0;
};

// Electrode layout on the boundary: disjoint half-open arcs [a_l, b_l) in the
// arclength coordinate, prescribed voltages and a contact impedance z > 0.
// Induces the piecewise constant boundary data g = z^-1 sum [E_l] and
// f = z^-1 sum U_l [E_l].
class ElectrodeConfig {
  public:
    struct Arc {
        double begin;
        double end;  // exclusive
        double length() const { return end - begin; }
    };

    ElectrodeConfig(const DomainGeometry& domain,
                    std::vector<Arc> arcs,
                    std::vector<double> voltages,
                    double contact_impedance,
                    bool allow_ungrounded = false);

    std::optional<std::size_t> electrode_at(const BoundaryPoint& p) const {
        return electrode_at_arc(p.arc_parameter);
    }
    std::optional<std::size_t> electrode_at_arc(double s) const;

    double g_at(const BoundaryPoint& p) const {
        return electrode_at(p) ? 1.0 / contact_impedance_ : 0.0;
    }
    double f_at(const BoundaryPoint& p) const {
        const auto l = electrode_at(p);
        return l ? voltages_[*l] / contact_impedance_ : 0.0;
    }

    std::size_t size() const { return arcs_.size(); }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const std::vector<double>& voltages() const { return voltages_; }
    double contact_impedance() const { return contact_impedance_; }
    bool grounded() const { return grounded_; }

  private:
    std::vector<Arc> arcs_;               // sorted by begin
    std::vector<std::size_t> order_;      // original index per sorted arc
    std::vector<double> voltages_;        // in original order
    double contact_impedance_ = 1.0;
    bool grounded_ = true;
};

}  // namespace eitmc
