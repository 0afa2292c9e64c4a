#include "eitmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eitmc/errors.hpp"

namespace eitmc {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_arc(double s, double perimeter) {
    double w = std::fmod(s, perimeter);
    if (w < 0.0) w += perimeter;
    return w;
}

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

}  // namespace

DomainGeometry DomainGeometry::disk(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw ConfigError("disk radius must be positive");
    DomainGeometry d;
    d.kind_ = ShapeKind::disk;
    d.center_ = center;
    d.radius_ = radius;
    d.perimeter_ = 2.0 * kPi * radius;
    d.area_ = kPi * radius * radius;
    d.diameter_ = 2.0 * radius;
    return d;
}

DomainGeometry DomainGeometry::rectangle(Vec2 lo, Vec2 hi) {
    if (!(lo.x < hi.x && lo.y < hi.y))
        throw ConfigError("rectangle requires lo < hi componentwise");
    DomainGeometry d;
    d.kind_ = ShapeKind::rectangle;
    d.lo_ = lo;
    d.hi_ = hi;
    const double w = hi.x - lo.x, h = hi.y - lo.y;
    d.perimeter_ = 2.0 * (w + h);
    d.area_ = w * h;
    d.diameter_ = std::sqrt(w * w + h * h);
    return d;
}

DomainGeometry DomainGeometry::convex_polygon(std::vector<Vec2> vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) throw ConfigError("polygon needs at least 3 vertices");
    DomainGeometry d;
    d.kind_ = ShapeKind::polygon;

    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vertices[i];
        const Vec2 b = vertices[(i + 1) % n];
        const Vec2 c = vertices[(i + 2) % n];
        const double turn = cross(b - a, c - b);
        if (!(turn > 0.0))
            throw ConfigError(
                "polygon vertices must be strictly convex and counter-clockwise");
        twice_area += cross(a, b);
    }

    d.vertices_ = std::move(vertices);
    d.area_ = 0.5 * twice_area;
    d.cumulative_arc_.resize(n + 1);
    d.edge_normals_.resize(n);
    d.cumulative_arc_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = d.vertices_[i];
        const Vec2 b = d.vertices_[(i + 1) % n];
        const Vec2 e = b - a;
        const double len = norm(e);
        if (!(len > 0.0)) throw ConfigError("degenerate polygon edge");
        d.cumulative_arc_[i + 1] = d.cumulative_arc_[i] + len;
        d.edge_normals_[i] = Vec2{e.y, -e.x} / len;  // outward for CCW
    }
    d.perimeter_ = d.cumulative_arc_[n];
    d.diameter_ = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d.diameter_ = std::max(d.diameter_, norm(d.vertices_[i] - d.vertices_[j]));
    return d;
}

double DomainGeometry::signed_distance(Vec2 x) const {
    switch (kind_) {
        case ShapeKind::disk:
            return norm(x - center_) - radius_;
        case ShapeKind::rectangle: {
            const double qx = std::max(lo_.x - x.x, x.x - hi_.x);
            const double qy = std::max(lo_.y - x.y, x.y - hi_.y);
            if (qx <= 0.0 && qy <= 0.0) return std::max(qx, qy);
            const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
            return std::sqrt(ox * ox + oy * oy);
        }
        case ShapeKind::polygon: {
            double best = std::numeric_limits<double>::infinity();
            bool inside = true;
            const std::size_t n = vertices_.size();
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2 a = vertices_[i];
                const Vec2 b = vertices_[(i + 1) % n];
                const Vec2 e = b - a;
                if (cross(e, x - a) < 0.0) inside = false;
                const double t =
                    std::clamp(dot(x - a, e) / norm2(e), 0.0, 1.0);
                best = std::min(best, norm(x - (a + t * e)));
            }
            return inside ? -best : best;
        }
    }
    return 0.0;
}

BoundaryPoint DomainGeometry::project_disk(Vec2 x) const {
    const Vec2 r = x - center_;
    const double d = norm(r);
    if (d <= boundary_tolerance())
        throw AmbiguousProjection("projection from the disk center is not unique");
    const Vec2 nu = r / d;
    const double theta = std::atan2(nu.y, nu.x);
    const double s = wrap_arc(radius_ * theta, perimeter_);
    return {center_ + radius_ * nu, nu, s};
}

BoundaryPoint DomainGeometry::project_rectangle(Vec2 x) const {
    const double qx = std::max(lo_.x - x.x, x.x - hi_.x);
    const double qy = std::max(lo_.y - x.y, x.y - hi_.y);
    Vec2 p, nu;
    if (qx > 0.0 && qy > 0.0) {
        // exterior corner region: nearest point is the vertex
        p = {std::clamp(x.x, lo_.x, hi_.x), std::clamp(x.y, lo_.y, hi_.y)};
        nu = normalized({x.x > hi_.x ? 1.0 : -1.0, x.y > hi_.y ? 1.0 : -1.0});
    } else if (qx >= qy) {
        // nearest face is vertical
        const bool right = (x.x - hi_.x) >= (lo_.x - x.x);
        p = {right ? hi_.x : lo_.x, std::clamp(x.y, lo_.y, hi_.y)};
        nu = {right ? 1.0 : -1.0, 0.0};
    } else {
        const bool top = (x.y - hi_.y) >= (lo_.y - x.y);
        p = {std::clamp(x.x, lo_.x, hi_.x), top ? hi_.y : lo_.y};
        nu = {0.0, top ? 1.0 : -1.0};
    }
    return {p, nu, arc_parameter_of(p)};
}

BoundaryPoint DomainGeometry::project_polygon(Vec2 x) const {
    const std::size_t n = vertices_.size();
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_p;
    std::size_t best_edge = 0;
    double best_t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vertices_[i];
        const Vec2 e = vertices_[(i + 1) % n] - a;
        const double t = std::clamp(dot(x - a, e) / norm2(e), 0.0, 1.0);
        const Vec2 p = a + t * e;
        const double d = norm(x - p);
        if (d < best) {
            best = d;
            best_p = p;
            best_edge = i;
            best_t = t;
        }
    }
    const double vertex_tol = 1e-12;
    Vec2 nu;
    if (best_t <= vertex_tol) {
        // vertex: angular bisector of the adjacent face normals
        const std::size_t prev = (best_edge + n - 1) % n;
        nu = normalized(edge_normals_[prev] + edge_normals_[best_edge]);
    } else if (best_t >= 1.0 - vertex_tol) {
        const std::size_t next = (best_edge + 1) % n;
        nu = normalized(edge_normals_[best_edge] + edge_normals_[next]);
    } else {
        nu = edge_normals_[best_edge];
    }
    const double edge_len =
        cumulative_arc_[best_edge + 1] - cumulative_arc_[best_edge];
    const double s = wrap_arc(cumulative_arc_[best_edge] + best_t * edge_len,
                              perimeter_);
    return {best_p, nu, s};
}

BoundaryPoint DomainGeometry::project_to_boundary(Vec2 x) const {
    switch (kind_) {
        case ShapeKind::disk:
            return project_disk(x);
        case ShapeKind::rectangle:
            return project_rectangle(x);
        case ShapeKind::polygon:
            return project_polygon(x);
    }
    throw Error("unreachable");
}

BoundaryPoint DomainGeometry::point_at_arc(double s) const {
    s = wrap_arc(s, perimeter_);
    switch (kind_) {
        case ShapeKind::disk: {
            const double theta = s / radius_;
            const Vec2 nu{std::cos(theta), std::sin(theta)};
            return {center_ + radius_ * nu, nu, s};
        }
        case ShapeKind::rectangle: {
            const double w = hi_.x - lo_.x, h = hi_.y - lo_.y;
            double r = s;
            if (r < w) return {{lo_.x + r, lo_.y}, {0.0, -1.0}, s};
            r -= w;
            if (r < h) return {{hi_.x, lo_.y + r}, {1.0, 0.0}, s};
            r -= h;
            if (r < w) return {{hi_.x - r, hi_.y}, {0.0, 1.0}, s};
            r -= w;
            return {{lo_.x, hi_.y - r}, {-1.0, 0.0}, s};
        }
        case ShapeKind::polygon: {
            const auto it = std::upper_bound(cumulative_arc_.begin(),
                                             cumulative_arc_.end(), s);
            const std::size_t edge =
                std::min<std::size_t>(vertices_.size() - 1,
                                      static_cast<std::size_t>(
                                          it - cumulative_arc_.begin()) - 1);
            const Vec2 a = vertices_[edge];
            const Vec2 b = vertices_[(edge + 1) % vertices_.size()];
            const double edge_len = cumulative_arc_[edge + 1] - cumulative_arc_[edge];
            const double t = (s - cumulative_arc_[edge]) / edge_len;
            return {a + t * (b - a), edge_normals_[edge], s};
        }
    }
    throw Error("unreachable");
}

double DomainGeometry::arc_parameter_of(Vec2 position_near_boundary) const {
    switch (kind_) {
        case ShapeKind::disk: {
            const Vec2 r = position_near_boundary - center_;
            const double theta = std::atan2(r.y, r.x);
            return wrap_arc(radius_ * theta, perimeter_);
        }
        case ShapeKind::rectangle: {
            const Vec2 x = position_near_boundary;
            const double w = hi_.x - lo_.x, h = hi_.y - lo_.y;
            // distance to each face line decides which face we are on
            const double db = x.y - lo_.y, dr = hi_.x - x.x;
            const double dt = hi_.y - x.y, dl = x.x - lo_.x;
            const double m = std::min({std::abs(db), std::abs(dr),
                                       std::abs(dt), std::abs(dl)});
            double s;
            if (std::abs(db) == m) s = std::clamp(x.x - lo_.x, 0.0, w);
            else if (std::abs(dr) == m) s = w + std::clamp(x.y - lo_.y, 0.0, h);
            else if (std::abs(dt) == m) s = w + h + std::clamp(hi_.x - x.x, 0.0, w);
            else s = 2.0 * w + h + std::clamp(hi_.y - x.y, 0.0, h);
            return wrap_arc(s, perimeter_);
        }
        case ShapeKind::polygon:
            return project_polygon(position_near_boundary).arc_parameter;
    }
    throw Error("unreachable");
}

Vec2 DomainGeometry::sample_interior(RandomStream& rng) const {
    switch (kind_) {
        case ShapeKind::disk: {
            const double r = radius_ * std::sqrt(rng.uniform());
            const double theta = 2.0 * kPi * rng.uniform();
            return center_ + Vec2{r * std::cos(theta), r * std::sin(theta)};
        }
        case ShapeKind::rectangle: {
            const double u = rng.uniform(), v = rng.uniform();
            return {lo_.x + u * (hi_.x - lo_.x), lo_.y + v * (hi_.y - lo_.y)};
        }
        case ShapeKind::polygon: {
            // fan triangulation from vertex 0, triangle picked by area
            const std::size_t n = vertices_.size();
            const double target = rng.uniform() * area_;
            double acc = 0.0;
            std::size_t tri = 1;
            for (; tri + 1 < n; ++tri) {
                acc += 0.5 * cross(vertices_[tri] - vertices_[0],
                                   vertices_[tri + 1] - vertices_[0]);
                if (target <= acc || tri + 2 == n) break;
            }
            const Vec2 a = vertices_[0], b = vertices_[tri], c = vertices_[tri + 1];
            const double r1 = std::sqrt(rng.uniform());
            const double r2 = rng.uniform();
            return (1.0 - r1) * a + (r1 * (1.0 - r2)) * b + (r1 * r2) * c;
        }
    }
    throw Error("unreachable");
}

BoundaryPoint DomainGeometry::sample_boundary(RandomStream& rng) const {
    return point_at_arc(rng.uniform() * perimeter_);
}

ElectrodeConfig::ElectrodeConfig(const DomainGeometry& domain,
                                 std::vector<Arc> arcs,
                                 std::vector<double> voltages,
                                 double contact_impedance,
                                 bool allow_ungrounded)
    : voltages_(std::move(voltages)), contact_impedance_(contact_impedance) {
    if (arcs.empty()) throw ConfigError("electrode config needs at least one arc");
    if (arcs.size() != voltages_.size())
        throw ConfigError("electrode arc / voltage count mismatch");
    if (!(contact_impedance_ > 0.0))
        throw ConfigError("contact impedance must be positive");

    const double perimeter = domain.boundary_measure();
    order_.resize(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        return arcs[a].begin < arcs[b].begin;
    });
    arcs_.reserve(arcs.size());
    for (const std::size_t i : order_) arcs_.push_back(arcs[i]);

    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        const Arc& a = arcs_[i];
        if (!(a.length() > 0.0))
            throw ConfigError("electrode arc must have positive length");
        if (a.begin < 0.0 || a.end > perimeter)
            throw ConfigError("electrode arc outside [0, perimeter)");
        if (i + 1 < arcs_.size() && a.end > arcs_[i + 1].begin)
            throw ConfigError("electrode arcs must be pairwise disjoint");
    }

    double sum = 0.0, scale = 0.0;
    for (const double u : voltages_) {
        sum += u;
        scale = std::max(scale, std::abs(u));
    }
    grounded_ = std::abs(sum) <= 1e-12 * std::max(1.0, scale) *
                                   static_cast<double>(voltages_.size());
    if (!grounded_ && !allow_ungrounded)
        throw ConfigError("electrode voltages must sum to zero (grounding)");
}

std::optional<std::size_t> ElectrodeConfig::electrode_at_arc(double s) const {
    auto it = std::upper_bound(
        arcs_.begin(), arcs_.end(), s,
        [](double v, const Arc& a) { return v < a.begin; });
    if (it == arcs_.begin()) return std::nullopt;
    --it;
    if (s >= it->begin && s < it->end)
        return order_[static_cast<std::size_t>(it - arcs_.begin())];
    return std::nullopt;
}

}  // namespace eitmc
