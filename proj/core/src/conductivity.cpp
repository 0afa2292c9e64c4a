#include "eitmc/conductivity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eitmc/errors.hpp"

namespace eitmc {

namespace {

// Catmull-Rom weights for the unit interval, nodes at -1, 0, 1, 2.
void catmull_rom_weights(double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = -0.5 * t3 + t2 - 0.5 * t;
    w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
    w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
    w[3] = 0.5 * t3 - 0.5 * t2;
}

double bump_psi(double s) {
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

// psi'(s)/s, finite at s = 0 (limit -2) and zero outside the support
double bump_dpsi_over_s(double s) {
    if (s >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return -2.0 * bump_psi(s) / (q * q);
}

}  // namespace

GridField GridField::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open grid field file: " + path);
    GridField g;
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("empty grid field file: " + path);
    {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream h(line);
        if (!(h >> g.nx >> g.ny >> g.lo.x >> g.lo.y >> g.hi.x >> g.hi.y))
            throw ConfigError("grid field header must be nx,ny,xmin,ymin,xmax,ymax");
    }
    if (g.nx < 4 || g.ny < 4)
        throw ConfigError("grid field needs at least 4x4 nodes");
    if (!(g.lo.x < g.hi.x && g.lo.y < g.hi.y))
        throw ConfigError("grid field bounding box is degenerate");
    g.values.assign(g.nx * g.ny, 0.0);
    std::vector<char> seen(g.nx * g.ny, 0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        std::size_t i, j;
        double v;
        if (!(row >> i >> j >> v))
            throw ConfigError("bad grid field row: " + line);
        if (i >= g.nx || j >= g.ny)
            throw ConfigError("grid field index out of range: " + line);
        g.values[j * g.nx + i] = v;
        seen[j * g.nx + i] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw ConfigError("grid field is missing nodes");
    return g;
}

double GridField::interpolate(Vec2 x) const {
    const double u = std::clamp((x.x - lo.x) / spacing_x(), 0.0,
                                static_cast<double>(nx - 1));
    const double v = std::clamp((x.y - lo.y) / spacing_y(), 0.0,
                                static_cast<double>(ny - 1));
    double iu = std::floor(u), iv = std::floor(v);
    iu = std::min(iu, static_cast<double>(nx - 2));
    iv = std::min(iv, static_cast<double>(ny - 2));
    const auto i0 = static_cast<std::ptrdiff_t>(iu);
    const auto j0 = static_cast<std::ptrdiff_t>(iv);
    double wx[4], wy[4];
    catmull_rom_weights(u - iu, wx);
    catmull_rom_weights(v - iv, wy);

    const auto clamp_i = [&](std::ptrdiff_t i) {
        return static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(nx) - 1));
    };
    const auto clamp_j = [&](std::ptrdiff_t j) {
        return static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(ny) - 1));
    };

    double out = 0.0;
    for (int b = 0; b < 4; ++b) {
        const std::size_t j = clamp_j(j0 - 1 + b);
        double row = 0.0;
        for (int a = 0; a < 4; ++a)
            row += wx[a] * node(clamp_i(i0 - 1 + a), j);
        out += wy[b] * row;
    }
    return out;
}

Mat2 cholesky_lower(const Mat2Sym& m) {
    if (!(m.a11 > 0.0)) throw FactorizationFailure("matrix not positive definite");
    const double l11 = std::sqrt(m.a11);
    const double l21 = m.a12 / l11;
    const double rest = m.a22 - l21 * l21;
    if (!(rest > 0.0)) throw FactorizationFailure("matrix not positive definite");
    return {l11, 0.0, l21, std::sqrt(rest)};
}

ConductivityField ConductivityField::constant(Mat2Sym kappa, double declared_c0) {
    ConductivityField f;
    f.kind_ = Kind::constant;
    f.constant_kappa_ = kappa;
    f.declared_c0_ = declared_c0;
    return f;
}

ConductivityField ConductivityField::radial_isotropic(Vec2 center,
                                                      std::vector<double> coeffs_r2,
                                                      double declared_c0) {
    if (coeffs_r2.empty())
        throw ConfigError("radial field needs at least the constant coefficient");
    ConductivityField f;
    f.kind_ = Kind::radial_isotropic;
    f.center_ = center;
    f.radial_coeffs_ = std::move(coeffs_r2);
    f.declared_c0_ = declared_c0;
    return f;
}

ConductivityField ConductivityField::smooth_bump(Mat2Sym background, Vec2 center,
                                                 double radius, double amplitude,
                                                 double declared_c0) {
    if (!(radius > 0.0)) throw ConfigError("bump radius must be positive");
    ConductivityField f;
    f.kind_ = Kind::smooth_bump;
    f.bump_background_ = background;
    f.center_ = center;
    f.bump_radius_ = radius;
    f.bump_amplitude_ = amplitude;
    f.declared_c0_ = declared_c0;
    return f;
}

ConductivityField ConductivityField::grid_sampled(GridField grid,
                                                  double declared_c0) {
    ConductivityField f;
    f.kind_ = Kind::grid_sampled;
    f.grid_ = std::make_shared<GridField>(std::move(grid));
    f.declared_c0_ = declared_c0;
    return f;
}

ConductivityField ConductivityField::with_collar(double collar_radius,
                                                 const DomainGeometry& domain) const {
    if (!(collar_radius > 0.0))
        throw ConfigError("collar radius must be positive");
    ConductivityField f = *this;
    f.collar_radius_ = collar_radius;
    f.collar_domain_ = std::make_shared<DomainGeometry>(domain);
    return f;
}

bool ConductivityField::in_collar(Vec2 x) const {
    if (!collar_domain_) return false;
    return collar_domain_->signed_distance(x) > -collar_radius_;
}

Mat2Sym ConductivityField::evaluate_base(Vec2 x) const {
    switch (kind_) {
        case Kind::constant:
            return constant_kappa_;
        case Kind::radial_isotropic: {
            const double r2 = norm2(x - center_);
            double c = 0.0, p = 1.0;
            for (const double a : radial_coeffs_) {
                c += a * p;
                p *= r2;
            }
            return Mat2Sym::isotropic(c);
        }
        case Kind::smooth_bump: {
            const double s = norm(x - center_) / bump_radius_;
            return bump_background_ +
                   Mat2Sym::isotropic(bump_amplitude_ * bump_psi(s));
        }
        case Kind::grid_sampled:
            return Mat2Sym::isotropic(grid_->interpolate(x));
    }
    throw Error("unreachable");
}

Mat2Sym ConductivityField::evaluate(Vec2 x) const {
    if (in_collar(x)) return Mat2Sym::identity();
    const Mat2Sym k = evaluate_base(x);
    double lo, hi;
    k.eigenvalues(lo, hi);
    const double slack = 1.0 + 1e-9;
    if (!(lo * declared_c0_ * slack >= 1.0) || !(hi <= declared_c0_ * slack))
        throw EllipticityViolation(
            "conductivity eigenvalues escape the declared ellipticity envelope");
    return k;
}

Mat2 ConductivityField::diffusion_factor(Vec2 x) const {
    return cholesky_lower(2.0 * evaluate(x));
}

Vec2 ConductivityField::drift(Vec2 x) const {
    if (in_collar(x)) return {0.0, 0.0};
    switch (kind_) {
        case Kind::constant:
            return {0.0, 0.0};
        case Kind::radial_isotropic: {
            // grad c with c a polynomial in r^2: dc/d(r^2) * 2 (x - center)
            const double r2 = norm2(x - center_);
            double d = 0.0, p = 1.0;
            for (std::size_t k = 1; k < radial_coeffs_.size(); ++k) {
                d += static_cast<double>(k) * radial_coeffs_[k] * p;
                p *= r2;
            }
            return (2.0 * d) * (x - center_);
        }
        case Kind::smooth_bump: {
            const double s = norm(x - center_) / bump_radius_;
            const double factor = bump_amplitude_ * bump_dpsi_over_s(s) /
                                  (bump_radius_ * bump_radius_);
            return factor * (x - center_);
        }
        case Kind::grid_sampled: {
            const double hx = 0.25 * grid_->spacing_x();
            const double hy = 0.25 * grid_->spacing_y();
            const double dx = (grid_->interpolate({x.x + hx, x.y}) -
                               grid_->interpolate({x.x - hx, x.y})) /
                              (2.0 * hx);
            const double dy = (grid_->interpolate({x.x, x.y + hy}) -
                               grid_->interpolate({x.x, x.y - hy})) /
                              (2.0 * hy);
            return {dx, dy};
        }
    }
    throw Error("unreachable");
}

EllipticityCheck ConductivityField::check_ellipticity(const DomainGeometry& domain,
                                                      std::size_t n_samples,
                                                      RandomStream& rng) const {
    double lo_env = std::numeric_limits<double>::infinity();
    double hi_env = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const Vec2 x = domain.sample_interior(rng);
        Mat2Sym k = in_collar(x) ? Mat2Sym::identity() : evaluate_base(x);
        double lo, hi;
        k.eigenvalues(lo, hi);
        lo_env = std::min(lo_env, lo);
        hi_env = std::max(hi_env, hi);
    }
    EllipticityCheck out;
    out.min_eigenvalue = lo_env;
    out.max_eigenvalue = hi_env;
    out.c0_estimate = std::max(hi_env, lo_env > 0.0
                                           ? 1.0 / lo_env
                                           : std::numeric_limits<double>::infinity());
    out.pass = out.c0_estimate <= declared_c0_ * (1.0 + 1e-9);
    return out;
}

bool ConductivityField::identity_near_boundary() const {
    if (collar_domain_) return true;
    if (kind_ == Kind::constant)
        return constant_kappa_.a11 == 1.0 && constant_kappa_.a12 == 0.0 &&
               constant_kappa_.a22 == 1.0;
    return false;
}

bool ConductivityField::isotropic() const {
    switch (kind_) {
        case Kind::constant:
            return constant_kappa_.a12 == 0.0 &&
                   constant_kappa_.a11 == constant_kappa_.a22;
        case Kind::radial_isotropic:
        case Kind::grid_sampled:
            return true;
        case Kind::smooth_bump:
            return bump_background_.a12 == 0.0 &&
                   bump_background_.a11 == bump_background_.a22;
    }
    return false;
}

double ConductivityField::scalar_value(Vec2 x) const {
    if (!isotropic())
        throw Error("scalar_value requires an isotropic conductivity field");
    return evaluate(x).a11;
}

}  // namespace eitmc
