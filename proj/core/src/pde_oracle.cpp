#include "eitmc/pde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "eitmc/errors.hpp"

namespace eitmc {

namespace {
constexpr double kPi = std::numbers::pi;
}

double FourierBoundaryData::evaluate(double theta) const {
    double v = mean;
    for (std::size_t n = 0; n < cos_coeffs.size(); ++n)
        v += cos_coeffs[n] * std::cos(static_cast<double>(n + 1) * theta);
    for (std::size_t n = 0; n < sin_coeffs.size(); ++n)
        v += sin_coeffs[n] * std::sin(static_cast<double>(n + 1) * theta);
    return v;
}

FourierBoundaryData FourierBoundaryData::harmonic_cos(std::size_t n,
                                                      double amplitude) {
    FourierBoundaryData d;
    if (n == 0) {
        d.mean = amplitude;
        return d;
    }
    d.cos_coeffs.assign(n, 0.0);
    d.cos_coeffs[n - 1] = amplitude;
    return d;
}

FourierBoundaryData FourierBoundaryData::harmonic_sin(std::size_t n,
                                                      double amplitude) {
    if (n == 0) throw ConfigError("sin harmonic needs n >= 1");
    FourierBoundaryData d;
    d.sin_coeffs.assign(n, 0.0);
    d.sin_coeffs[n - 1] = amplitude;
    return d;
}

double disk_neumann_analytic(const FourierBoundaryData& data, double r,
                             double theta) {
    double sup = std::abs(data.mean);
    for (const double c : data.cos_coeffs) sup += std::abs(c);
    for (const double c : data.sin_coeffs) sup += std::abs(c);
    if (std::abs(data.mean) > 1e-12 * (sup + 1.0))
        throw CompatibilityViolation("Neumann data must have zero mean");
    double u = 0.0;
    double rn = r;
    const std::size_t n_max =
        std::max(data.cos_coeffs.size(), data.sin_coeffs.size());
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double a = n <= data.cos_coeffs.size() ? data.cos_coeffs[n - 1] : 0.0;
        const double b = n <= data.sin_coeffs.size() ? data.sin_coeffs[n - 1] : 0.0;
        const double nd = static_cast<double>(n);
        u += rn / nd * (a * std::cos(nd * theta) + b * std::sin(nd * theta));
        rn *= r;
    }
    return u;
}

double disk_dirichlet_analytic(const FourierBoundaryData& data, double r,
                               double theta) {
    double u = data.mean;
    double rn = r;
    const std::size_t n_max =
        std::max(data.cos_coeffs.size(), data.sin_coeffs.size());
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double a = n <= data.cos_coeffs.size() ? data.cos_coeffs[n - 1] : 0.0;
        const double b = n <= data.sin_coeffs.size() ? data.sin_coeffs[n - 1] : 0.0;
        const double nd = static_cast<double>(n);
        u += rn * (a * std::cos(nd * theta) + b * std::sin(nd * theta));
        rn *= r;
    }
    return u;
}

FourierBoundaryData disk_dtn(const FourierBoundaryData& data) {
    FourierBoundaryData out;
    out.mean = 0.0;  // constants are in the kernel
    out.cos_coeffs = data.cos_coeffs;
    out.sin_coeffs = data.sin_coeffs;
    for (std::size_t n = 0; n < out.cos_coeffs.size(); ++n)
        out.cos_coeffs[n] *= static_cast<double>(n + 1);
    for (std::size_t n = 0; n < out.sin_coeffs.size(); ++n)
        out.sin_coeffs[n] *= static_cast<double>(n + 1);
    return out;
}

namespace {

// Cell-centered finite-volume system on a polar or Cartesian grid. The
// operator is applied matrix-free from precomputed face weights; it is
// symmetric with constants in the kernel before boundary terms are added.
struct FvSystem {
    ShapeKind shape;
    Vec2 center, lo, hi;
    double radius = 1.0;
    std::size_t n1 = 0, n2 = 0;
    double h1 = 0.0, h2 = 0.0;
    bool periodic2 = false;

    std::vector<double> w1;      // faces (i,j)-(i+1,j), index j*(n1-1)+i
    std::vector<double> w2;      // faces (i,j)-(i,j+1[, wrap]), index j*n1+i
    std::vector<double> diag;    // row diagonal including boundary terms
    std::vector<double> rhs;
    std::vector<double> volume;

    std::size_t cells() const { return n1 * n2; }

    Vec2 cell_center(std::size_t i, std::size_t j) const {
        if (shape == ShapeKind::disk) {
            const double r = (static_cast<double>(i) + 0.5) * h1;
            const double th = (static_cast<double>(j) + 0.5) * h2;
            return center + Vec2{r * std::cos(th), r * std::sin(th)};
        }
        return {lo.x + (static_cast<double>(i) + 0.5) * h1,
                lo.y + (static_cast<double>(j) + 0.5) * h2};
    }

    void apply(const std::vector<double>& u, std::vector<double>& out) const {
        const std::size_t N = cells();
        for (std::size_t c = 0; c < N; ++c) out[c] = diag[c] * u[c];
        for (std::size_t j = 0; j < n2; ++j) {
            const std::size_t row = j * n1;
            for (std::size_t i = 0; i + 1 < n1; ++i) {
                const double w = w1[j * (n1 - 1) + i];
                out[row + i] -= w * u[row + i + 1];
                out[row + i + 1] -= w * u[row + i];
            }
        }
        const std::size_t j_max = periodic2 ? n2 : n2 - 1;
        for (std::size_t j = 0; j < j_max; ++j) {
            const std::size_t jn = periodic2 ? (j + 1) % n2 : j + 1;
            for (std::size_t i = 0; i < n1; ++i) {
                const double w = w2[j * n1 + i];
                out[j * n1 + i] -= w * u[jn * n1 + i];
                out[jn * n1 + i] -= w * u[j * n1 + i];
            }
        }
    }
};

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

void subtract_mean(std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    s /= static_cast<double>(v.size());
    for (double& x : v) x -= s;
}

// Jacobi-preconditioned conjugate gradients; `deflate` keeps the iteration in
// the mean-zero complement for singular pure-Neumann systems.
std::size_t pcg(const FvSystem& sys, std::vector<double>& x,
                std::vector<double> b, double rel_tol, std::size_t max_iter,
                bool deflate) {
    const std::size_t N = sys.cells();
    if (deflate) subtract_mean(b);
    double bnorm = 0.0;
    for (const double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0;
    }

    std::vector<double> r = b, z(N), p(N), ap(N);
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t c = 0; c < N; ++c) z[c] = r[c] / sys.diag[c];
    p = z;
    double rz = 0.0;
    for (std::size_t c = 0; c < N; ++c) rz += r[c] * z[c];

    for (std::size_t it = 0; it < max_iter; ++it) {
        sys.apply(p, ap);
        double pap = 0.0;
        for (std::size_t c = 0; c < N; ++c) pap += p[c] * ap[c];
        if (!(pap > 0.0)) throw SolverDiverged("indefinite system in PCG");
        const double alpha = rz / pap;
        double rnorm = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            x[c] += alpha * p[c];
            r[c] -= alpha * ap[c];
            rnorm += r[c] * r[c];
        }
        if (deflate && (it % 64 == 63)) subtract_mean(r);
        if (std::sqrt(rnorm) <= rel_tol * bnorm) {
            if (deflate) subtract_mean(x);
            return it + 1;
        }
        double rz_new = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            z[c] = r[c] / sys.diag[c];
            rz_new += r[c] * z[c];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t c = 0; c < N; ++c) p[c] = z[c] + beta * p[c];
    }
    throw SolverDiverged("PCG did not reach the requested residual");
}

struct BoundaryTermFn {
    ProblemKind kind;
    const BoundaryFunction* data;
    const ElectrodeConfig* electrodes;

    // returns {diagonal addition, rhs addition} for one boundary face
    std::pair<double, double> operator()(const BoundaryPoint& bp, double eta,
                                         double ell) const {
        switch (kind) {
            case ProblemKind::dirichlet:
                return {eta * ell, eta * ell * (*data)(bp)};
            case ProblemKind::continuum:
                return {0.0, ell * (*data)(bp)};
            case ProblemKind::cem: {
                const double g = electrodes->g_at(bp);
                const double f = electrodes->f_at(bp);
                return {ell * eta * g / (g + eta), ell * eta * f / (g + eta)};
            }
        }
        return {0.0, 0.0};
    }
};

FvSystem build_system(ProblemKind kind, const DomainGeometry& domain,
                      const std::function<double(Vec2)>& kappa,
                      const BoundaryFunction* data,
                      const ElectrodeConfig* electrodes, int resolution) {
    FvSystem sys;
    sys.shape = domain.kind();
    const BoundaryTermFn bc{kind, data, electrodes};

    if (domain.kind() == ShapeKind::disk) {
        sys.center = domain.disk_center();
        sys.radius = domain.disk_radius();
        sys.n1 = static_cast<std::size_t>(resolution);
        sys.n2 = 2 * sys.n1;
        sys.h1 = sys.radius / static_cast<double>(sys.n1);
        sys.h2 = 2.0 * kPi / static_cast<double>(sys.n2);
        sys.periodic2 = true;
    } else if (domain.kind() == ShapeKind::rectangle) {
        sys.lo = domain.rect_lo();
        sys.hi = domain.rect_hi();
        sys.n1 = static_cast<std::size_t>(resolution);
        sys.n2 = static_cast<std::size_t>(resolution);
        sys.h1 = (sys.hi.x - sys.lo.x) / static_cast<double>(sys.n1);
        sys.h2 = (sys.hi.y - sys.lo.y) / static_cast<double>(sys.n2);
        sys.periodic2 = false;
    } else {
        throw ConfigError("fd_solve supports disk and rectangle domains");
    }

    const std::size_t N = sys.cells();
    std::vector<double> kc(N);
    for (std::size_t j = 0; j < sys.n2; ++j)
        for (std::size_t i = 0; i < sys.n1; ++i)
            kc[j * sys.n1 + i] = kappa(sys.cell_center(i, j));

    sys.w1.assign((sys.n1 - 1) * sys.n2, 0.0);
    sys.w2.assign(sys.n1 * sys.n2, 0.0);
    sys.diag.assign(N, 0.0);
    sys.rhs.assign(N, 0.0);
    sys.volume.assign(N, 0.0);

    if (sys.shape == ShapeKind::disk) {
        for (std::size_t j = 0; j < sys.n2; ++j) {
            for (std::size_t i = 0; i < sys.n1; ++i) {
                const double ri = (static_cast<double>(i) + 0.5) * sys.h1;
                sys.volume[j * sys.n1 + i] = ri * sys.h1 * sys.h2;
                if (i + 1 < sys.n1) {
                    const double rf = static_cast<double>(i + 1) * sys.h1;
                    const double k =
                        harmonic_mean(kc[j * sys.n1 + i], kc[j * sys.n1 + i + 1]);
                    sys.w1[j * (sys.n1 - 1) + i] = k * rf * sys.h2 / sys.h1;
                }
                const std::size_t jn = (j + 1) % sys.n2;
                const double k =
                    harmonic_mean(kc[j * sys.n1 + i], kc[jn * sys.n1 + i]);
                sys.w2[j * sys.n1 + i] = k * sys.h1 / (ri * sys.h2);
            }
            // outer boundary face of cell (n1-1, j)
            const std::size_t c = j * sys.n1 + (sys.n1 - 1);
            const double theta = (static_cast<double>(j) + 0.5) * sys.h2;
            const BoundaryPoint bp = domain.point_at_arc(sys.radius * theta);
            const double eta = 2.0 * kc[c] / sys.h1;
            const double ell = sys.radius * sys.h2;
            const auto [dadd, radd] = bc(bp, eta, ell);
            sys.diag[c] += dadd;
            sys.rhs[c] += radd;
        }
    } else {
        const double w = sys.hi.x - sys.lo.x;
        const double h = sys.hi.y - sys.lo.y;
        for (std::size_t j = 0; j < sys.n2; ++j) {
            for (std::size_t i = 0; i < sys.n1; ++i) {
                const std::size_t c = j * sys.n1 + i;
                sys.volume[c] = sys.h1 * sys.h2;
                if (i + 1 < sys.n1)
                    sys.w1[j * (sys.n1 - 1) + i] =
                        harmonic_mean(kc[c], kc[c + 1]) * sys.h2 / sys.h1;
                if (j + 1 < sys.n2)
                    sys.w2[c] =
                        harmonic_mean(kc[c], kc[c + sys.n1]) * sys.h1 / sys.h2;
            }
        }
        const auto add_bc = [&](std::size_t c, double s, double eta, double ell) {
            const auto [dadd, radd] = bc(domain.point_at_arc(s), eta, ell);
            sys.diag[c] += dadd;
            sys.rhs[c] += radd;
        };
        for (std::size_t i = 0; i < sys.n1; ++i) {
            const double xm = (static_cast<double>(i) + 0.5) * sys.h1;
            add_bc(i, xm, 2.0 * kc[i] / sys.h2, sys.h1);  // bottom
            const std::size_t ct = (sys.n2 - 1) * sys.n1 + i;
            add_bc(ct, w + h + (w - xm), 2.0 * kc[ct] / sys.h2, sys.h1);  // top
        }
        for (std::size_t j = 0; j < sys.n2; ++j) {
            const double ym = (static_cast<double>(j) + 0.5) * sys.h2;
            const std::size_t cr = j * sys.n1 + (sys.n1 - 1);
            add_bc(cr, w + ym, 2.0 * kc[cr] / sys.h1, sys.h2);  // right
            const std::size_t cl = j * sys.n1;
            add_bc(cl, 2.0 * w + h + (h - ym), 2.0 * kc[cl] / sys.h1,
                   sys.h2);  // left
        }
    }

    // interior face weights complete the diagonal
    for (std::size_t j = 0; j < sys.n2; ++j)
        for (std::size_t i = 0; i + 1 < sys.n1; ++i) {
            const double w = sys.w1[j * (sys.n1 - 1) + i];
            sys.diag[j * sys.n1 + i] += w;
            sys.diag[j * sys.n1 + i + 1] += w;
        }
    const std::size_t j_max = sys.periodic2 ? sys.n2 : sys.n2 - 1;
    for (std::size_t j = 0; j < j_max; ++j) {
        const std::size_t jn = sys.periodic2 ? (j + 1) % sys.n2 : j + 1;
        for (std::size_t i = 0; i < sys.n1; ++i) {
            const double w = sys.w2[j * sys.n1 + i];
            sys.diag[j * sys.n1 + i] += w;
            sys.diag[jn * sys.n1 + i] += w;
        }
    }
    return sys;
}

}  // namespace

GridSolution fd_solve(ProblemKind kind, const DomainGeometry& domain,
                      const std::function<double(Vec2)>& kappa_scalar,
                      const BoundaryFunction* data,
                      const ElectrodeConfig* electrodes, int resolution) {
    if (resolution < 32)
        throw ConfigError("fd_solve needs resolution >= 32 per side");
    if (kind != ProblemKind::cem && data == nullptr)
        throw ConfigError("fd_solve needs boundary data for this problem kind");
    if (kind == ProblemKind::cem) {
        if (electrodes == nullptr)
            throw ConfigError("fd_solve cem needs an electrode config");
        if (!electrodes->grounded())
            throw ConfigError("fd_solve cem needs grounded voltages");
    }
    if (kind == ProblemKind::continuum) {
        NeumannData nd{*data};
        nd.validate(domain);
    }

    FvSystem sys =
        build_system(kind, domain, kappa_scalar, data, electrodes, resolution);
    const std::size_t N = sys.cells();

    const bool pure_neumann = kind == ProblemKind::continuum;
    std::vector<double> u(N, 0.0);
    pcg(sys, u, sys.rhs, 1e-10, 40 * N, pure_neumann);

    GridSolution sol;
    sol.shape_ = sys.shape;
    sol.center_ = sys.center;
    sol.radius_ = sys.radius;
    sol.lo_ = sys.lo;
    sol.hi_ = sys.hi;
    sol.resolution_ = resolution;
    sol.n1_ = sys.n1;
    sol.n2_ = sys.n2;

    if (pure_neumann) {
        // zero volume mean normalization
        double num = 0.0, den = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            num += u[c] * sys.volume[c];
            den += sys.volume[c];
        }
        for (double& v : u) v -= num / den;
    }

    // conservation: interior fluxes cancel pairwise, so sum(rhs - A u) is the
    // net boundary flux of the discrete solution; for pure Neumann the rhs
    // itself carries the quadrature defect of the flux integral
    {
        double net = 0.0, scale = 0.0;
        if (pure_neumann) {
            for (std::size_t c = 0; c < N; ++c) {
                net += sys.rhs[c];
                scale += std::abs(sys.rhs[c]);
            }
        } else {
            std::vector<double> au(N);
            sys.apply(u, au);
            for (std::size_t c = 0; c < N; ++c) {
                net += sys.rhs[c] - au[c];
                scale += std::abs(sys.rhs[c]);
            }
        }
        sol.flux_residual_ = scale > 0.0 ? std::abs(net) / scale : std::abs(net);
    }

    sol.values_ = std::move(u);
    return sol;
}

Vec2 GridSolution::cell_center(std::size_t i, std::size_t j) const {
    if (shape_ == ShapeKind::disk) {
        const double h1 = radius_ / static_cast<double>(n1_);
        const double h2 = 2.0 * kPi / static_cast<double>(n2_);
        const double r = (static_cast<double>(i) + 0.5) * h1;
        const double th = (static_cast<double>(j) + 0.5) * h2;
        return center_ + Vec2{r * std::cos(th), r * std::sin(th)};
    }
    const double h1 = (hi_.x - lo_.x) / static_cast<double>(n1_);
    const double h2 = (hi_.y - lo_.y) / static_cast<double>(n2_);
    return {lo_.x + (static_cast<double>(i) + 0.5) * h1,
            lo_.y + (static_cast<double>(j) + 0.5) * h2};
}

double GridSolution::evaluate(Vec2 x) const {
    if (shape_ == ShapeKind::disk) {
        const double h1 = radius_ / static_cast<double>(n1_);
        const double h2 = 2.0 * kPi / static_cast<double>(n2_);
        const Vec2 d = x - center_;
        const double r = norm(d);
        double theta = std::atan2(d.y, d.x);
        if (theta < 0.0) theta += 2.0 * kPi;

        const auto ring = [&](std::size_t i, double th) {
            double bt = th / h2 - 0.5;
            if (bt < 0.0) bt += static_cast<double>(n2_);
            const auto j0 = static_cast<std::size_t>(bt) % n2_;
            const std::size_t j1 = (j0 + 1) % n2_;
            const double ft = bt - std::floor(bt);
            return (1.0 - ft) * values_[j0 * n1_ + i] +
                   ft * values_[j1 * n1_ + i];
        };

        const double a = r / h1 - 0.5;
        if (a <= 0.0) {
            // through-center interpolation between antipodal inner-ring values
            const double u0 = ring(0, theta);
            const double u1 = ring(0, theta + kPi >= 2.0 * kPi ? theta - kPi
                                                               : theta + kPi);
            const double half = 0.5 * h1;
            return ((half + r) * u0 + (half - r) * u1) / h1;
        }
        if (a >= static_cast<double>(n1_ - 1)) {
            // linear extrapolation beyond the outermost cell centers
            const double u_last = ring(n1_ - 1, theta);
            const double u_prev = ring(n1_ - 2, theta);
            const double excess = a - static_cast<double>(n1_ - 1);
            return u_last + excess * (u_last - u_prev);
        }
        const auto i0 = static_cast<std::size_t>(a);
        const double fa = a - std::floor(a);
        return (1.0 - fa) * ring(i0, theta) + fa * ring(i0 + 1, theta);
    }

    const double h1 = (hi_.x - lo_.x) / static_cast<double>(n1_);
    const double h2 = (hi_.y - lo_.y) / static_cast<double>(n2_);
    const double a = std::clamp((x.x - lo_.x) / h1 - 0.5, 0.0,
                                static_cast<double>(n1_ - 1));
    const double b = std::clamp((x.y - lo_.y) / h2 - 0.5, 0.0,
                                static_cast<double>(n2_ - 1));
    const auto i0 = std::min(n1_ - 2, static_cast<std::size_t>(a));
    const auto j0 = std::min(n2_ - 2, static_cast<std::size_t>(b));
    const double fa = a - static_cast<double>(i0);
    const double fb = b - static_cast<double>(j0);
    const double v00 = values_[j0 * n1_ + i0];
    const double v10 = values_[j0 * n1_ + i0 + 1];
    const double v01 = values_[(j0 + 1) * n1_ + i0];
    const double v11 = values_[(j0 + 1) * n1_ + i0 + 1];
    return (1.0 - fa) * (1.0 - fb) * v00 + fa * (1.0 - fb) * v10 +
           (1.0 - fa) * fb * v01 + fa * fb * v11;
}

void GridSolution::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    out << "x,y,value\n";
    char buf[128];
    for (std::size_t j = 0; j < n2_; ++j)
        for (std::size_t i = 0; i < n1_; ++i) {
            const Vec2 c = cell_center(i, j);
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", c.x, c.y,
                          values_[j * n1_ + i]);
            out << buf;
        }
}

double spectral_gap(const DomainGeometry& domain,
                    const std::function<double(Vec2)>& kappa_scalar,
                    int resolution) {
    const BoundaryFunction zero = BoundaryFunction::zero();
    FvSystem sys = build_system(ProblemKind::continuum, domain, kappa_scalar,
                                &zero, nullptr, resolution);
    const std::size_t N = sys.cells();

    double vol_total = 0.0;
    for (const double v : sys.volume) vol_total += v;

    const auto project_m = [&](std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t c = 0; c < N; ++c) s += v[c] * sys.volume[c];
        s /= vol_total;
        for (double& x : v) x -= s;
    };
    const auto m_norm = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t c = 0; c < N; ++c) s += v[c] * v[c] * sys.volume[c];
        return std::sqrt(s);
    };

    std::vector<double> u(N), b(N), w(N);
    for (std::size_t c = 0; c < N; ++c)
        u[c] = std::sin(0.7 * static_cast<double>(c) + 1.0);
    project_m(u);
    {
        const double nn = m_norm(u);
        for (double& x : u) x /= nn;
    }

    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        for (std::size_t c = 0; c < N; ++c) b[c] = sys.volume[c] * u[c];
        pcg(sys, w, b, 1e-11, 40 * N, true);
        project_m(w);
        double wb = 0.0, wmw = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            wb += w[c] * b[c];
            wmw += w[c] * w[c] * sys.volume[c];
        }
        if (!(wmw > 0.0)) throw SolverDiverged("spectral gap iteration collapsed");
        const double lambda_new = wb / wmw;
        const double nn = std::sqrt(wmw);
        for (std::size_t c = 0; c < N; ++c) u[c] = w[c] / nn;
        if (it > 2 && std::abs(lambda_new - lambda) <= 1e-9 * lambda_new)
            return lambda_new;
        lambda = lambda_new;
    }
    throw SolverDiverged("spectral gap iteration did not converge");
}

}  // namespace eitmc
