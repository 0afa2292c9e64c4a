#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "eitmc/geometry.hpp"
#include "eitmc/rng.hpp"
#include "eitmc/vec2.hpp"

namespace eitmc {

// Isotropic conductivity values on a regular grid with C^1 (Catmull-Rom)
// tensor-product cubic interpolation, so the drift exists everywhere.
struct GridField {
    std::size_t nx = 0, ny = 0;
    Vec2 lo, hi;
    std::vector<double> values;  // row-major, index j*nx + i

    static GridField load_csv(const std::string& path);

    double spacing_x() const { return (hi.x - lo.x) / static_cast<double>(nx - 1); }
    double spacing_y() const { return (hi.y - lo.y) / static_cast<double>(ny - 1); }
    double node(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
    double interpolate(Vec2 x) const;
};

struct EllipticityCheck {
    double min_eigenvalue;
    double max_eigenvalue;
    double c0_estimate;  // max(max_eigenvalue, 1/min_eigenvalue)
    bool pass;
};

// Symmetric positive definite conductivity field kappa(x) with its diffusion
// factor B (B B^T = 2 kappa) and row-divergence drift a_i = sum_j d_j kappa_ij.
// Immutable after construction; safe to share across workers.
class ConductivityField {
  public:
    enum class Kind { constant, radial_isotropic, smooth_bump, grid_sampled };

    static ConductivityField constant(Mat2Sym kappa, double declared_c0);
    // c(r) = sum_k coeffs[k] * r^(2k) around `center` (even powers keep the
    // field smooth at r = 0)
    static ConductivityField radial_isotropic(Vec2 center,
                                              std::vector<double> coeffs_r2,
                                              double declared_c0);
    // background + amplitude * psi(|x-center|/radius) * I with the standard
    // C^inf bump psi(s) = exp(1 - 1/(1-s^2)) on s < 1, psi(0) = 1
    static ConductivityField smooth_bump(Mat2Sym background, Vec2 center,
                                         double radius, double amplitude,
                                         double declared_c0);
    static ConductivityField grid_sampled(GridField grid, double declared_c0);

    // kappa == identity whenever distance(x, boundary) < collar_radius.
    // The base field is expected to blend to identity at the collar edge.
    ConductivityField with_collar(double collar_radius,
                                  const DomainGeometry& domain) const;

    Mat2Sym evaluate(Vec2 x) const;
    Mat2 diffusion_factor(Vec2 x) const;  // lower triangular
    Vec2 drift(Vec2 x) const;

    EllipticityCheck check_ellipticity(const DomainGeometry& domain,
                                       std::size_t n_samples,
                                       RandomStream& rng) const;

    Kind kind() const { return kind_; }
    double declared_c0() const { return declared_c0_; }
    bool has_collar() const { return static_cast<bool>(collar_domain_); }
    double collar_radius() const { return collar_radius_; }

    // (A1): isotropic and equal to 1 in a neighborhood of the boundary.
    bool identity_near_boundary() const;
    bool isotropic() const;
    // Scalar value for isotropic fields (used by the deterministic solver).
    double scalar_value(Vec2 x) const;

  private:
    ConductivityField() = default;

    Mat2Sym evaluate_base(Vec2 x) const;
    bool in_collar(Vec2 x) const;

    Kind kind_ = Kind::constant;
    double declared_c0_ = 1.0;

    Mat2Sym constant_kappa_ = Mat2Sym::identity();
    Vec2 center_;
    std::vector<double> radial_coeffs_;
    Mat2Sym bump_background_ = Mat2Sym::identity();
    double bump_radius_ = 1.0;
    double bump_amplitude_ = 0.0;
    std::shared_ptr<const GridField> grid_;

    double collar_radius_ = 0.0;
    std::shared_ptr<const DomainGeometry> collar_domain_;
};

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
Mat2 cholesky_lower(const Mat2Sym& m);

}  // namespace eitmc
