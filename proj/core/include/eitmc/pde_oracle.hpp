#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eitmc/boundary_data.hpp"
#include "eitmc/conductivity.hpp"
#include "eitmc/geometry.hpp"

namespace eitmc {

// Boundary data for the analytic disk solutions: Fourier coefficients in the
// polar angle on the unit circle.
struct FourierBoundaryData {
    double mean = 0.0;
    std::vector<double> cos_coeffs;  // n = 1, 2, ...
    std::vector<double> sin_coeffs;

    double evaluate(double theta) const;
    static FourierBoundaryData harmonic_cos(std::size_t n, double amplitude = 1.0);
    static FourierBoundaryData harmonic_sin(std::size_t n, double amplitude = 1.0);
};

// Normalized Neumann solution on the unit disk with kappa = 1:
//   u(r,theta) = sum_n r^n (a_n cos + b_n sin)(n theta) / n.
// Throws CompatibilityViolation when the data has nonzero mean.
double disk_neumann_analytic(const FourierBoundaryData& data, double r,
                             double theta);

// Harmonic extension of Dirichlet data on the unit disk with kappa = 1.
double disk_dirichlet_analytic(const FourierBoundaryData& data, double r,
                               double theta);

// Dirichlet-to-Neumann map on the unit disk with kappa = 1: multiplies the
// n-th harmonic by n and kills constants.
FourierBoundaryData disk_dtn(const FourierBoundaryData& data);

enum class ProblemKind { dirichlet, continuum, cem };

// Cell-centered finite-volume solution on the rectangle (Cartesian grid) or
// the disk (polar grid); isotropic conductivity with harmonic face averaging,
// so piecewise constant fields are admissible here.
class GridSolution {
  public:
    double evaluate(Vec2 x) const;
    double flux_residual() const { return flux_residual_; }
    int resolution() const { return resolution_; }
    std::size_t n1() const { return n1_; }
    std::size_t n2() const { return n2_; }
    const std::vector<double>& values() const { return values_; }
    Vec2 cell_center(std::size_t i, std::size_t j) const;
    void write_csv(const std::string& path) const;

  private:
    friend GridSolution fd_solve(ProblemKind, const DomainGeometry&,
                                 const std::function<double(Vec2)>&,
                                 const BoundaryFunction*, const ElectrodeConfig*,
                                 int);
    ShapeKind shape_ = ShapeKind::disk;
    Vec2 center_, lo_, hi_;
    double radius_ = 1.0;
    int resolution_ = 0;
    std::size_t n1_ = 0, n2_ = 0;  // (nr, ntheta) or (nx, ny)
    std::vector<double> values_;   // cell-centered, row-major [j * n1 + i]
    double flux_residual_ = 0.0;
};

// data: Dirichlet trace or continuum current density (by kind);
// electrodes: CEM layout. Iterative solve to relative residual 1e-10;
// continuum solutions are returned with zero volume mean.
GridSolution fd_solve(ProblemKind kind, const DomainGeometry& domain,
                      const std::function<double(Vec2)>& kappa_scalar,
                      const BoundaryFunction* data,
                      const ElectrodeConfig* electrodes, int resolution);

inline GridSolution fd_solve(ProblemKind kind, const DomainGeometry& domain,
                             const ConductivityField& field,
                             const BoundaryFunction* data,
                             const ElectrodeConfig* electrodes, int resolution) {
    return fd_solve(
        kind, domain, [&field](Vec2 x) { return field.scalar_value(x); }, data,
        electrodes, resolution);
}

// Smallest nonzero Neumann eigenvalue of -div(kappa grad .) on the domain.
double spectral_gap(const DomainGeometry& domain,
                    const std::function<double(Vec2)>& kappa_scalar,
                    int resolution);

inline double spectral_gap(const DomainGeometry& domain,
                           const ConductivityField& field, int resolution) {
    return spectral_gap(
        domain, [&field](Vec2 x) { return field.scalar_value(x); }, resolution);
}

}  // namespace eitmc
