#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "eitmc/geometry.hpp"

namespace eitmc {

// Truncated Fourier series in the boundary arclength coordinate:
//   value(s) = mean + sum_n cos_n cos(2 pi n s / P) + sin_n sin(2 pi n s / P)
struct FourierSeries {
    double period = 1.0;
    double mean = 0.0;
    std::vector<double> cos_coeffs;  // n = 1, 2, ...
    std::vector<double> sin_coeffs;

    double operator()(double s) const;
    double sup_bound() const;
};

// Scalar function on the boundary. Fourier series in arc parameter,
// electrode-induced piecewise constants, or a custom callable.
class BoundaryFunction {
  public:
    static BoundaryFunction zero();
    static BoundaryFunction constant(double c);
    static BoundaryFunction fourier(FourierSeries series);
    // f = z^-1 sum U_l [E_l]
    static BoundaryFunction electrode_current(std::shared_ptr<const ElectrodeConfig> e);
    // g = z^-1 sum [E_l]
    static BoundaryFunction electrode_indicator(std::shared_ptr<const ElectrodeConfig> e);
    static BoundaryFunction custom(std::function<double(const BoundaryPoint&)> fn,
                                   double sup_bound);

    double operator()(const BoundaryPoint& p) const;

    // Integral over the boundary w.r.t. arclength; exact for all kinds except
    // custom, which falls back to midpoint quadrature.
    double integral(const DomainGeometry& domain) const;
    // Upper bound for the sup norm (exact for electrode/constant kinds).
    double sup_bound() const;

    bool is_zero() const { return kind_ == Kind::zero; }

  private:
    enum class Kind { zero, constant, fourier, electrode_f, electrode_g, custom };

    BoundaryFunction() = default;

    Kind kind_ = Kind::zero;
    double constant_ = 0.0;
    FourierSeries series_;
    std::shared_ptr<const ElectrodeConfig> electrodes_;
    std::function<double(const BoundaryPoint&)> custom_;
    double custom_sup_ = 0.0;
};

// Continuum-model Neumann data; the current density must integrate to zero
// over the boundary.
struct NeumannData {
    BoundaryFunction f;
    // Throws CompatibilityViolation when |int f dsigma| exceeds
    // 1e-8 * sigma(dD) * sup|f|.
    void validate(const DomainGeometry& domain) const;
};

// Midpoint quadrature of a boundary function in arc parameter.
double boundary_quadrature(const DomainGeometry& domain,
                           const std::function<double(const BoundaryPoint&)>& fn,
                           std::size_t panels = 4096);

}  // namespace eitmc
