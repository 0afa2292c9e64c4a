#include "eitmc/boundary_data.hpp"

#include <cmath>
#include <numbers>

#include "eitmc/errors.hpp"

namespace eitmc {

double FourierSeries::operator()(double s) const {
    const double w = 2.0 * std::numbers::pi / period;
    double v = mean;
    for (std::size_t n = 0; n < cos_coeffs.size(); ++n)
        v += cos_coeffs[n] * std::cos(w * static_cast<double>(n + 1) * s);
    for (std::size_t n = 0; n < sin_coeffs.size(); ++n)
        v += sin_coeffs[n] * std::sin(w * static_cast<double>(n + 1) * s);
    return v;
}

double FourierSeries::sup_bound() const {
    double b = std::abs(mean);
    for (const double c : cos_coeffs) b += std::abs(c);
    for (const double c : sin_coeffs) b += std::abs(c);
    return b;
}

BoundaryFunction BoundaryFunction::zero() { return BoundaryFunction{}; }

BoundaryFunction BoundaryFunction::constant(double c) {
    BoundaryFunction f;
    f.kind_ = Kind::constant;
    f.constant_ = c;
    return f;
}

BoundaryFunction BoundaryFunction::fourier(FourierSeries series) {
    BoundaryFunction f;
    f.kind_ = Kind::fourier;
    f.series_ = std::move(series);
    return f;
}

BoundaryFunction BoundaryFunction::electrode_current(
    std::shared_ptr<const ElectrodeConfig> e) {
    BoundaryFunction f;
    f.kind_ = Kind::electrode_f;
    f.electrodes_ = std::move(e);
    return f;
}

BoundaryFunction BoundaryFunction::electrode_indicator(
    std::shared_ptr<const ElectrodeConfig> e) {
    BoundaryFunction f;
    f.kind_ = Kind::electrode_g;
    f.electrodes_ = std::move(e);
    return f;
}

BoundaryFunction BoundaryFunction::custom(
    std::function<double(const BoundaryPoint&)> fn, double sup_bound) {
    BoundaryFunction f;
    f.kind_ = Kind::custom;
    f.custom_ = std::move(fn);
    f.custom_sup_ = sup_bound;
    return f;
}

double BoundaryFunction::operator()(const BoundaryPoint& p) const {
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::constant:
            return constant_;
        case Kind::fourier:
            return series_(p.arc_parameter);
        case Kind::electrode_f:
            return electrodes_->f_at(p);
        case Kind::electrode_g:
            return electrodes_->g_at(p);
        case Kind::custom:
            return custom_(p);
    }
    return 0.0;
}

double BoundaryFunction::integral(const DomainGeometry& domain) const {
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::constant:
            return constant_ * domain.boundary_measure();
        case Kind::fourier:
            // whole periods of the harmonics integrate to zero
            return series_.mean * domain.boundary_measure();
        case Kind::electrode_f: {
            double sum = 0.0;
            for (std::size_t l = 0; l < electrodes_->size(); ++l) {
                // arcs() is sorted; voltages are indexed by original position
                const auto& arc = electrodes_->arcs()[l];
                const auto idx = electrodes_->electrode_at_arc(arc.begin);
                sum += electrodes_->voltages()[*idx] * arc.length();
            }
            return sum / electrodes_->contact_impedance();
        }
        case Kind::electrode_g: {
            double sum = 0.0;
            for (const auto& arc : electrodes_->arcs()) sum += arc.length();
            return sum / electrodes_->contact_impedance();
        }
        case Kind::custom:
            return boundary_quadrature(domain, custom_);
    }
    return 0.0;
}

double BoundaryFunction::sup_bound() const {
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::constant:
            return std::abs(constant_);
        case Kind::fourier:
            return series_.sup_bound();
        case Kind::electrode_f: {
            double m = 0.0;
            for (const double u : electrodes_->voltages())
                m = std::max(m, std::abs(u));
            return m / electrodes_->contact_impedance();
        }
        case Kind::electrode_g:
            return 1.0 / electrodes_->contact_impedance();
        case Kind::custom:
            return custom_sup_;
    }
    return 0.0;
}

void NeumannData::validate(const DomainGeometry& domain) const {
    const double sup = f.sup_bound();
    if (sup == 0.0) return;
    const double integral = f.integral(domain);
    if (std::abs(integral) > 1e-8 * domain.boundary_measure() * sup)
        throw CompatibilityViolation(
            "Neumann data must have zero boundary integral");
}

double boundary_quadrature(const DomainGeometry& domain,
                           const std::function<double(const BoundaryPoint&)>& fn,
                           std::size_t panels) {
    const double perimeter = domain.boundary_measure();
    const double h = perimeter / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t k = 0; k < panels; ++k)
        sum += fn(domain.point_at_arc((static_cast<double>(k) + 0.5) * h));
    return sum * h;
}

}  // namespace eitmc
