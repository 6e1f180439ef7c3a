#pragma once

#include "lfc/field.hpp"
#include "lfc/optics.hpp"

namespace lfc {

// Radially resolved defocused field of a point emitter at one depth.
// Profile values are the scalar aperture integral
//   I(rho) = exp(-i k pz) * int_0^alpha sqrt(cos t) * exp(i 2 k pz sin^2(t/2))
//                                 * J0(k rho sin t) * sin t dt
// with rho the object-referred lateral distance to the emitter, k the
// sample-side wavenumber and alpha the aperture half-angle. Composite
// Simpson quadrature over cfg.theta_steps intervals (even count required).
// The profile is computed once per depth on a fine radial grid and sampled
// by Catmull-Rom interpolation (exact at the quadrature nodes), which keeps
// window fills for many lateral offsets cheap.
class DebyeProfile {
  public:
    DebyeProfile(const OpticalConfig& cfg, double depth, double rho_max);
    cplx sample(double rho) const;
    double depth() const { return depth_; }
    double max_rho() const { return double(n_nodes_valid_ - 1) * drho_; }

  private:
    std::vector<cplx> nodes_;
    double drho_ = 0.0;
    double depth_ = 0.0;
    int n_nodes_valid_ = 0;  // nodes_ holds two guard nodes past this
};

// Single direct quadrature evaluation at one radius; the table-free route.
cplx debye_point(const OpticalConfig& cfg, double rho, double pz);

// Emitter field sampled over a centered sensor-plane window of
// cfg.psf_samples at cfg.mask_pixel spacing. The emitter sits at
// object-space lateral position (px, py) and depth pz (meters, negative
// toward the objective). Window coordinates are divided by the
// magnification before entering the radial profile, so the lateral
// structure is object-referred and scales by M at the sensor.
ComplexField debye_field(const OpticalConfig& cfg, double px, double py, double pz);
ComplexField debye_field(const OpticalConfig& cfg, const DebyeProfile& profile,
                         double px, double py);

}  // namespace lfc
