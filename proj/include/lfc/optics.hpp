#pragma once

#include <cstdint>
#include <string>

namespace lfc {

// Geometry and wave parameters of the imaging path: microscope objective
// (na, magnification, immersion index), microlens array (pitch, focal
// length), and the sampling of the simulated sensor window. All lengths in
// meters.
struct OpticalConfig {
    double na = 0.5;
    double magnification = 20.0;
    double refractive_index = 1.0;
    double wavelength = 532e-9;
    double lenslet_pitch = 150e-6;
    double lenslet_focal = 3e-3;
    double mask_pixel = 10e-6;    // simulation grid interval at the lenslet plane
    double sensor_pixel = 10e-6;  // sensor bin size; odd integer multiple of mask_pixel
    int psf_samples = 151;        // odd; side of the simulated window in grid samples
    int theta_steps = 512;        // Simpson intervals for the aperture integral
    double crop_threshold = 1e-8; // PSF values below this fraction of the peak are dropped

    // Throws ConfigError when a constraint is violated.
    void validate() const;

    // Integer helpers derived from validated ratios.
    int grid_per_lenslet() const;    // lenslet_pitch / mask_pixel
    int grid_per_sensor() const;     // sensor_pixel / mask_pixel (odd)
    int sensor_per_lenslet() const;  // lenslet_pitch / sensor_pixel
    double alpha() const;            // asin(na / refractive_index)
    double wavenumber() const;       // 2*pi*refractive_index / wavelength
};

struct SamplingCheck {
    bool ok = false;
    double threshold = 0.0;  // minimum admissible sample interval, meters
};

// Spectral-propagation sampling gate: the grid interval must satisfy
// dx >= sqrt(distance * wavelength / n_samples), otherwise the quadratic
// phase of the transfer function aliases across the window.
SamplingCheck validate_sampling(double distance, double sample_interval,
                                int n_samples, double wavelength);

}  // namespace lfc
