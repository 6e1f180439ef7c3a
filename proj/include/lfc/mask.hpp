#pragma once

#include <cstdint>
#include <vector>

#include "lfc/field.hpp"
#include "lfc/optics.hpp"

namespace lfc {

enum class MaskKind { none, phase, amplitude };
enum class AmplitudeLaw { binary, uniform };

// The random mask is the decryption key material. One per-lenslet
// realization is drawn from the seeded counter-based stream and replicated
// over every lenslet cell (comb tiling), so the optical system stays
// shift-invariant modulo the lenslet pitch. The optional sensor-plane
// amplitude mask is tiled with the same period for the same reason.
struct MaskSpec {
    MaskKind kind = MaskKind::phase;
    uint64_t seed = 1;
    AmplitudeLaw law = AmplitudeLaw::binary;  // for kind == amplitude and the sensor mask
    bool sensor_mask = false;
    uint64_t sensor_seed = 2;
};

// Phase modulation of the microlens array over a centered window of
// n_samples at cfg.mask_pixel spacing: within each cell of side
// lenslet_pitch, amplitude 1 and phase exp(-i*pi*(x^2+y^2)/(wavelength*f))
// in cell-local coordinates. Value exactly 1+0i at lenslet centers.
ComplexField lenslet_modulation(const OpticalConfig& cfg, int n_samples);

// Random mask field over the same window. kind none -> all ones;
// phase -> exp(-i*pi*beta), beta iid uniform in [-0.5, 0.5) per mask pixel;
// amplitude -> iid {0,1} (binary law) or uniform [0,1) per mask pixel.
ComplexField random_mask(const OpticalConfig& cfg, const MaskSpec& spec, int n_samples);

// One lenslet cell of the random mask as raw uniform draws (phase: beta,
// amplitude: the amplitude value), row-major grid_per_lenslet^2.
std::vector<double> mask_cell_values(const OpticalConfig& cfg, const MaskSpec& spec);

// Sensor-plane amplitude mask sampled per sensor pixel over an n_out-sided
// window, tiled with the lenslet period. All ones when spec.sensor_mask is
// false.
std::vector<double> sensor_amplitude_mask(const OpticalConfig& cfg, const MaskSpec& spec,
                                          int n_out);

}  // namespace lfc
