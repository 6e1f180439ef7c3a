#pragma once

#include <cstdint>

#include "lfc/psf.hpp"
#include "lfc/volume.hpp"

namespace lfc {

// Default sensor side: twice the geometric footprint of the volume
// (magnification * lateral extent / sensor pixel), rounded up to even.
int default_sensor_side(const VolumeGrid& grid, const PsfKey& key);
int default_sensor_side(const VolumeGrid& grid, const OpticalConfig& cfg);

// Intensity superposition O = H g: every voxel adds its key PSF shifted by
// its whole-period lenslet displacement, scaled by the voxel value.
// Contributions falling outside the sensor are cropped (energy lost, not
// renormalized). The accumulation order is fixed and independent of the
// thread count, so outputs are bitwise reproducible.
LightFieldImage apply_forward(const Volume& vol, const PsfKey& key, int sensor_side);

// Adjoint H^T O: per-voxel inner product of the image with the voxel's
// shifted PSF. Pixels outside the sensor or with mask 0 contribute zero.
Volume apply_adjoint(const LightFieldImage& img, const PsfKey& key, const VolumeGrid& grid);

// Explicit dense H (rows = pixels, cols = voxels), the brute-force oracle
// for small systems. Refuses instances above max_entries with a ConfigError
// stating the required cap.
struct DenseOperator {
    size_t rows = 0, cols = 0;
    std::vector<double> m;  // row-major
};
DenseOperator dense_operator(const PsfKey& key, const VolumeGrid& grid, int sensor_side,
                             size_t max_entries = size_t(1) << 24);

struct EncryptOptions {
    int sensor_side = 0;  // 0 = default rule
    int quant_bits = 0;   // 0 = off; else round to B-bit levels, scale recorded
};

// Forward projection plus optional B-bit quantization. With quantization,
// pixel values become the rounded integer levels and meta records
// quant_bits and quant_peak (peak * level / (2^B - 1) restores intensity).
// The volume grid is recorded in meta so decryption is self-contained.
LightFieldImage encrypt(const Volume& vol, const PsfKey& key, const EncryptOptions& opt);

// Stamp the volume grid into img.meta and apply the optional quantization
// step of encrypt() in place. Lets a caller that accumulated the forward
// projection plane by plane finish with byte-identical metadata.
void annotate_encrypted(LightFieldImage& img, const VolumeGrid& grid, int quant_bits);

enum class OccludeMode { corner, random };

// Zeroes exactly floor(fraction * pixels) pixels and marks them invalid in
// the mask. corner: row-major fill from the top-left corner (whole rows
// plus a partial row). random: uniform pixel subset from the seeded stream.
// Idempotent for the same arguments.
void occlude(LightFieldImage& img, double fraction, OccludeMode mode, uint64_t seed = 0);

}  // namespace lfc
