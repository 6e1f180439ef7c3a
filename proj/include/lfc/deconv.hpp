#pragma once

#include <functional>

#include "lfc/forward.hpp"

namespace lfc {

// Multiplicative image-space deconvolution:
//   g <- g * (H^T O) / (H^T H g)
// from a uniform positive start, fixed iteration count, nonnegativity
// preserved by construction. The denominator is floored at floor_epsilon
// times its own maximum to avoid division blowups. Thresholding (fraction
// of the reconstruction peak) is applied once after the loop, never inside.
struct DeconvSettings {
    int iterations = 8;
    double floor_epsilon = 1e-12;
    double threshold_fraction = 0.0;
    enum class Init { ones, adjoint } init = Init::ones;
    bool use_mask = true;  // occluded pixels excluded from both H^T applications
};

struct IterationRecord {
    int index = 0;        // 1-based
    double residual = 0;  // ||O - H g||^2 of the iterate entering the step, valid pixels
    double gmin = 0, gmax = 0;  // extrema after the multiplicative update
};

enum class DeconvStatus { ok, zero_image };

struct DeconvResult {
    Volume volume;
    DeconvStatus status = DeconvStatus::ok;
    std::vector<IterationRecord> iterations;
};

// Reconstructs the volume on `grid` with the key's depth planes. Throws
// UsageError on negative image values; an all-zero image short-circuits to
// an all-zero volume with status zero_image. on_iteration (optional) sees
// each record as it is produced.
DeconvResult decrypt(const LightFieldImage& img, const PsfKey& key, const VolumeGrid& grid,
                     const DeconvSettings& settings,
                     const std::function<void(const IterationRecord&)>& on_iteration = {});

}  // namespace lfc
