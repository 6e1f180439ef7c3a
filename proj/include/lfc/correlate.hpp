#pragma once

#include <vector>

#include "lfc/volume.hpp"

namespace lfc {

struct Correlation {
    double c = 0.0;      // maximal zero-mean normalized cross-correlation
    int dy = 0, dx = 0;  // shift achieving it (reconstruction relative to reference)
};

// Zero-mean normalized cross-correlation maximized over integer shifts
// |dy|,|dx| <= max_shift (0 = default min(ny,nx)/4), statistics taken on the
// overlap region of each shift. Affine reconstruction changes (positive
// gain, offset) leave the score unchanged. Ties resolve to the shift
// closest to the origin. Throws UsageError when the reference is constant;
// shifts whose overlap of the reconstruction is constant are skipped.
Correlation normalized_correlation(const std::vector<double>& ref,
                                   const std::vector<double>& rec, int ny, int nx,
                                   int max_shift = 0);

// Per-plane correlation of two volumes on the same grid.
std::vector<Correlation> per_plane_correlation(const Volume& ref, const Volume& rec,
                                               int max_shift = 0);

}  // namespace lfc
