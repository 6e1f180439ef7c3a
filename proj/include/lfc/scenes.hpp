#pragma once

#include <string>
#include <vector>

#include "lfc/volume.hpp"

namespace lfc {

// Built-in test volumes, generated from 1-bit glyph bitmaps embedded in the
// source:
//   "sbu"         letters S, B, U, one plane thick, at the depth planes
//                 nearest -60, -34 and -10 um, amplitude 1.
//   "grayscale3"  same layout, letter amplitudes {128, 255, 128}/255.
//   "grayscale4"  same layout, letter amplitudes {85, 170, 255}/255.
//   "multiplex"   deer, dog and bird glyphs at the same three depths plus a
//                 smooth ellipsoidal blob (30 x 30 x 50 um) spanning the
//                 depth range in a free lateral corner.
// Throws UsageError for unknown names.
Volume demo_scene(const std::string& name, const VolumeGrid& grid,
                  const std::vector<double>& z_planes);

std::vector<std::string> demo_scene_names();

}  // namespace lfc
