#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lfc/volume.hpp"

namespace lfc {

// Bit-plane decomposition of a nonnegative image: values are scaled by
// (2^bits - 1)/peak, rounded half-up to integer levels, and split into
// binary planes (LSB first). reassemble is exact on the levels; against the
// original image the error is bounded by 0.5 * peak / (2^bits - 1).
struct BinaryPlaneSet {
    int ny = 0, nx = 0;
    int bits = 0;
    double peak = 0.0;   // recorded image maximum (restores the scale)
    double pixel = 0.0;  // sensor pixel pitch carried through
    std::vector<std::vector<uint8_t>> planes;  // planes[b][y*nx+x] in {0,1}
    std::map<std::string, std::string> meta;   // copied from the source image
};

BinaryPlaneSet digitize(const LightFieldImage& img, int bits);
LightFieldImage reassemble(const BinaryPlaneSet& planes);

// Single-file container: text header (shape, bits, peak, checksum) followed
// by the planes packed 8 pixels per byte, row-major, LSB-first within each
// byte.
void save_planes(const BinaryPlaneSet& planes, const std::string& path);
BinaryPlaneSet load_planes(const std::string& path);

// Black/white PNG with exact 0/255 values, one file per plane; import
// accepts the same.
void plane_to_png(const BinaryPlaneSet& planes, int index, const std::string& path);
std::vector<uint8_t> plane_from_png(const std::string& path, int& ny, int& nx);

}  // namespace lfc
