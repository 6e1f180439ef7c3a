#pragma once

#include <map>
#include <string>
#include <vector>

namespace lfc {

// Lateral voxel lattice. origin_* is the object-space position of voxel
// (0,0) and must be an integer multiple of pitch so that every voxel falls
// exactly on the key's sub-period offset grid.
struct VolumeGrid {
    int nx = 0, ny = 0;
    double pitch = 0.0;
    double origin_x = 0.0, origin_y = 0.0;

    // centered default: origin = -floor(n/2) * pitch
    static VolumeGrid centered(int nx, int ny, double pitch);
};

struct Volume {
    VolumeGrid grid;
    std::vector<double> z;  // plane depths, meters
    std::vector<double> v;  // nz*ny*nx, plane-major

    int nz() const { return static_cast<int>(z.size()); }
    double& at(int zi, int y, int x) {
        return v[(size_t(zi) * grid.ny + y) * grid.nx + x];
    }
    double at(int zi, int y, int x) const {
        return v[(size_t(zi) * grid.ny + y) * grid.nx + x];
    }
    const double* plane(int zi) const { return &v[size_t(zi) * grid.ny * grid.nx]; }
    double* plane(int zi) { return &v[size_t(zi) * grid.ny * grid.nx]; }
};

// Sensor-plane intensity. mask marks valid pixels (empty = all valid);
// occluded pixels hold zero and mask 0. meta carries the provenance needed
// to decrypt (volume grid, quantization scale), all stringly keyed.
struct LightFieldImage {
    int ny = 0, nx = 0;
    double pixel = 0.0;
    std::vector<double> v;
    std::vector<uint8_t> mask;
    std::map<std::string, std::string> meta;

    double& at(int y, int x) { return v[size_t(y) * nx + x]; }
    double at(int y, int x) const { return v[size_t(y) * nx + x]; }
    bool valid(int y, int x) const {
        return mask.empty() || mask[size_t(y) * nx + x] != 0;
    }
    size_t valid_count() const;
    double max_value() const;
};

// Raw container: 32-bit float little-endian payload plus a text sidecar
// header "<path>.hdr" (shape, pitches, z positions, metadata). Images append
// a packed validity bitmap after the pixel payload when a mask is present.
void save_volume(const Volume& vol, const std::string& path);
Volume load_volume(const std::string& path);
void save_image(const LightFieldImage& img, const std::string& path);
LightFieldImage load_image(const std::string& path);

// 16-bit grayscale PNG export, max-normalized; the scale (peak value) is
// recorded in a tEXt chunk. 8/16-bit grayscale PNG planes import as volumes
// mapped linearly to [0,1].
void image_to_png(const LightFieldImage& img, const std::string& path);
Volume volume_from_pngs(const std::vector<std::string>& paths, const VolumeGrid& grid,
                        const std::vector<double>& z);

}  // namespace lfc
