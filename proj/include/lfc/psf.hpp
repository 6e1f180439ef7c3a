#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lfc/mask.hpp"
#include "lfc/optics.hpp"

namespace lfc {

// One point-spread function on the sensor pixel grid: nonnegative, unit
// sum, stored dense inside the bounding box of the entries that survived
// the crop threshold (values below threshold*peak are zeroed before
// normalization, so serialization round-trips exactly).
struct SparsePsf {
    int window = 0;      // side of the full output window, sensor pixels
    int r0 = 0, c0 = 0;  // bounding box origin within the window
    int h = 0, w = 0;    // bounding box extent (0 when the PSF is empty)
    std::vector<double> a;  // h*w values

    double value(int wr, int wc) const {  // window coordinates
        int r = wr - r0, c = wc - c0;
        if (r < 0 || c < 0 || r >= h || c >= w) return 0.0;
        return a[size_t(r) * w + c];
    }
    double sum() const;
    size_t nnz() const;
};

// Decryption key: one PSF per (depth plane, sub-period lateral offset).
// Offsets cover one lenslet period in steps of offset_pitch; a voxel a
// whole number of periods away reuses the same PSF shifted by
// lenslet_pitch/sensor_pixel pixels (the system is shift-invariant modulo
// the lenslet period by construction of the masks). Treated as immutable
// after construction.
struct PsfKey {
    OpticalConfig config;
    MaskSpec mask;
    std::vector<double> z_planes;
    double offset_pitch = 0.0;  // lateral step between key offsets (= voxel pitch)
    int offsets = 0;            // offsets per axis per lenslet period
    int window = 0;             // PSF window side, sensor pixels
    std::vector<SparsePsf> psfs;  // indexed [z][offset_y][offset_x]
    uint64_t checksum = 0;

    const SparsePsf& psf(int zi, int qy, int qx) const {
        return psfs[(size_t(zi) * offsets + qy) * offsets + qx];
    }
    size_t count() const { return psfs.size(); }
    int out_window() const { return window; }
};

// Wave pipeline for a single emitter: aperture integral field, microlens
// phase, random mask, propagation to the focal plane, intensity, area
// binning to the sensor pixel, optional sensor amplitude mask, crop and
// unit normalization.
SparsePsf compute_point_psf(const OpticalConfig& cfg, const MaskSpec& mask,
                            double px, double py, double pz);

// All offsets of one depth plane, row-major (offset_y, offset_x).
// Deterministic: each cell's value is independent of scheduling.
std::vector<SparsePsf> build_psf_plane(const OpticalConfig& cfg, const MaskSpec& mask,
                                       double z, double voxel_pitch);

PsfKey build_psf_key(const OpticalConfig& cfg, const MaskSpec& mask,
                     const std::vector<double>& z_planes, double voxel_pitch);

// Offsets per lenslet period; throws ConfigError unless
// lenslet_pitch/(magnification*voxel_pitch) is a positive integer.
int offsets_per_period(const OpticalConfig& cfg, double voxel_pitch);

// Container I/O (magic "LFPK1"): human-readable key=value header followed
// by little-endian f64 sparse blocks. Self-describing; load needs no side
// configuration. save_psf_key streams plane by plane and never holds a
// second copy.
void save_psf_key(const PsfKey& key, const std::string& path);
PsfKey load_psf_key(const std::string& path);

// Incremental writer for keys too large to hold at once: header first
// (checksum patched on finish), then one block per write_psf in index
// order. Produces byte-identical files to save_psf_key.
class PsfKeyWriter {
  public:
    PsfKeyWriter(const std::string& path, const OpticalConfig& cfg, const MaskSpec& mask,
                 const std::vector<double>& z_planes, double offset_pitch);
    ~PsfKeyWriter();
    void write_psf(const SparsePsf& psf);
    uint64_t finish();  // returns the content checksum
  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Streaming reader: header up front, then one single-plane key per
// read_plane() call, file checksum verified when the last plane is read.
// Peak memory is one plane of PSFs regardless of the file size.
class PsfKeyReader {
  public:
    explicit PsfKeyReader(const std::string& path);
    ~PsfKeyReader();
    const OpticalConfig& config() const;
    const MaskSpec& mask() const;
    const std::vector<double>& z_planes() const;
    double offset_pitch() const;
    int offsets() const;
    int window() const;
    uint64_t checksum() const;  // as declared in the header
    PsfKey read_plane();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// FNV-1a over the serialized PSF blocks in index order.
uint64_t psf_key_checksum(const PsfKey& key);

// Returns a new key with every stored value multiplied by
// (1 + fraction * u), u iid uniform in [-1, 1] per entry (counter-based on
// the given seed), clamped at zero, not renormalized. fraction 0 returns an
// identical key.
PsfKey perturb_key(const PsfKey& key, double fraction, uint64_t seed);

}  // namespace lfc
