#include "lfc/forward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lfc/errors.hpp"
#include "lfc/parallel.hpp"
#include "lfc/rng.hpp"

namespace lfc {

namespace {

inline int mod_floor(long a, int m) {
    long r = a % m;
    return int(r < 0 ? r + m : r);
}

inline bool near(double a, double b) {
    return std::fabs(a - b) <= 1e-12 + 1e-9 * std::max(std::fabs(a), std::fabs(b));
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// lattice index of a voxel along one axis; the origin must sit on the lattice
long lattice_base(double origin, double pitch, const char* axis) {
    double r = origin / pitch;
    long m = std::lround(r);
    if (std::fabs(r - double(m)) > 1e-6)
        throw UsageError(std::string("grid origin_") + axis +
                         " is not an integer multiple of the voxel pitch");
    return m;
}

struct VoxelGeometry {
    int P = 0;       // offsets per lenslet period
    int R = 0;       // sensor pixels per lenslet period
    int c_out = 0;   // window center index
    long base_x = 0; // lattice index of voxel (0,0)
    long base_y = 0;
};

VoxelGeometry check_geometry(const VolumeGrid& grid, const PsfKey& key) {
    if (grid.nx < 1 || grid.ny < 1 || grid.pitch <= 0)
        throw UsageError("volume grid is empty");
    if (!near(grid.pitch, key.offset_pitch))
        throw UsageError("volume pitch " + fmt_double(grid.pitch) +
                         " does not match the key offset pitch " +
                         fmt_double(key.offset_pitch));
    VoxelGeometry g;
    g.P = key.offsets;
    g.R = key.config.sensor_per_lenslet();
    g.c_out = (key.window - 1) / 2;
    g.base_x = lattice_base(grid.origin_x, grid.pitch, "x");
    g.base_y = lattice_base(grid.origin_y, grid.pitch, "y");
    return g;
}

void check_depths(const std::vector<double>& vz, const PsfKey& key) {
    if (vz.size() != key.z_planes.size())
        throw UsageError("volume has a different number of depth planes than the key");
    for (size_t i = 0; i < vz.size(); ++i)
        if (!near(vz[i], key.z_planes[i]))
            throw UsageError("volume depth plane " + std::to_string(i) +
                             " does not match the key");
}

void check_sensor(int sensor_side) {
    if (sensor_side < 2 || sensor_side % 2 != 0)
        throw UsageError("sensor side must be even and positive");
}

// Adds value * psf into acc (side x side) with the PSF window shifted by
// (Ly, Lx) lenslet periods. Out-of-sensor entries are dropped.
void splat(std::vector<double>& acc, int side, const SparsePsf& psf, double value,
           long Ly, long Lx, const VoxelGeometry& g) {
    long base_r = long(psf.r0) - g.c_out + Ly * g.R + side / 2;
    long base_c = long(psf.c0) - g.c_out + Lx * g.R + side / 2;
    int r_lo = int(std::max(0L, -base_r));
    int r_hi = int(std::min(long(psf.h), long(side) - base_r));
    int c_lo = int(std::max(0L, -base_c));
    int c_hi = int(std::min(long(psf.w), long(side) - base_c));
    for (int r = r_lo; r < r_hi; ++r) {
        const double* src = &psf.a[size_t(r) * psf.w];
        double* dst = &acc[size_t(base_r + r) * side + base_c + c_lo];
        for (int c = c_lo; c < c_hi; ++c) dst[c - c_lo] += value * src[c];
    }
}

constexpr int kRowChunk = 16;

}  // namespace

int default_sensor_side(const VolumeGrid& grid, const OpticalConfig& cfg) {
    double extent = double(std::max(grid.nx, grid.ny)) * cfg.magnification *
                    grid.pitch / cfg.sensor_pixel;
    long k = std::lround(extent);
    if (!(std::fabs(extent - double(k)) <= 1e-6 * std::max(1.0, extent)))
        k = long(std::ceil(extent));
    return int(2 * std::max(1L, k));
}

int default_sensor_side(const VolumeGrid& grid, const PsfKey& key) {
    return default_sensor_side(grid, key.config);
}

LightFieldImage apply_forward(const Volume& vol, const PsfKey& key, int sensor_side) {
    check_depths(vol.z, key);
    VoxelGeometry g = check_geometry(vol.grid, key);
    check_sensor(sensor_side);

    const int ny = vol.grid.ny, nx = vol.grid.nx, nz = vol.nz();
    const int row_chunks = (ny + kRowChunk - 1) / kRowChunk;
    const size_t chunks = size_t(nz) * row_chunks;
    std::vector<std::vector<double>> partial(chunks);

    parallel_for(chunks, [&](size_t chunk) {
        int zi = int(chunk) / row_chunks;
        int y0 = (int(chunk) % row_chunks) * kRowChunk;
        int y1 = std::min(y0 + kRowChunk, ny);
        std::vector<double>& acc = partial[chunk];
        const double* plane = vol.plane(zi);
        for (int y = y0; y < y1; ++y) {
            long my = g.base_y + y;
            int qy = mod_floor(my, g.P);
            long Ly = (my - qy) / g.P;
            for (int x = 0; x < nx; ++x) {
                double value = plane[size_t(y) * nx + x];
                if (value == 0.0) continue;
                if (acc.empty()) acc.assign(size_t(sensor_side) * sensor_side, 0.0);
                long mx = g.base_x + x;
                int qx = mod_floor(mx, g.P);
                long Lx = (mx - qx) / g.P;
                splat(acc, sensor_side, key.psf(zi, qy, qx), value, Ly, Lx, g);
            }
        }
    });

    LightFieldImage img;
    img.ny = img.nx = sensor_side;
    img.pixel = key.config.sensor_pixel;
    img.v.assign(size_t(sensor_side) * sensor_side, 0.0);
    // Merge chunks into a per-plane bucket first, then buckets in z order.
    // This keeps the rounding pattern of summing per-plane images, so a
    // caller accumulating one plane at a time reproduces this bitwise.
    std::vector<double> plane_sum;
    for (int zi = 0; zi < nz; ++zi) {
        bool any = false;
        for (int rc = 0; rc < row_chunks; ++rc) {
            const auto& acc = partial[size_t(zi) * row_chunks + rc];
            if (acc.empty()) continue;
            if (!any) {
                plane_sum.assign(img.v.size(), 0.0);
                any = true;
            }
            for (size_t i = 0; i < img.v.size(); ++i) plane_sum[i] += acc[i];
        }
        if (any)
            for (size_t i = 0; i < img.v.size(); ++i) img.v[i] += plane_sum[i];
    }
    return img;
}

Volume apply_adjoint(const LightFieldImage& img, const PsfKey& key,
                     const VolumeGrid& grid) {
    VoxelGeometry g = check_geometry(grid, key);
    check_sensor(img.nx);
    if (img.ny != img.nx) throw UsageError("sensor image must be square");

    Volume out;
    out.grid = grid;
    out.z = key.z_planes;
    out.v.assign(size_t(out.nz()) * grid.ny * grid.nx, 0.0);

    const int side = img.nx;
    const bool masked = !img.mask.empty();
    const size_t voxels = out.v.size();
    parallel_for(voxels, [&](size_t idx) {
        int x = int(idx % grid.nx);
        int y = int((idx / grid.nx) % grid.ny);
        int zi = int(idx / (size_t(grid.nx) * grid.ny));
        long my = g.base_y + y, mx = g.base_x + x;
        int qy = mod_floor(my, g.P), qx = mod_floor(mx, g.P);
        long Ly = (my - qy) / g.P, Lx = (mx - qx) / g.P;
        const SparsePsf& psf = key.psf(zi, qy, qx);
        long base_r = long(psf.r0) - g.c_out + Ly * g.R + side / 2;
        long base_c = long(psf.c0) - g.c_out + Lx * g.R + side / 2;
        int r_lo = int(std::max(0L, -base_r));
        int r_hi = int(std::min(long(psf.h), long(side) - base_r));
        int c_lo = int(std::max(0L, -base_c));
        int c_hi = int(std::min(long(psf.w), long(side) - base_c));
        double s = 0.0;
        for (int r = r_lo; r < r_hi; ++r) {
            const double* w = &psf.a[size_t(r) * psf.w];
            const double* px = &img.v[size_t(base_r + r) * side + base_c];
            const uint8_t* mrow =
                masked ? &img.mask[size_t(base_r + r) * side + base_c] : nullptr;
            for (int c = c_lo; c < c_hi; ++c)
                if (!masked || mrow[c]) s += w[c] * px[c];
        }
        out.v[idx] = s;
    });
    return out;
}

DenseOperator dense_operator(const PsfKey& key, const VolumeGrid& grid, int sensor_side,
                             size_t max_entries) {
    VoxelGeometry g = check_geometry(grid, key);
    check_sensor(sensor_side);
    DenseOperator op;
    op.rows = size_t(sensor_side) * sensor_side;
    op.cols = size_t(key.z_planes.size()) * grid.ny * grid.nx;
    if (op.rows * op.cols > max_entries) {
        std::ostringstream os;
        os << "dense operator needs " << op.rows * op.cols
           << " entries, above the cap of " << max_entries;
        throw ConfigError(os.str());
    }
    op.m.assign(op.rows * op.cols, 0.0);

    std::vector<double> col(op.rows);
    for (size_t j = 0; j < op.cols; ++j) {
        int x = int(j % grid.nx);
        int y = int((j / grid.nx) % grid.ny);
        int zi = int(j / (size_t(grid.nx) * grid.ny));
        long my = g.base_y + y, mx = g.base_x + x;
        int qy = mod_floor(my, g.P), qx = mod_floor(mx, g.P);
        long Ly = (my - qy) / g.P, Lx = (mx - qx) / g.P;
        std::fill(col.begin(), col.end(), 0.0);
        splat(col, sensor_side, key.psf(zi, qy, qx), 1.0, Ly, Lx, g);
        for (size_t i = 0; i < op.rows; ++i) op.m[i * op.cols + j] = col[i];
    }
    return op;
}

void annotate_encrypted(LightFieldImage& img, const VolumeGrid& grid, int quant_bits) {
    img.meta["grid_nx"] = std::to_string(grid.nx);
    img.meta["grid_ny"] = std::to_string(grid.ny);
    img.meta["grid_pitch"] = fmt_double(grid.pitch);
    img.meta["grid_origin_x"] = fmt_double(grid.origin_x);
    img.meta["grid_origin_y"] = fmt_double(grid.origin_y);

    if (quant_bits > 0) {
        if (quant_bits > 24) throw UsageError("quantization depth above 24 bits");
        double peak = img.max_value();
        double levels = double((1u << quant_bits) - 1);
        double scale = peak > 0 ? levels / peak : 0.0;
        for (double& v : img.v) v = std::floor(v * scale + 0.5);
        img.meta["quant_bits"] = std::to_string(quant_bits);
        img.meta["quant_peak"] = fmt_double(peak);
    }
}

LightFieldImage encrypt(const Volume& vol, const PsfKey& key, const EncryptOptions& opt) {
    for (double v : vol.v)
        if (!(v >= 0.0)) throw UsageError("volume values must be nonnegative and finite");
    int side = opt.sensor_side > 0 ? opt.sensor_side : default_sensor_side(vol.grid, key);
    LightFieldImage img = apply_forward(vol, key, side);
    annotate_encrypted(img, vol.grid, opt.quant_bits);
    return img;
}

void occlude(LightFieldImage& img, double fraction, OccludeMode mode, uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw UsageError("occlusion fraction must lie in [0, 1]");
    size_t total = size_t(img.ny) * img.nx;
    if (img.v.size() != total) throw UsageError("image buffer size mismatch");
    size_t n_zero = size_t(std::floor(fraction * double(total)));
    if (n_zero == 0) return;
    if (img.mask.empty()) img.mask.assign(total, 1);

    auto kill = [&](size_t i) {
        img.v[i] = 0.0;
        img.mask[i] = 0;
    };
    if (mode == OccludeMode::corner) {
        for (size_t i = 0; i < n_zero; ++i) kill(i);
    } else {
        std::vector<uint32_t> idx(total);
        for (size_t i = 0; i < total; ++i) idx[i] = uint32_t(i);
        SequentialRng rng(splitmix64(seed ^ splitmix64(rng_role::occlude)));
        for (size_t i = 0; i < n_zero; ++i) {
            size_t j = i + size_t(rng.below(total - i));
            std::swap(idx[i], idx[j]);
            kill(idx[i]);
        }
    }
}

}  // namespace lfc
