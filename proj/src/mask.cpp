#include "lfc/mask.hpp"

#include <cmath>

#include "lfc/errors.hpp"
#include "lfc/rng.hpp"

namespace lfc {

namespace {

inline int mod_floor(int a, int m) { return ((a % m) + m) % m; }

// cell-local tile of the lens phase, grid_per_lenslet^2
std::vector<cplx> lens_tile(const OpticalConfig& cfg) {
    int r = cfg.grid_per_lenslet();
    int h = r / 2;
    double coef = -M_PI / (cfg.wavelength * cfg.lenslet_focal);
    std::vector<cplx> tile(size_t(r) * r);
    for (int ly = 0; ly < r; ++ly) {
        double yl = (ly - h) * cfg.mask_pixel;
        for (int lx = 0; lx < r; ++lx) {
            double xl = (lx - h) * cfg.mask_pixel;
            tile[size_t(ly) * r + lx] = std::polar(1.0, coef * (xl * xl + yl * yl));
        }
    }
    return tile;
}

std::vector<cplx> mask_tile(const OpticalConfig& cfg, const MaskSpec& spec) {
    int r = cfg.grid_per_lenslet();
    std::vector<cplx> tile(size_t(r) * r, cplx(1.0, 0.0));
    if (spec.kind == MaskKind::none) return tile;
    for (int ly = 0; ly < r; ++ly) {
        for (int lx = 0; lx < r; ++lx) {
            double u = uniform01(spec.seed, rng_role::lenslet_mask, ly, lx);
            if (spec.kind == MaskKind::phase) {
                double beta = u - 0.5;
                tile[size_t(ly) * r + lx] = std::polar(1.0, -M_PI * beta);
            } else {
                double amp = spec.law == AmplitudeLaw::binary ? (u < 0.5 ? 0.0 : 1.0) : u;
                tile[size_t(ly) * r + lx] = cplx(amp, 0.0);
            }
        }
    }
    return tile;
}

ComplexField fill_from_tile(const OpticalConfig& cfg, const std::vector<cplx>& tile,
                            int n_samples) {
    if (n_samples < 1 || n_samples % 2 == 0)
        throw ConfigError("window sample count must be odd and positive");
    int r = cfg.grid_per_lenslet();
    int h = r / 2;
    ComplexField f(n_samples, cfg.mask_pixel);
    int c = f.center();
    for (int row = 0; row < n_samples; ++row) {
        int ly = mod_floor(row - c + h, r);
        for (int col = 0; col < n_samples; ++col) {
            int lx = mod_floor(col - c + h, r);
            f.at(row, col) = tile[size_t(ly) * r + lx];
        }
    }
    return f;
}

}  // namespace

ComplexField lenslet_modulation(const OpticalConfig& cfg, int n_samples) {
    return fill_from_tile(cfg, lens_tile(cfg), n_samples);
}

ComplexField random_mask(const OpticalConfig& cfg, const MaskSpec& spec, int n_samples) {
    return fill_from_tile(cfg, mask_tile(cfg, spec), n_samples);
}

std::vector<double> mask_cell_values(const OpticalConfig& cfg, const MaskSpec& spec) {
    int r = cfg.grid_per_lenslet();
    std::vector<double> out(size_t(r) * r, 1.0);
    if (spec.kind == MaskKind::none) return out;
    for (int ly = 0; ly < r; ++ly) {
        for (int lx = 0; lx < r; ++lx) {
            double u = uniform01(spec.seed, rng_role::lenslet_mask, ly, lx);
            double v;
            if (spec.kind == MaskKind::phase) {
                v = u - 0.5;
            } else {
                v = spec.law == AmplitudeLaw::binary ? (u < 0.5 ? 0.0 : 1.0) : u;
            }
            out[size_t(ly) * r + lx] = v;
        }
    }
    return out;
}

std::vector<double> sensor_amplitude_mask(const OpticalConfig& cfg, const MaskSpec& spec,
                                          int n_out) {
    std::vector<double> out(size_t(n_out) * n_out, 1.0);
    if (!spec.sensor_mask) return out;
    int r = cfg.sensor_per_lenslet();
    int h = r / 2;
    int c = (n_out - 1) / 2;
    for (int row = 0; row < n_out; ++row) {
        int ly = mod_floor(row - c + h, r);
        for (int col = 0; col < n_out; ++col) {
            int lx = mod_floor(col - c + h, r);
            double u = uniform01(spec.sensor_seed, rng_role::sensor_mask, ly, lx);
            out[size_t(row) * n_out + col] =
                spec.law == AmplitudeLaw::binary ? (u < 0.5 ? 0.0 : 1.0) : u;
        }
    }
    return out;
}

}  // namespace lfc
