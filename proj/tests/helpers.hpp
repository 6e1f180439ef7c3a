#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "lfc/optics.hpp"
#include "lfc/rng.hpp"

// Small single-lenslet setup used across the tests: a 40 um lenslet with a
// short focal length keeps windows tiny (45 samples, 9 sensor bins) so the
// dense-matrix oracle stays cheap.
inline lfc::OpticalConfig tiny_config() {
    lfc::OpticalConfig cfg;
    cfg.lenslet_pitch = 40e-6;
    cfg.lenslet_focal = 0.2e-3;
    cfg.mask_pixel = 2e-6;
    cfg.sensor_pixel = 10e-6;
    cfg.psf_samples = 45;
    return cfg;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::string templ =
            (std::filesystem::temp_directory_path() / "lfc_test_XXXXXX").string();
        std::vector<char> buf(templ.begin(), templ.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
        path = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// deterministic pseudo-random doubles for test inputs
inline std::vector<double> random_values(size_t n, uint64_t seed, double lo = 0.0,
                                         double hi = 1.0) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * lfc::uniform01(seed, 1000, i, 0);
    return v;
}
