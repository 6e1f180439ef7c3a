#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lfc/errors.hpp"
#include "lfc/forward.hpp"
#include "lfc/psf.hpp"
#include "lfc/volume.hpp"

using namespace lfc;

namespace {

const PsfKey& shared_key() {
    static PsfKey key = [] {
        MaskSpec mask;
        return build_psf_key(tiny_config(), mask, {-8e-6, -4e-6}, 0.5e-6);
    }();
    return key;
}

Volume make_volume(const PsfKey& key, int n, const std::vector<double>& values) {
    Volume vol;
    vol.grid = VolumeGrid::centered(n, n, key.offset_pitch);
    vol.z = key.z_planes;
    vol.v = values;
    return vol;
}

std::vector<double> mat_vec(const DenseOperator& H, const std::vector<double>& g) {
    std::vector<double> o(H.rows, 0.0);
    for (size_t r = 0; r < H.rows; ++r) {
        const double* row = &H.m[r * H.cols];
        double s = 0;
        for (size_t c = 0; c < H.cols; ++c) s += row[c] * g[c];
        o[r] = s;
    }
    return o;
}

std::vector<double> mat_tvec(const DenseOperator& H, const std::vector<double>& o) {
    std::vector<double> g(H.cols, 0.0);
    for (size_t r = 0; r < H.rows; ++r) {
        const double* row = &H.m[r * H.cols];
        for (size_t c = 0; c < H.cols; ++c) g[c] += row[c] * o[r];
    }
    return g;
}

}  // namespace

TEST_CASE("matrix-free forward and adjoint match the dense operator") {
    const PsfKey& key = shared_key();
    Volume vol = make_volume(key, 4, {});
    int side = default_sensor_side(vol.grid, key);
    CHECK(side == 8);
    DenseOperator H = dense_operator(key, vol.grid, side);
    REQUIRE(H.rows == 64);
    REQUIRE(H.cols == 32);

    for (int trial = 0; trial < 100; ++trial) {
        vol.v = random_values(H.cols, 100 + trial, 0.0, 1.0);
        LightFieldImage img = apply_forward(vol, key, side);
        std::vector<double> ref = mat_vec(H, vol.v);
        double worst = 0;
        for (size_t i = 0; i < ref.size(); ++i)
            worst = std::max(worst, std::abs(img.v[i] - ref[i]));
        CHECK(worst < 1e-12);
    }

    LightFieldImage obs;
    obs.ny = obs.nx = side;
    obs.pixel = key.config.sensor_pixel;
    for (int trial = 0; trial < 100; ++trial) {
        obs.v = random_values(H.rows, 300 + trial, 0.0, 1.0);
        Volume back = apply_adjoint(obs, key, vol.grid);
        std::vector<double> ref = mat_tvec(H, obs.v);
        double worst = 0;
        for (size_t i = 0; i < ref.size(); ++i)
            worst = std::max(worst, std::abs(back.v[i] - ref[i]));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("forward and adjoint satisfy the inner-product identity") {
    const PsfKey& key = shared_key();
    Volume vol = make_volume(key, 4, {});
    int side = 8;
    LightFieldImage obs;
    obs.ny = obs.nx = side;
    obs.pixel = key.config.sensor_pixel;
    for (int trial = 0; trial < 20; ++trial) {
        vol.v = random_values(32, 500 + trial, 0.0, 1.0);
        obs.v = random_values(64, 700 + trial, 0.0, 1.0);
        LightFieldImage hg = apply_forward(vol, key, side);
        Volume hto = apply_adjoint(obs, key, vol.grid);
        double lhs = 0, rhs = 0;
        for (size_t i = 0; i < hg.v.size(); ++i) lhs += hg.v[i] * obs.v[i];
        for (size_t i = 0; i < vol.v.size(); ++i) rhs += vol.v[i] * hto.v[i];
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1e-300));
    }
}

TEST_CASE("normalized back projection singles out the emitting voxel") {
    // the raw adjoint favors voxels whose point spread keeps more energy on
    // the sensor; dividing by the column norm removes that bias, and then
    // the emitter must win (Cauchy-Schwarz, columns pairwise non-proportional)
    const PsfKey& key = shared_key();
    Volume vol = make_volume(key, 4, std::vector<double>(32, 0.0));
    DenseOperator H = dense_operator(key, vol.grid, 8);
    std::vector<double> norm(H.cols, 0.0);
    for (size_t r = 0; r < H.rows; ++r)
        for (size_t c = 0; c < H.cols; ++c) norm[c] += H.m[r * H.cols + c] * H.m[r * H.cols + c];
    for (double& n : norm) {
        CHECK(n > 0.0);
        n = std::sqrt(n);
    }
    for (size_t j = 0; j < 32; ++j) {
        std::fill(vol.v.begin(), vol.v.end(), 0.0);
        vol.v[j] = 1.0;
        LightFieldImage img = apply_forward(vol, key, 8);
        Volume b = apply_adjoint(img, key, vol.grid);
        size_t arg = 0;
        double best = -1;
        for (size_t k = 0; k < b.v.size(); ++k) {
            double score = b.v[k] / norm[k];
            if (score > best) {
                best = score;
                arg = k;
            }
        }
        CHECK(arg == j);
    }
}

TEST_CASE("a voxel one lenslet period over shifts its image by whole pixels") {
    const PsfKey& key = shared_key();
    int P = key.offsets;
    int R = key.config.sensor_per_lenslet();
    Volume vol;
    vol.grid = VolumeGrid::centered(12, 12, key.offset_pitch);
    vol.z = key.z_planes;
    vol.v.assign(size_t(2) * 12 * 12, 0.0);
    int side = 32;

    vol.at(0, 5, 3) = 1.0;
    LightFieldImage a = apply_forward(vol, key, side);
    vol.at(0, 5, 3) = 0.0;
    vol.at(0, 5, 3 + P) = 1.0;
    LightFieldImage b = apply_forward(vol, key, side);

    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            double moved = (x >= R) ? a.at(y, x - R) : 0.0;
            CHECK(b.at(y, x) == moved);
        }
}

TEST_CASE("default sensor side doubles the geometric footprint") {
    OpticalConfig cfg = tiny_config();
    // 4 voxels * magnification 20 * 0.5 um span 40 um = 4 sensor pixels
    CHECK(default_sensor_side(VolumeGrid::centered(4, 4, 0.5e-6), cfg) == 8);
    CHECK(default_sensor_side(VolumeGrid::centered(3, 3, 0.3e-6), cfg) == 4);  // 1.8 -> 2
    CHECK(default_sensor_side(VolumeGrid::centered(1, 1, 0.5e-6), cfg) == 2);
    CHECK(default_sensor_side(VolumeGrid::centered(4, 4, 0.5e-6), shared_key()) == 8);
}

TEST_CASE("encryption stamps the grid and optionally quantizes") {
    const PsfKey& key = shared_key();
    Volume vol = make_volume(key, 4, random_values(32, 42, 0.0, 1.0));
    EncryptOptions opt;
    LightFieldImage full = encrypt(vol, key, opt);
    CHECK(full.meta.at("grid_nx") == "4");
    CHECK(full.meta.at("grid_ny") == "4");
    CHECK(full.meta.count("grid_pitch") == 1);
    CHECK(full.meta.count("quant_bits") == 0);

    opt.quant_bits = 3;
    LightFieldImage q = encrypt(vol, key, opt);
    CHECK(q.meta.at("quant_bits") == "3");
    double peak = std::stod(q.meta.at("quant_peak"));
    CHECK(peak == full.max_value());
    std::set<double> levels(q.v.begin(), q.v.end());
    CHECK(levels.size() <= 8);
    for (double lv : q.v) {
        CHECK(lv == std::floor(lv));
        CHECK(lv >= 0.0);
        CHECK(lv <= 7.0);
    }
    double bound = 0.5 * peak / 7.0;
    for (size_t i = 0; i < q.v.size(); ++i)
        CHECK(std::abs(q.v[i] * peak / 7.0 - full.v[i]) <= bound + 1e-15 * peak);

    opt.quant_bits = 25;
    CHECK_THROWS_AS(encrypt(vol, key, opt), UsageError);
}

TEST_CASE("occlusion zeroes an exact pixel count and marks the mask") {
    LightFieldImage img;
    img.ny = img.nx = 8;
    img.pixel = 10e-6;
    img.v = random_values(64, 9, 0.5, 1.5);
    std::vector<double> orig = img.v;

    LightFieldImage corner = img;
    occlude(corner, 0.25, OccludeMode::corner);
    CHECK(corner.valid_count() == 48);
    for (size_t i = 0; i < 16; ++i) {
        CHECK(corner.v[i] == 0.0);
        CHECK(corner.mask[i] == 0);
    }
    for (size_t i = 16; i < 64; ++i) CHECK(corner.v[i] == orig[i]);

    LightFieldImage r1 = img, r2 = img, r3 = img;
    occlude(r1, 0.375, OccludeMode::random, 5);
    occlude(r2, 0.375, OccludeMode::random, 5);
    occlude(r3, 0.375, OccludeMode::random, 6);
    CHECK(r1.valid_count() == 40);
    CHECK(r1.v == r2.v);
    CHECK(r1.mask == r2.mask);
    CHECK(r1.v != r3.v);
    occlude(r1, 0.375, OccludeMode::random, 5);  // same args again: no new damage
    CHECK(r1.v == r2.v);
    CHECK(r1.mask == r2.mask);

    LightFieldImage none = img;
    occlude(none, 0.0, OccludeMode::random, 5);
    CHECK(none.v == orig);
    CHECK(none.mask.empty());

    LightFieldImage all = img;
    occlude(all, 1.0, OccludeMode::corner);
    CHECK(all.valid_count() == 0);
    for (double v : all.v) CHECK(v == 0.0);

    CHECK_THROWS_AS(occlude(img, 1.5, OccludeMode::corner), UsageError);
    CHECK_THROWS_AS(occlude(img, -0.1, OccludeMode::random), UsageError);
}

TEST_CASE("the forward map is linear and sends zero to zero") {
    const PsfKey& key = shared_key();
    Volume zero = make_volume(key, 4, std::vector<double>(32, 0.0));
    LightFieldImage z = apply_forward(zero, key, 8);
    for (double v : z.v) CHECK(v == 0.0);

    Volume g1 = make_volume(key, 4, random_values(32, 21, 0.0, 1.0));
    Volume g2 = make_volume(key, 4, random_values(32, 22, 0.0, 1.0));
    Volume mix = g1;
    for (size_t i = 0; i < 32; ++i) mix.v[i] = 2.5 * g1.v[i] + g2.v[i];
    LightFieldImage o1 = apply_forward(g1, key, 8);
    LightFieldImage o2 = apply_forward(g2, key, 8);
    LightFieldImage om = apply_forward(mix, key, 8);
    for (size_t i = 0; i < om.v.size(); ++i)
        CHECK(om.v[i] == doctest::Approx(2.5 * o1.v[i] + o2.v[i]).epsilon(1e-12));
}

TEST_CASE("accumulating plane by plane reproduces the whole-volume image") {
    const PsfKey& key = shared_key();
    Volume vol = make_volume(key, 4, random_values(32, 77, 0.0, 2.0));
    LightFieldImage whole = apply_forward(vol, key, 8);

    LightFieldImage acc;
    acc.ny = acc.nx = 8;
    acc.pixel = key.config.sensor_pixel;
    acc.v.assign(64, 0.0);
    for (int zi = 0; zi < vol.nz(); ++zi) {
        Volume slab;
        slab.grid = vol.grid;
        slab.z = {vol.z[zi]};
        slab.v.assign(vol.plane(zi), vol.plane(zi) + 16);
        PsfKey pk;
        pk.config = key.config;
        pk.mask = key.mask;
        pk.z_planes = slab.z;
        pk.offset_pitch = key.offset_pitch;
        pk.offsets = key.offsets;
        pk.window = key.window;
        pk.psfs.assign(key.psfs.begin() + zi * 16, key.psfs.begin() + (zi + 1) * 16);
        LightFieldImage part = apply_forward(slab, pk, 8);
        for (size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += part.v[i];
    }
    CHECK(acc.v == whole.v);
}

TEST_CASE("forward application rejects mismatched geometry") {
    const PsfKey& key = shared_key();
    Volume vol = make_volume(key, 4, std::vector<double>(32, 0.0));

    Volume bad = vol;
    bad.grid.pitch = 0.4e-6;
    CHECK_THROWS_AS(apply_forward(bad, key, 8), UsageError);

    bad = vol;
    bad.z = {-8e-6};
    bad.v.resize(16);
    CHECK_THROWS_AS(apply_forward(bad, key, 8), UsageError);

    bad = vol;
    bad.z = {-8e-6, -5e-6};
    CHECK_THROWS_AS(apply_forward(bad, key, 8), UsageError);

    bad = vol;
    bad.grid.origin_x = 0.13e-6;  // off the voxel lattice
    CHECK_THROWS_AS(apply_forward(bad, key, 8), UsageError);

    CHECK_THROWS_AS(apply_forward(vol, key, 7), UsageError);
    CHECK_THROWS_AS(apply_forward(vol, key, 0), UsageError);

    CHECK_THROWS_AS(dense_operator(key, vol.grid, 8, 100), ConfigError);
}
