#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lfc/errors.hpp"
#include "lfc/optics.hpp"
#include "lfc/psf.hpp"

using namespace lfc;

namespace {

PsfKey tiny_key() {
    OpticalConfig cfg = tiny_config();
    MaskSpec mask;
    return build_psf_key(cfg, mask, {-8e-6, -4e-6}, 0.5e-6);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool same_psf(const SparsePsf& a, const SparsePsf& b) {
    return a.window == b.window && a.r0 == b.r0 && a.c0 == b.c0 && a.h == b.h &&
           a.w == b.w && a.a == b.a;
}

}  // namespace

TEST_CASE("point spreads are nonnegative, finite, and sum to one") {
    OpticalConfig cfg = tiny_config();
    MaskSpec mask;
    for (double pz : {-2e-6, -8e-6}) {
        for (double px : {0.0, 0.5e-6, 1.5e-6}) {
            SparsePsf p = compute_point_psf(cfg, mask, px, 0.25e-6, pz);
            CHECK(p.window == cfg.psf_samples / cfg.grid_per_sensor());
            double lo = 0;
            for (double v : p.a) {
                CHECK(std::isfinite(v));
                lo = std::min(lo, v);
            }
            CHECK(lo == 0.0);
            CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("offset count per lenslet period follows the pitch ratio") {
    OpticalConfig cfg = tiny_config();
    // 40 um pitch / (magnification 20 * 0.5 um) = 4
    CHECK(offsets_per_period(cfg, 0.5e-6) == 4);
    CHECK(offsets_per_period(cfg, 2e-6) == 1);
    CHECK_THROWS_AS(offsets_per_period(cfg, 0.3e-6), ConfigError);
    CHECK_THROWS_AS(offsets_per_period(cfg, -0.5e-6), ConfigError);
    CHECK_THROWS_AS(offsets_per_period(cfg, 0.0), ConfigError);
}

TEST_CASE("a plane build matches single-point evaluation on every slot") {
    OpticalConfig cfg = tiny_config();
    MaskSpec mask;
    double pitch = 0.5e-6, z = -6e-6;
    int P = offsets_per_period(cfg, pitch);
    std::vector<SparsePsf> plane = build_psf_plane(cfg, mask, z, pitch);
    REQUIRE(plane.size() == size_t(P) * P);
    for (int qy = 0; qy < P; ++qy)
        for (int qx = 0; qx < P; ++qx) {
            SparsePsf solo = compute_point_psf(cfg, mask, qx * pitch, qy * pitch, z);
            CHECK(same_psf(plane[size_t(qy) * P + qx], solo));
        }
}

TEST_CASE("key files round-trip exactly") {
    PsfKey key = tiny_key();
    CHECK(key.count() == 2u * 4 * 4);
    CHECK(key.window == 9);
    CHECK(key.checksum == psf_key_checksum(key));

    TempDir tmp;
    std::string path = tmp.file("k.lfk");
    save_psf_key(key, path);
    PsfKey back = load_psf_key(path);
    CHECK(back.checksum == key.checksum);
    CHECK(back.z_planes == key.z_planes);
    CHECK(back.offset_pitch == key.offset_pitch);
    CHECK(back.offsets == key.offsets);
    CHECK(back.window == key.window);
    CHECK(back.config.na == key.config.na);
    CHECK(back.config.psf_samples == key.config.psf_samples);
    CHECK(back.mask.seed == key.mask.seed);
    REQUIRE(back.count() == key.count());
    for (size_t i = 0; i < key.count(); ++i) CHECK(same_psf(back.psfs[i], key.psfs[i]));
}

TEST_CASE("incremental key writing is byte-identical to the one-shot save") {
    PsfKey key = tiny_key();
    TempDir tmp;
    std::string whole = tmp.file("whole.lfk");
    std::string inc = tmp.file("inc.lfk");
    save_psf_key(key, whole);
    {
        PsfKeyWriter w(inc, key.config, key.mask, key.z_planes, key.offset_pitch);
        for (const SparsePsf& p : key.psfs) w.write_psf(p);
        CHECK(w.finish() == key.checksum);
    }
    CHECK(slurp(whole) == slurp(inc));
}

TEST_CASE("streaming reads return the same planes as a full load") {
    PsfKey key = tiny_key();
    TempDir tmp;
    std::string path = tmp.file("k.lfk");
    save_psf_key(key, path);

    PsfKeyReader rd(path);
    CHECK(rd.checksum() == key.checksum);
    CHECK(rd.z_planes() == key.z_planes);
    CHECK(rd.offsets() == key.offsets);
    CHECK(rd.window() == key.window);
    size_t per = size_t(key.offsets) * key.offsets;
    for (size_t zi = 0; zi < key.z_planes.size(); ++zi) {
        PsfKey plane = rd.read_plane();
        REQUIRE(plane.count() == per);
        CHECK(plane.z_planes == std::vector<double>{key.z_planes[zi]});
        for (size_t q = 0; q < per; ++q)
            CHECK(same_psf(plane.psfs[q], key.psfs[zi * per + q]));
    }
    CHECK_THROWS_AS(rd.read_plane(), UsageError);
}

TEST_CASE("key loading rejects corrupted or truncated files") {
    PsfKey key = tiny_key();
    TempDir tmp;
    std::string path = tmp.file("k.lfk");
    save_psf_key(key, path);
    std::string bytes = slurp(path);

    std::string flipped = bytes;
    flipped[flipped.size() - 9] ^= 0x40;  // inside the last PSF block
    std::string bad = tmp.file("bad.lfk");
    {
        std::ofstream out(bad, std::ios::binary);
        out.write(flipped.data(), std::streamsize(flipped.size()));
    }
    CHECK_THROWS_AS(load_psf_key(bad), IoError);

    std::string cut = tmp.file("cut.lfk");
    {
        std::ofstream out(cut, std::ios::binary);
        out.write(bytes.data(), std::streamsize(bytes.size() - 10));
    }
    CHECK_THROWS_AS(load_psf_key(cut), IoError);

    CHECK_THROWS_AS(load_psf_key(tmp.file("absent.lfk")), IoError);
}

TEST_CASE("key perturbation scales entries within the stated fraction") {
    PsfKey key = tiny_key();
    double f = 0.05;
    PsfKey pert = perturb_key(key, f, 9);
    CHECK(pert.checksum != key.checksum);

    double mean = 0, worst = 0;
    size_t n = 0;
    for (size_t pi = 0; pi < key.count(); ++pi) {
        REQUIRE(pert.psfs[pi].a.size() == key.psfs[pi].a.size());
        for (size_t e = 0; e < key.psfs[pi].a.size(); ++e) {
            double o = key.psfs[pi].a[e];
            double p = pert.psfs[pi].a[e];
            if (o == 0.0) {
                CHECK(p == 0.0);
                continue;
            }
            double r = p / o;
            mean += r;
            worst = std::max(worst, std::abs(r - 1.0));
            ++n;
        }
    }
    mean /= double(n);
    CHECK(worst <= f + 1e-15);
    CHECK(worst > 0.9 * f);  // the draw actually reaches the band edges
    CHECK(mean == doctest::Approx(1.0).epsilon(0.005));

    PsfKey same = perturb_key(key, 0.0, 9);
    CHECK(same.checksum == key.checksum);
    for (size_t i = 0; i < key.count(); ++i) CHECK(same_psf(same.psfs[i], key.psfs[i]));

    PsfKey again = perturb_key(key, f, 9);
    CHECK(again.checksum == pert.checksum);
    PsfKey other = perturb_key(key, f, 10);
    CHECK(other.checksum != pert.checksum);

    CHECK_THROWS_AS(perturb_key(key, -0.1, 1), UsageError);
}
