#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lfc/correlate.hpp"
#include "lfc/errors.hpp"
#include "lfc/volume.hpp"

using namespace lfc;

TEST_CASE("self-correlation scores one at the origin") {
    std::vector<double> ref = random_values(256, 51, 0.0, 1.0);
    Correlation c = normalized_correlation(ref, ref, 16, 16);
    CHECK(c.c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.dy == 0);
    CHECK(c.dx == 0);
}

TEST_CASE("positive affine changes of the reconstruction do not move the score") {
    std::vector<double> ref = random_values(256, 52, 0.0, 1.0);
    std::vector<double> rec(256);
    for (size_t i = 0; i < 256; ++i) rec[i] = 2.5 * ref[i] + 7.0;
    Correlation c = normalized_correlation(ref, rec, 16, 16);
    CHECK(c.c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.dy == 0);
    CHECK(c.dx == 0);
}

TEST_CASE("a translated reconstruction reports the matching offset") {
    // content moved down-right by (2, 1); the reported offset is where the
    // reference content sits relative to the reconstruction: (-2, -1)
    int n = 16;
    std::vector<double> ref = random_values(size_t(n) * n, 53, 0.0, 1.0);
    std::vector<double> rec(size_t(n) * n, 0.0);
    for (int y = 2; y < n; ++y)
        for (int x = 1; x < n; ++x) rec[size_t(y) * n + x] = ref[size_t(y - 2) * n + (x - 1)];
    Correlation c = normalized_correlation(ref, rec, n, n, 4);
    CHECK(c.c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.dy == -2);
    CHECK(c.dx == -1);
}

TEST_CASE("ties between perfect shifts resolve to the origin") {
    int n = 16;
    std::vector<double> ref(size_t(n) * n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) ref[size_t(y) * n + x] = double((x % 4) + (y % 4));
    Correlation c = normalized_correlation(ref, ref, n, n, 6);
    CHECK(c.c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.dy == 0);
    CHECK(c.dx == 0);
}

TEST_CASE("degenerate frames are rejected or score zero") {
    std::vector<double> flat(256, 3.0);
    std::vector<double> ref = random_values(256, 54, 0.0, 1.0);
    CHECK_THROWS_AS(normalized_correlation(flat, ref, 16, 16), UsageError);

    Correlation c = normalized_correlation(ref, flat, 16, 16);
    CHECK(c.c == 0.0);
    CHECK(c.dy == 0);
    CHECK(c.dx == 0);

    CHECK_THROWS_AS(normalized_correlation(ref, ref, 16, 16, -1), UsageError);
    CHECK_THROWS_AS(normalized_correlation(ref, ref, 16, 15), UsageError);
    std::vector<double> shorter(255);
    CHECK_THROWS_AS(normalized_correlation(ref, shorter, 16, 16), UsageError);
}

TEST_CASE("independent noise correlates weakly") {
    int n = 64;
    std::vector<double> ref = random_values(size_t(n) * n, 55, 0.0, 1.0);
    double mean = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> noise = random_values(size_t(n) * n, 600 + trial, 0.0, 1.0);
        Correlation c = normalized_correlation(ref, noise, n, n, 4);
        CHECK(std::abs(c.c) < 0.35);
        mean += c.c;
    }
    mean /= 20.0;
    CHECK(std::abs(mean) < 0.2);
}

TEST_CASE("per-plane correlation scores each depth separately") {
    Volume ref;
    ref.grid = VolumeGrid::centered(12, 12, 0.5e-6);
    ref.z = {-8e-6, -4e-6};
    ref.v = random_values(2 * 144, 56, 0.0, 1.0);
    Volume rec = ref;
    for (size_t i = 144; i < 288; ++i) rec.v[i] = 0.3 * ref.v[i] + 0.1;  // plane 1 affine

    std::vector<Correlation> cs = per_plane_correlation(ref, rec, 3);
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cs[1].c == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> p0(ref.v.begin(), ref.v.begin() + 144);
    Correlation direct = normalized_correlation(p0, p0, 12, 12, 3);
    CHECK(cs[0].c == direct.c);

    Volume small = rec;
    small.grid = VolumeGrid::centered(6, 6, 0.5e-6);
    small.v.resize(2 * 36);
    CHECK_THROWS_AS(per_plane_correlation(ref, small, 3), UsageError);

    Volume flat = ref;
    std::fill(flat.v.begin(), flat.v.begin() + 144, 1.0);
    CHECK_THROWS_AS(per_plane_correlation(flat, rec, 3), UsageError);
}
