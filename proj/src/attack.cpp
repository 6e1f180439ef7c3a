#include "lfc/attack.hpp"

#include <cstdio>

#include "lfc/correlate.hpp"
#include "lfc/errors.hpp"

namespace lfc {

namespace {

std::string percent_name(const char* prefix, double fraction) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s_%.1f", prefix, fraction * 100.0);
    return buf;
}

// scores rec against the reference, skipping constant reference planes
void score_planes(AttackEntry& e, const Volume& ref, const Volume& rec, int max_shift) {
    int ny = ref.grid.ny, nx = ref.grid.nx;
    for (int zi = 0; zi < ref.nz(); ++zi) {
        const double* p = ref.plane(zi);
        double lo = p[0], hi = p[0];
        for (size_t i = 0; i < size_t(ny) * nx; ++i) {
            lo = std::min(lo, p[i]);
            hi = std::max(hi, p[i]);
        }
        if (lo == hi) continue;
        std::vector<double> a(p, p + size_t(ny) * nx);
        std::vector<double> b(rec.plane(zi), rec.plane(zi) + size_t(ny) * nx);
        Correlation c = normalized_correlation(a, b, ny, nx, max_shift);
        e.plane_index.push_back(zi);
        e.plane_c.push_back(c.c);
        e.plane_dy.push_back(c.dy);
        e.plane_dx.push_back(c.dx);
    }
}

}  // namespace

AttackReport run_attack_suite(const Volume& scene, const PsfKey& key,
                              const AttackSettings& settings) {
    AttackReport rep;
    rep.image = encrypt(scene, key, settings.encrypt);

    {
        AttackEntry e;
        e.name = "baseline";
        e.reconstruction =
            decrypt(rep.image, key, scene.grid, settings.deconv).volume;
        score_planes(e, scene, e.reconstruction, settings.max_shift);
        rep.entries.push_back(std::move(e));
    }
    for (double f : settings.occlusion_fractions) {
        AttackEntry e;
        e.name = percent_name("occlusion", f);
        e.occlusion_fraction = f;
        LightFieldImage img = rep.image;
        occlude(img, f, settings.occlude_mode, settings.occlude_seed);
        e.reconstruction = decrypt(img, key, scene.grid, settings.deconv).volume;
        score_planes(e, scene, e.reconstruction, settings.max_shift);
        rep.entries.push_back(std::move(e));
    }
    for (double f : settings.perturb_fractions) {
        AttackEntry e;
        e.name = percent_name("perturb", f);
        e.perturb_fraction = f;
        PsfKey wrong = perturb_key(key, f, settings.perturb_seed);
        e.reconstruction = decrypt(rep.image, wrong, scene.grid, settings.deconv).volume;
        score_planes(e, scene, e.reconstruction, settings.max_shift);
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace lfc
