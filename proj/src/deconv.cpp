#include "lfc/deconv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lfc/errors.hpp"

namespace lfc {

namespace {

void check_settings(const DeconvSettings& st) {
    if (st.iterations < 1) throw UsageError("iteration count must be at least 1");
    if (!(st.floor_epsilon > 0.0 && st.floor_epsilon < 1.0))
        throw UsageError("floor epsilon must lie in (0, 1)");
    if (!(st.threshold_fraction >= 0.0 && st.threshold_fraction < 1.0))
        throw UsageError("threshold fraction must lie in [0, 1)");
}

// undo recorded quantization so the solver sees intensities
void restore_intensity(LightFieldImage& img) {
    auto it = img.meta.find("quant_bits");
    if (it == img.meta.end()) return;
    int bits = std::stoi(it->second);
    double peak = std::stod(img.meta.at("quant_peak"));
    double s = bits > 0 && peak > 0 ? peak / double((1u << bits) - 1) : 0.0;
    for (double& v : img.v) v *= s;
}

}  // namespace

DeconvResult decrypt(const LightFieldImage& img0, const PsfKey& key, const VolumeGrid& grid,
                     const DeconvSettings& settings,
                     const std::function<void(const IterationRecord&)>& on_iteration) {
    check_settings(settings);
    if (img0.ny != img0.nx) throw UsageError("sensor image must be square");

    LightFieldImage img = img0;
    if (!settings.use_mask) img.mask.clear();
    restore_intensity(img);

    double omax = 0.0;
    for (size_t i = 0; i < img.v.size(); ++i) {
        double v = img.v[i];
        if (!std::isfinite(v)) throw NumericalError("image has non-finite pixel values");
        if (v < 0.0) throw UsageError("image has negative pixel values");
        if ((img.mask.empty() || img.mask[i]) && v > omax) omax = v;
    }

    DeconvResult res;
    res.volume.grid = grid;
    res.volume.z = key.z_planes;
    res.volume.v.assign(size_t(key.z_planes.size()) * grid.ny * grid.nx, 0.0);
    if (omax == 0.0) {
        res.status = DeconvStatus::zero_image;
        return res;
    }

    const Volume hto = apply_adjoint(img, key, grid);
    Volume g = res.volume;
    if (settings.init == DeconvSettings::Init::adjoint)
        g.v = hto.v;
    else
        std::fill(g.v.begin(), g.v.end(), 1.0);

    const bool masked = !img.mask.empty();
    res.iterations.reserve(settings.iterations);
    for (int it = 1; it <= settings.iterations; ++it) {
        LightFieldImage hg = apply_forward(g, key, img.nx);
        IterationRecord rec;
        rec.index = it;
        double rss = 0.0;
        for (size_t i = 0; i < img.v.size(); ++i) {
            if (masked && !img.mask[i]) continue;
            double d = img.v[i] - hg.v[i];
            rss += d * d;
        }
        rec.residual = rss;

        if (masked) hg.mask = img.mask;
        Volume denom = apply_adjoint(hg, key, grid);
        double dmax = *std::max_element(denom.v.begin(), denom.v.end());
        if (!(dmax > 0.0))
            throw NumericalError("projection of the iterate carries no sensor energy");
        double floor = settings.floor_epsilon * dmax;

        double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
        for (size_t i = 0; i < g.v.size(); ++i) {
            g.v[i] *= hto.v[i] / std::max(denom.v[i], floor);
            gmin = std::min(gmin, g.v[i]);
            gmax = std::max(gmax, g.v[i]);
        }
        if (!std::isfinite(gmax)) throw NumericalError("iterate diverged to non-finite values");
        rec.gmin = gmin;
        rec.gmax = gmax;
        res.iterations.push_back(rec);
        if (on_iteration) on_iteration(rec);
    }

    if (settings.threshold_fraction > 0.0 && !g.v.empty()) {
        double peak = *std::max_element(g.v.begin(), g.v.end());
        double cut = settings.threshold_fraction * peak;
        for (double& v : g.v)
            if (v < cut) v = 0.0;
    }
    res.volume = std::move(g);
    return res;
}

}  // namespace lfc
