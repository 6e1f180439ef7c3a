#include "lfc/correlate.hpp"

#include <algorithm>
#include <cmath>

#include "lfc/errors.hpp"

namespace lfc {

namespace {

struct Shift {
    int dy, dx;
};

bool shift_order(const Shift& a, const Shift& b) {
    long ra = long(a.dy) * a.dy + long(a.dx) * a.dx;
    long rb = long(b.dy) * b.dy + long(b.dx) * b.dx;
    if (ra != rb) return ra < rb;
    if (a.dy != b.dy) return a.dy < b.dy;
    return a.dx < b.dx;
}

}  // namespace

Correlation normalized_correlation(const std::vector<double>& ref,
                                   const std::vector<double>& rec, int ny, int nx,
                                   int max_shift) {
    if (ny < 1 || nx < 1) throw UsageError("correlation frame must be nonempty");
    size_t n = size_t(ny) * nx;
    if (ref.size() != n || rec.size() != n)
        throw UsageError("correlation inputs do not match the frame size");
    if (max_shift < 0) throw UsageError("shift radius must be nonnegative");
    if (max_shift == 0) max_shift = std::min(ny, nx) / 4;
    max_shift = std::min(max_shift, std::min(ny, nx) - 1);

    double rmin = ref[0], rmax = ref[0];
    for (double v : ref) {
        rmin = std::min(rmin, v);
        rmax = std::max(rmax, v);
    }
    if (rmin == rmax) throw UsageError("reference frame is constant");

    std::vector<Shift> shifts;
    shifts.reserve(size_t(2 * max_shift + 1) * (2 * max_shift + 1));
    for (int dy = -max_shift; dy <= max_shift; ++dy)
        for (int dx = -max_shift; dx <= max_shift; ++dx) shifts.push_back({dy, dx});
    std::sort(shifts.begin(), shifts.end(), shift_order);

    Correlation best{0.0, 0, 0};
    bool found = false;
    for (const Shift& s : shifts) {
        int y0 = std::max(0, s.dy), y1 = ny + std::min(0, s.dy);
        int x0 = std::max(0, s.dx), x1 = nx + std::min(0, s.dx);
        if (y0 >= y1 || x0 >= x1) continue;
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (int y = y0; y < y1; ++y) {
            const double* a = &ref[size_t(y) * nx];
            const double* b = &rec[size_t(y - s.dy) * nx - s.dx];
            for (int x = x0; x < x1; ++x) {
                double va = a[x], vb = b[x];
                sa += va;
                sb += vb;
                saa += va * va;
                sbb += vb * vb;
                sab += va * vb;
            }
        }
        double cnt = double(y1 - y0) * (x1 - x0);
        double va = saa - sa * sa / cnt;
        double vb = sbb - sb * sb / cnt;
        if (!(va > 0.0) || !(vb > 0.0)) continue;
        double c = (sab - sa * sb / cnt) / std::sqrt(va * vb);
        if (!found || c > best.c) {
            best = {c, s.dy, s.dx};
            found = true;
        }
    }
    if (!found) return {0.0, 0, 0};
    return best;
}

std::vector<Correlation> per_plane_correlation(const Volume& ref, const Volume& rec,
                                               int max_shift) {
    if (ref.grid.nx != rec.grid.nx || ref.grid.ny != rec.grid.ny ||
        ref.nz() != rec.nz())
        throw UsageError("volumes have different shapes");
    std::vector<Correlation> out;
    out.reserve(ref.nz());
    for (int zi = 0; zi < ref.nz(); ++zi) {
        std::vector<double> a(ref.plane(zi), ref.plane(zi) + size_t(ref.grid.ny) * ref.grid.nx);
        std::vector<double> b(rec.plane(zi), rec.plane(zi) + size_t(rec.grid.ny) * rec.grid.nx);
        out.push_back(normalized_correlation(a, b, ref.grid.ny, ref.grid.nx, max_shift));
    }
    return out;
}

}  // namespace lfc
