#pragma once

#include <complex>
#include <vector>

namespace lfc {

using cplx = std::complex<double>;

// Square complex field sampled on a centered grid: sample (r, c) sits at
// physical position ((c - (n-1)/2) * dx + cx, (r - (n-1)/2) * dx + cy).
// n is odd so the center sample lies exactly at the origin.
struct ComplexField {
    int n = 0;
    double dx = 0.0;
    double cx = 0.0, cy = 0.0;  // physical offset of the window center
    std::vector<cplx> v;

    ComplexField() = default;
    ComplexField(int n_, double dx_) : n(n_), dx(dx_), v(size_t(n_) * n_) {}

    cplx& at(int r, int c) { return v[size_t(r) * n + c]; }
    const cplx& at(int r, int c) const { return v[size_t(r) * n + c]; }
    int center() const { return (n - 1) / 2; }
    double coord(int i) const { return (i - center()) * dx; }  // axis-agnostic, before cx/cy
};

}  // namespace lfc
