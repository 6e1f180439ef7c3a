#include "lfc/propagate.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "lfc/errors.hpp"
#include "lfc/optics.hpp"

namespace lfc {

namespace {

// One plan per (rows, cols, direction), FFTW_ESTIMATE (no runtime
// measurement, so planning is deterministic) and FFTW_UNALIGNED (execution
// buffers need no particular alignment). Creation is serialized; execution
// through fftw_execute_dft is thread-safe per buffer.
std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan plan_for(int rows, int cols, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_tuple(rows, cols, sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;
    std::vector<cplx> tmp(size_t(rows) * cols);
    fftw_plan p = fftw_plan_dft_2d(rows, cols, reinterpret_cast<fftw_complex*>(tmp.data()),
                                   reinterpret_cast<fftw_complex*>(tmp.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_cache.emplace(key, p);
    return p;
}

}  // namespace

void fft2(std::vector<cplx>& data, int rows, int cols, bool inverse) {
    if (data.size() != size_t(rows) * cols) throw UsageError("fft2: shape mismatch");
    fftw_plan p = plan_for(rows, cols, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
    if (inverse) {
        double s = 1.0 / (double(rows) * double(cols));
        for (auto& v : data) v *= s;
    }
}

ComplexField propagate(const ComplexField& field, double distance, double wavelength) {
    if (field.n < 1) throw UsageError("propagate: empty field");
    SamplingCheck gate = validate_sampling(distance, field.dx, field.n, wavelength);
    if (!gate.ok) {
        std::ostringstream os;
        os << "propagation sampling violated: interval " << field.dx
           << " m is below the admissible minimum " << gate.threshold << " m for distance "
           << distance << " m over " << field.n << " samples";
        throw ConfigError(os.str());
    }

    ComplexField out = field;
    fft2(out.v, out.n, out.n, false);

    int n = out.n;
    double df = 1.0 / (n * out.dx);
    double lam2 = wavelength * wavelength;
    double phase_scale = 2.0 * M_PI * distance / wavelength;
    std::vector<double> lf2(n);  // (wavelength * f_i)^2 on the DFT grid
    for (int i = 0; i < n; ++i) {
        int m = (i <= n / 2) ? i : i - n;
        double f = m * df;
        lf2[i] = lam2 * f * f;
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double s = 1.0 - lf2[r] - lf2[c];
            if (s >= 0.0) {
                out.at(r, c) *= std::polar(1.0, phase_scale * std::sqrt(s));
            } else {
                out.at(r, c) = cplx(0.0, 0.0);  // evanescent
            }
        }
    }

    fft2(out.v, out.n, out.n, true);
    return out;
}

}  // namespace lfc
