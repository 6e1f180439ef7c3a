#include "lfc/debye.hpp"

#include <cmath>

#include "lfc/errors.hpp"

namespace lfc {

namespace {

// J0 by the Abramowitz-Stegun rational fits (|x| < 8) and the asymptotic
// form beyond; absolute error below ~1e-7, far cheaper than the library
// Bessel and accurate enough for an intensity model.
double bessel_j0(double x) {
    double ax = std::fabs(x);
    if (ax < 8.0) {
        double y = x * x;
        double num = 57568490574.0 + y * (-13362590354.0 + y * (651619640.7 +
                     y * (-11214424.18 + y * (77392.33017 + y * (-184.9052456)))));
        double den = 57568490411.0 + y * (1029532985.0 + y * (9494680.718 +
                     y * (59272.64853 + y * (267.8532712 + y))));
        return num / den;
    }
    double z = 8.0 / ax;
    double y = z * z;
    double xx = ax - 0.785398164;
    double p = 1.0 + y * (-0.1098628627e-2 + y * (0.2734510407e-4 +
               y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
    double q = -0.1562499995e-1 + y * (0.1430488765e-3 + y * (-0.6911147651e-5 +
               y * (0.7621095161e-6 + y * (-0.934935152e-7))));
    return std::sqrt(0.636619772 / ax) * (std::cos(xx) * p - z * std::sin(xx) * q);
}

struct Quadrature {
    std::vector<cplx> coef;  // Simpson weight * apodization * defocus phase
    std::vector<double> freq;  // k * sin(theta_j)
    cplx prefactor;
};

Quadrature make_quadrature(const OpticalConfig& cfg, double depth) {
    if (cfg.theta_steps < 2 || cfg.theta_steps % 2 != 0)
        throw ConfigError("theta_steps must be even and >= 2");
    double alpha = cfg.alpha();
    double k = cfg.wavenumber();
    int n = cfg.theta_steps;
    double h = alpha / n;
    Quadrature q;
    q.coef.resize(n + 1);
    q.freq.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        double theta = j * h;
        double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);  // Simpson
        double st = std::sin(theta);
        double sh = std::sin(0.5 * theta);
        double apod = std::sqrt(std::cos(theta)) * st;
        double defocus = 2.0 * k * depth * sh * sh;
        q.coef[j] = std::polar(w * (h / 3.0) * apod, defocus);
        q.freq[j] = k * st;
    }
    q.prefactor = std::polar(1.0, -k * depth);
    return q;
}

cplx integrate(const Quadrature& q, double rho) {
    cplx acc(0.0, 0.0);
    size_t n = q.coef.size();
    for (size_t j = 0; j < n; ++j) acc += q.coef[j] * bessel_j0(q.freq[j] * rho);
    return q.prefactor * acc;
}

double radial_step(const OpticalConfig& cfg) {
    // fine enough that cubic interpolation error sits well below the
    // quadrature/Bessel accuracy: ~16 nodes per lateral oscillation
    double d1 = cfg.wavelength / (32.0 * cfg.na);
    double d2 = cfg.mask_pixel / (16.0 * cfg.magnification);
    return std::min(d1, d2);
}

}  // namespace

DebyeProfile::DebyeProfile(const OpticalConfig& cfg, double depth, double rho_max)
    : depth_(depth) {
    drho_ = radial_step(cfg);
    if (rho_max < 0) rho_max = 0;
    n_nodes_valid_ = static_cast<int>(std::ceil(rho_max / drho_)) + 2;
    Quadrature q = make_quadrature(cfg, depth);
    nodes_.resize(size_t(n_nodes_valid_) + 2);  // guard nodes for the cubic stencil
    for (size_t i = 0; i < nodes_.size(); ++i) nodes_[i] = integrate(q, double(i) * drho_);
}

cplx DebyeProfile::sample(double rho) const {
    double t = rho / drho_;
    int i = static_cast<int>(t);
    if (i >= n_nodes_valid_) throw NumericalError("radial profile sampled past its extent");
    double f = t - i;
    // Catmull-Rom through the quadrature nodes; even extension at the origin
    cplx p0 = (i == 0) ? nodes_[1] : nodes_[i - 1];
    cplx p1 = nodes_[i];
    cplx p2 = nodes_[i + 1];
    cplx p3 = nodes_[i + 2];
    cplx a0 = 2.0 * p1;
    cplx a1 = p2 - p0;
    cplx a2 = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
    cplx a3 = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
    return 0.5 * (a0 + f * (a1 + f * (a2 + f * a3)));
}

cplx debye_point(const OpticalConfig& cfg, double rho, double pz) {
    Quadrature q = make_quadrature(cfg, pz);
    return integrate(q, rho);
}

ComplexField debye_field(const OpticalConfig& cfg, const DebyeProfile& profile, double px,
                         double py) {
    ComplexField f(cfg.psf_samples, cfg.mask_pixel);
    double inv_m = 1.0 / cfg.magnification;
    int n = f.n;
    for (int r = 0; r < n; ++r) {
        double dy = f.coord(r) * inv_m - py;
        for (int c = 0; c < n; ++c) {
            double dxo = f.coord(c) * inv_m - px;
            f.at(r, c) = profile.sample(std::hypot(dxo, dy));
        }
    }
    return f;
}

ComplexField debye_field(const OpticalConfig& cfg, double px, double py, double pz) {
    double half = (cfg.psf_samples - 1) / 2 * cfg.mask_pixel / cfg.magnification;
    double reach = std::hypot(half + std::fabs(px), half + std::fabs(py));
    DebyeProfile profile(cfg, pz, reach);
    return debye_field(cfg, profile, px, py);
}

}  // namespace lfc
