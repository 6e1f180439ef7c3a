#include "lfc/optics.hpp"

#include <cmath>
#include <sstream>

#include "lfc/errors.hpp"

namespace lfc {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

int exact_ratio(double num, double den, const char* what) {
    double r = num / den;
    long k = std::lround(r);
    if (k < 1 || std::fabs(r - double(k)) > 1e-6 * r) {
        std::ostringstream os;
        os << what << ": " << num << " is not an integer multiple of " << den;
        throw ConfigError(os.str());
    }
    return static_cast<int>(k);
}

}  // namespace

void OpticalConfig::validate() const {
    require(na > 0, "na must be positive");
    require(refractive_index > 0, "refractive_index must be positive");
    require(na < refractive_index, "na must be smaller than the refractive index");
    require(magnification > 0, "magnification must be positive");
    require(wavelength > 0, "wavelength must be positive");
    require(lenslet_pitch > 0, "lenslet_pitch must be positive");
    require(lenslet_focal > 0, "lenslet_focal must be positive");
    require(mask_pixel > 0, "mask_pixel must be positive");
    require(sensor_pixel > 0, "sensor_pixel must be positive");
    require(psf_samples >= 3 && psf_samples % 2 == 1, "psf_samples must be odd and >= 3");
    require(theta_steps >= 2 && theta_steps % 2 == 0, "theta_steps must be even and >= 2");
    require(crop_threshold >= 0 && crop_threshold < 1, "crop_threshold must be in [0,1)");
    exact_ratio(lenslet_pitch, mask_pixel, "lenslet_pitch / mask_pixel");
    exact_ratio(lenslet_pitch, sensor_pixel, "lenslet_pitch / sensor_pixel");
    require(sensor_pixel >= mask_pixel, "sensor_pixel must be >= mask_pixel");
    int b = exact_ratio(sensor_pixel, mask_pixel, "sensor_pixel / mask_pixel");
    require(b % 2 == 1, "sensor_pixel / mask_pixel must be odd so binned windows stay centered");
    if (b > 1) {
        require(psf_samples % b == 0 && (psf_samples / b) % 2 == 1,
                "psf_samples must be an odd multiple of sensor_pixel / mask_pixel");
    }
}

int OpticalConfig::grid_per_lenslet() const {
    return exact_ratio(lenslet_pitch, mask_pixel, "lenslet_pitch / mask_pixel");
}

int OpticalConfig::grid_per_sensor() const {
    return exact_ratio(sensor_pixel, mask_pixel, "sensor_pixel / mask_pixel");
}

int OpticalConfig::sensor_per_lenslet() const {
    return exact_ratio(lenslet_pitch, sensor_pixel, "lenslet_pitch / sensor_pixel");
}

double OpticalConfig::alpha() const { return std::asin(na / refractive_index); }

double OpticalConfig::wavenumber() const {
    return 2.0 * M_PI * refractive_index / wavelength;
}

SamplingCheck validate_sampling(double distance, double sample_interval, int n_samples,
                                double wavelength) {
    if (wavelength <= 0) throw UsageError("wavelength must be positive");
    if (n_samples <= 0) throw UsageError("n_samples must be positive");
    if (sample_interval <= 0) throw UsageError("sample_interval must be positive");
    SamplingCheck out;
    out.threshold = std::sqrt(std::fabs(distance) * wavelength / double(n_samples));
    out.ok = sample_interval >= out.threshold;
    return out;
}

}  // namespace lfc
