#pragma once

#include "lfc/field.hpp"

namespace lfc {

// Free-space propagation by the spectral (angular-spectrum) method:
// FFT, multiply by H(fx, fy) = exp(i 2 pi (distance/wavelength) *
// sqrt(1 - (wavelength*fx)^2 - (wavelength*fy)^2)), inverse FFT.
// Frequencies are the DFT grid with step 1/(n*dx); components beyond the
// evanescent cutoff are zeroed. distance may be negative (backward).
// Throws ConfigError when the sampling gate dx >= sqrt(|distance| *
// wavelength / n) fails.
ComplexField propagate(const ComplexField& field, double distance, double wavelength);

// Raw centered-grid DFT pair used by propagate; exposed for tests.
void fft2(std::vector<cplx>& data, int rows, int cols, bool inverse);

}  // namespace lfc
