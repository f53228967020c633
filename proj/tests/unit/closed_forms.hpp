#pragma once

// Closed-form spectra and densities used as independent oracles.

#include <cmath>
#include <numbers>

#include "gbmlap/core.hpp"

namespace closed {

// Hydrogen (Z = 1) in scaled units: E = -1/(n_r + l + 1)^2.
inline double coulomb_level(int n_r, int ell) {
    const double n = n_r + ell + 1;
    return -1.0 / (n * n);
}

// Oscillator (omega = 1, Hartree) in scaled units: E = 2(2 n_r + l) + 3.
inline double ho_level(int n_r, int ell) { return 2.0 * (2 * n_r + ell) + 3.0; }

// <r^n> for u = 2 r e^{-r}: (n+2)!/2^{n+1}.
inline double hydrogen_moment(int n) { return std::tgamma(n + 3.0) / std::pow(2.0, n + 1); }

// <r^n> for u^2 proportional to r^2 e^{-r^2}: Gamma((n+3)/2) / Gamma(3/2).
inline double ho_moment(int n) { return std::tgamma((n + 3.0) / 2.0) / std::tgamma(1.5); }

template <typename Level>
gbmlap::SpectralDataset dataset(Level level, int ell_max, int nr_max, const char* id) {
    gbmlap::SpectralDataset ds(id, gbmlap::UnitSystem::Scaled);
    for (int l = 0; l <= ell_max; ++l) {
        for (int n = 0; n <= nr_max; ++n) ds.add(n, l, level(n, l));
    }
    return ds;
}

}  // namespace closed
