#pragma once

#include "segregation/torus_grid.hpp"

namespace segregation {

// max |f - mean(f)|.
double perturbation_amplitude(const DensityField& f);

struct Mode {
    int mx = 0;
    int my = 0;
    double magnitude = 0.0;  // |DFT coefficient| / number of cells
};

// Largest-magnitude DFT coefficient excluding the zero mode. mx in [0, n/2],
// my in (-n/2, n/2]; ties go to the first mode in that scan order.
Mode dominant_mode(const DensityField& f);

// |DFT coefficient| / number of cells at one frequency (direct sum).
double mode_magnitude(const DensityField& f, int mx, int my = 0);

// Connected components of {f > (max + min) / 2} with periodic neighbours
// (4-neighbourhood in 2D). A flat field has no bumps.
int bump_count(const DensityField& f);

// Number of sign changes of f - level around the periodic 1D grid.
int sign_changes(const DensityField& f, double level);

} // namespace segregation
