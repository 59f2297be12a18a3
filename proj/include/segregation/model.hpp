#pragma once

#include "segregation/torus_grid.hpp"

#include <string>

namespace segregation {

// Pointwise tolerance on the admissible box 0 <= r, b; r + b <= 1.
inline constexpr double kBoxTolerance = 1e-10;

// Diffusivities D_r(p, q) = C_r exp(-C_rr p + C_rb q), D_b(p, q) = C_b exp(C_br p - C_bb q).
// For the local-jump model (p, q) are the sensed densities K*r, K*b; for the
// nonlocal-jump model they are r, b themselves.
struct ModelParams {
    double C_r = 1.0;
    double C_b = 1.0;
    double C_rr = 0.0;
    double C_rb = 0.0;
    double C_br = 0.0;
    double C_bb = 0.0;
    double epsilon = 0.05;
    double dt = 1e-4;

    // Exchanges the roles of the two species.
    ModelParams swapped() const;
    // Throws ConfigError on non-positive C_r, C_b, epsilon, dt or negative preferences.
    void validate() const;
};

enum class Species { R, B };

double diffusivity(double p, double q, Species s, const ModelParams& params);

struct SpeciesState {
    DensityField r;
    DensityField b;

    // Single-species state with b = 0.
    static SpeciesState single(DensityField r);
    const Grid& grid() const noexcept { return r.grid(); }
    DensityField rho() const;
    SpeciesState swapped() const { return {b, r}; }
    bool has_blue() const;
};

// Throws NonFinite or BoxViolation if the state is outside the admissible box
// by more than tol. context is prefixed to the message.
void check_admissible(const SpeciesState& s, double tol, const std::string& context);

// Largest pointwise excursion outside the box (0 when admissible).
double box_violation(const SpeciesState& s);

} // namespace segregation
