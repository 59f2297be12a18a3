#pragma once

// Linear stability of constant states (r0, b0) for both models. Wavenumbers
// xi are in cycles per unit length, so the Laplacian has symbol -4 pi^2 |xi|^2
// and the mode sin(2 pi m x) has xi = m.

#include "segregation/model.hpp"

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace segregation {

struct ConstantState {
    double r0 = 0.3;
    double b0 = 0.0;
    double rho0() const noexcept { return r0 + b0; }
    // Throws ConfigError unless 0 < r0, 0 <= b0, r0 + b0 < 1.
    void validate() const;
};

enum class ModelKind { LocalPDE, NonlocalIntegro };

const char* to_string(ModelKind m);

// -4 pi^2 xi^2 D_r(r0, 0) (1 - C_rr (1 - r0) r0 K2^(xi)).
double growth_rate_single_pde(double xi, double r0, const ModelParams& params, int dimension = 1);

// (K1^(xi) - M_K1) D_r(r0, 0) (1 - C_rr (1 - r0) r0).
double growth_rate_single_integro(double xi, double r0, const ModelParams& params, int dimension = 1);

// Wavenumber maximizing growth_rate_single_pde. Closed form in 1D,
// sqrt(sqrt(A) - 1) / (2 pi eps) with A = C_rr (1 - r0) r0; golden-section
// search in 2D. Returns 0 when A == 1; throws NoInstability when A < 1.
double dominant_mode(double r0, const ModelParams& params, int dimension = 1);

using Matrix2 = std::array<std::array<double, 2>, 2>;

Matrix2 matrix_two_species_pde(double xi, const ConstantState& s, const ModelParams& params, int dimension = 1);
Matrix2 matrix_two_species_integro(double xi, const ConstantState& s, const ModelParams& params,
                                   int dimension = 1);

// Roots of lambda^2 - tr lambda + det, ordered by decreasing real part.
std::array<std::complex<double>, 2> eigenvalues(const Matrix2& m);

struct ModeReport {
    double xi = 0.0;
    std::complex<double> lambda1;
    std::optional<std::complex<double>> lambda2;  // absent for a single species
    double max_real() const;
};

struct StabilityReport {
    ModelKind model = ModelKind::LocalPDE;
    int dimension = 1;
    bool single_species = true;
    double xi_max = 0.0;
    std::vector<ModeReport> modes;
    // Upper edge of the unstable band (sign change of the largest real part).
    std::optional<double> threshold_xi;
    std::optional<double> dominant_mode;
    // Best admissible torus mode: an integer in 1D, |(m1, m2)| in 2D.
    std::optional<double> dominant_admissible_mode;
    std::vector<double> unstable_admissible_modes;
    bool unstable = false;
};

// Tabulates the dispersion relation on n_xi equispaced points of (0, xi_max]
// plus all admissible modes up to xi_max. Single-species analysis is used when b0 == 0.
StabilityReport classify(const ModelParams& params, const ConstantState& s, ModelKind model, double xi_max,
                         int n_xi, int dimension = 1);

// Largest real part of the linearization at wavenumber xi.
double max_growth(double xi, const ConstantState& s, const ModelParams& params, ModelKind model,
                  int dimension = 1);

void write_dispersion_csv(std::ostream& os, const StabilityReport& r);
// {"model", "dimension", "unstable", "threshold_xi", "dominant_mode", ...}; absent values are null.
std::string summary_json(const StabilityReport& r);

} // namespace segregation
