#pragma once

// Non-constant single-species steady states in 1D. With D_r = C_r exp(-C_rr K*r)
// the zero-flux condition integrates to r = C~ / (C~ + D_r), and the
// approximation K*r ~ r + eps^2 r'' turns it into eps^2 r'' + g(r) = 0 with
//   g(r) = r - M + (1/C_rr) log(M (1 - r) / (r (1 - M)))
// when the integration constant is pinned by g(M) = 0.

#include "segregation/torus_grid.hpp"

#include <iosfwd>
#include <string>

namespace segregation {

struct PlateauSpec {
    double M = 0.3;
    double C_rr = 10.0;
    double epsilon = 0.01;
    double C_r = 0.5;

    // Throws ConfigError unless C_rr > 4, 0 < M < 1, r- < M < r+, eps > 0, C_r > 0.
    void validate() const;
    // C~ pinned by g(M) = 0: C_r (M / (1 - M)) exp(-C_rr M).
    double pinned_c_tilde() const;
};

double g(double r, const PlateauSpec& spec);
double g_prime(double r, const PlateauSpec& spec);

// r + (1/C_rr) log((1 - r)/r) + shift; g itself is the shift -M + log(M/(1-M))/C_rr.
double g_shifted(double r, double C_rr, double shift);
double pinned_shift(const PlateauSpec& spec);
// C~ corresponding to a shift: C_r exp(C_rr shift).
double c_tilde_from_shift(double shift, const PlateauSpec& spec);

struct CriticalPoints {
    double r_minus;
    double r_plus;
};
// r_pm = 1/2 pm sqrt(1/4 - 1/C_rr), the extrema of g. Requires C_rr > 4.
CriticalPoints critical_points(double C_rr);

struct OuterZeros {
    double r_low;
    double r_high;
};
// The zeros of g outside [r-, r+], by bisection. Throws BracketFailure if
// the expected sign pattern is missing.
OuterZeros outer_zeros(const PlateauSpec& spec);

// eps_k = sqrt(g'(M)) / (2 k pi).
double bifurcation_epsilon(const PlateauSpec& spec, int k);

struct SteadyProfile {
    DensityField r;
    int k = 0;
    double plateau_low = 0.0;   // min r
    double plateau_high = 0.0;  // max r
    double c_tilde = 0.0;       // integration constant realized by the profile
    double shift = 0.0;         // constant term of g_shifted (BVP only)
    double residual = 0.0;      // max norm of the defining equation
    double mass = 0.0;
    int iterations = 0;
};

// Periodic solve of eps^2 r'' + g_s(r) = 0 with a free shift s fixed by
// mass(r) = M. The profile is sought even about x = 0 and x = 1/(2k), which
// removes the translation degeneracy; Newton runs on the half-period and the
// result is tiled by reflection. Requires n divisible by 2k and eps < eps_k.
// Throws NoConvergence with diagnostics.
SteadyProfile solve_plateau_bvp(const PlateauSpec& spec, int k, const Grid& grid);

// Damped iteration r <- (r + C~/(C~ + D_r(K*r)))/2 with C~ re-fitted to the
// mass at every step. Stops when the undamped update moves r by <= tol.
SteadyProfile fixed_point_integral(const PlateauSpec& spec, const DensityField& r_init, double tol = 1e-8,
                                   long max_iter = 100000);

void write_profile_csv(std::ostream& os, const SteadyProfile& p);
std::string profile_metadata_json(const SteadyProfile& p, const PlateauSpec& spec, const std::string& method);

} // namespace segregation
