#include "segregation/model.hpp"

#include "segregation/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace segregation {

ModelParams ModelParams::swapped() const {
    ModelParams p = *this;
    std::swap(p.C_r, p.C_b);
    std::swap(p.C_rr, p.C_bb);
    std::swap(p.C_rb, p.C_br);
    return p;
}

void ModelParams::validate() const {
    if (!(C_r > 0.0) || !(C_b > 0.0)) throw ConfigError("C_r and C_b must be positive");
    if (C_rr < 0.0 || C_rb < 0.0 || C_br < 0.0 || C_bb < 0.0) {
        throw ConfigError("preference strengths C_rr, C_rb, C_br, C_bb must be non-negative");
    }
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
}

double diffusivity(double p, double q, Species s, const ModelParams& params) {
    // Written as (other - own) so that swapping species reproduces the same
    // floating-point operations.
    if (s == Species::R) return params.C_r * std::exp(params.C_rb * q - params.C_rr * p);
    return params.C_b * std::exp(params.C_br * p - params.C_bb * q);
}

SpeciesState SpeciesState::single(DensityField r) {
    DensityField b(r.grid(), 0.0);
    return {std::move(r), std::move(b)};
}

DensityField SpeciesState::rho() const {
    DensityField out(r.grid());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = r[i] + b[i];
    return out;
}

bool SpeciesState::has_blue() const {
    return std::any_of(b.values().begin(), b.values().end(), [](double v) { return v != 0.0; });
}

double box_violation(const SpeciesState& s) {
    double worst = 0.0;
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        worst = std::max({worst, -s.r[i], -s.b[i], s.r[i] + s.b[i] - 1.0});
    }
    return worst;
}

void check_admissible(const SpeciesState& s, double tol, const std::string& context) {
    if (!(s.r.grid() == s.b.grid())) throw ConfigError(context + ": r and b live on different grids");
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        const double r = s.r[i];
        const double b = s.b[i];
        if (!std::isfinite(r) || !std::isfinite(b)) {
            std::ostringstream os;
            os << context << ": non-finite density at cell " << i;
            throw NonFinite(os.str());
        }
        if (r < -tol || b < -tol || r + b > 1.0 + tol) {
            std::ostringstream os;
            os.precision(17);
            os << context << ": state left the admissible box at cell " << i << " (r=" << r << ", b=" << b
               << ")";
            throw BoxViolation(os.str());
        }
    }
}

} // namespace segregation
