#pragma once

// Nonlocal jumps with local sensing:
//   d_t r = (1-rho) K1*(D_r r) - D_r r K1*(1-rho)
//   d_t b = (1-rho) K1*(D_b b) - D_b b K1*(1-rho)
// with D_r = D_r(r, b), D_b = D_b(r, b) evaluated pointwise.

#include "segregation/dynamics_local.hpp"

namespace segregation {

class NonlocalModel {
public:
    NonlocalModel(const Grid& grid, const ModelParams& params);

    const ModelParams& params() const noexcept { return params_; }
    const Grid& grid() const noexcept { return grid_; }

    Rates rhs(const SpeciesState& s) const;
    SpeciesState step(const SpeciesState& s, double dt = 0.0) const;
    // 0.5 / (M_K1 max D).
    double max_stable_dt(const SpeciesState& s) const;
    // Entropy functional with the sensing kernel replaced by the identity
    // (local sensing); logged as a diagnostic only.
    double entropy(const SpeciesState& s) const;

private:
    Grid grid_;
    ModelParams params_;
    std::shared_ptr<const Convolver> jump_;
};

Rates rhs_nonlocal(const SpeciesState& s, const ModelParams& params);
SpeciesState step_nonlocal(const SpeciesState& s, const ModelParams& params);
Trajectory run_nonlocal(const SpeciesState& state0, const ModelParams& params, double t_end, int stride = 100,
                        const Observer& observer = {});

} // namespace segregation
