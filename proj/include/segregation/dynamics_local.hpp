#pragma once

// Local jumps with nonlocal sensing: forward-Euler integration of
//   d_t c = div( D_c [ (1-rho) grad c + c grad rho + c (1-rho) grad V_c ] ),
// V_r = C_rb K*b - C_rr K*r,  V_b = C_br K*r - C_bb K*b,  D_c = C_c exp(V_c),
// discretized with face fluxes so mass is conserved by construction.

#include "segregation/kernels.hpp"
#include "segregation/model.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace segregation {

struct EntropyRecord {
    double t = 0.0;
    double E = 0.0;
    double mass_r = 0.0;
    double mass_b = 0.0;
};

void write_entropy_csv(std::ostream& os, const std::vector<EntropyRecord>& records);

struct Rates {
    DensityField dr;
    DensityField db;
};

class LocalModel {
public:
    LocalModel(const Grid& grid, const ModelParams& params);

    const ModelParams& params() const noexcept { return params_; }
    const Grid& grid() const noexcept { return grid_; }

    Rates time_derivative(const SpeciesState& s) const;
    // Forward Euler with step dt (params().dt when dt <= 0); checks the box.
    SpeciesState step(const SpeciesState& s, double dt = 0.0) const;
    double entropy(const SpeciesState& s) const;
    // 0.4 h^2 / (N max D) over the species present in s.
    double max_stable_dt(const SpeciesState& s) const;

private:
    struct Potentials {
        DensityField v_r, v_b, d_r, d_b;
    };
    Potentials potentials(const SpeciesState& s) const;

    Grid grid_;
    ModelParams params_;
    std::shared_ptr<const Convolver> sense_;
};

SpeciesState step_local(const SpeciesState& s, const ModelParams& params);
double entropy(const SpeciesState& s, const ModelParams& params);

using Observer = std::function<void(long step, double t, const SpeciesState&)>;

struct Trajectory {
    std::vector<EntropyRecord> records;
    SpeciesState final_state;
    double t_final = 0.0;
    long steps = 0;
};

// Steps until t_end (the last step is shortened to land on t_end exactly).
// A record is taken, and the observer called, at t=0, every `stride` steps
// and at the final time. Throws TimeStepTooLarge before the first step if
// dt exceeds max_stable_dt; step errors are rethrown with the failing time.
Trajectory run_local(const SpeciesState& state0, const ModelParams& params, double t_end, int stride = 100,
                     const Observer& observer = {});

} // namespace segregation
