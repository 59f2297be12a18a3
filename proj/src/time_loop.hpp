#pragma once

// Shared forward-Euler driver for the two dynamics models.

#include "segregation/dynamics_local.hpp"
#include "segregation/errors.hpp"

#include <cmath>
#include <sstream>

namespace segregation::detail {

inline std::string at_time(double t, const char* what) {
    std::ostringstream os;
    os.precision(10);
    os << "t=" << t << ": " << what;
    return os.str();
}

template <class Model, class EntropyFn>
Trajectory run_explicit(const Model& model, const SpeciesState& state0, double t_end, int stride,
                        const Observer& observer, EntropyFn&& energy) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be a finite non-negative time");
    if (stride < 1) throw ConfigError("output stride must be at least 1");
    check_admissible(state0, kBoxTolerance, "initial state");
    const double dt = model.params().dt;
    if (t_end > 0.0) {
        const double limit = model.max_stable_dt(state0);
        if (dt > limit) {
            std::ostringstream os;
            os << "dt=" << dt << " exceeds the explicit stability limit " << limit;
            throw TimeStepTooLarge(os.str());
        }
    }

    Trajectory tr{{}, state0, 0.0, 0};
    auto record = [&](long step, double t) {
        tr.records.push_back({t, energy(tr.final_state), mass(tr.final_state.r), mass(tr.final_state.b)});
        if (observer) observer(step, t, tr.final_state);
    };
    record(0, 0.0);

    const long steps = t_end > 0.0 ? long(std::ceil(t_end / dt - 1e-9)) : 0;
    for (long k = 1; k <= steps; ++k) {
        const double t_prev = double(k - 1) * dt;
        const bool last = k == steps;
        const double h = last ? t_end - t_prev : dt;
        try {
            tr.final_state = model.step(tr.final_state, h);
        } catch (const BoxViolation& e) {
            throw BoxViolation(at_time(t_prev + h, e.what()));
        } catch (const NonFinite& e) {
            throw NonFinite(at_time(t_prev + h, e.what()));
        }
        const double t = last ? t_end : double(k) * dt;
        tr.t_final = t;
        tr.steps = k;
        if (k % stride == 0 || last) record(k, t);
    }
    return tr;
}

} // namespace segregation::detail
