#include "segregation/dynamics_nonlocal.hpp"

#include "segregation/errors.hpp"
#include "time_loop.hpp"

#include <algorithm>
#include <cmath>

namespace segregation {

namespace {

double xlogx(double x) { return x <= 0.0 ? 0.0 : x * std::log(x); }

} // namespace

NonlocalModel::NonlocalModel(const Grid& grid, const ModelParams& params)
    : grid_(grid), params_(params),
      jump_(convolver_for(make_kernel(grid.dimension(), params.epsilon, KernelVariant::Jump), grid)) {
    params_.validate();
}

Rates NonlocalModel::rhs(const SpeciesState& s) const {
    if (!(s.grid() == grid_)) throw ConfigError("state grid does not match the model grid");
    const std::size_t n = grid_.size();
    const bool blue = s.has_blue();
    DensityField vac(grid_), flux_r(grid_), flux_b(grid_, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        vac[i] = 1.0 - s.r[i] - s.b[i];
        flux_r[i] = diffusivity(s.r[i], s.b[i], Species::R, params_) * s.r[i];
        if (blue) flux_b[i] = diffusivity(s.r[i], s.b[i], Species::B, params_) * s.b[i];
    }
    const DensityField k_vac = jump_->apply(vac);
    const DensityField k_r = jump_->apply(flux_r);
    const DensityField k_b = blue ? jump_->apply(flux_b) : DensityField(grid_, 0.0);

    Rates out{DensityField(grid_), DensityField(grid_)};
    for (std::size_t i = 0; i < n; ++i) {
        out.dr[i] = vac[i] * k_r[i] - flux_r[i] * k_vac[i];
        out.db[i] = vac[i] * k_b[i] - flux_b[i] * k_vac[i];
        if (!std::isfinite(out.dr[i]) || !std::isfinite(out.db[i])) {
            throw NonFinite("rhs_nonlocal: non-finite right-hand side at cell " + std::to_string(i));
        }
    }
    return out;
}

SpeciesState NonlocalModel::step(const SpeciesState& s, double dt) const {
    if (dt <= 0.0) dt = params_.dt;
    const Rates k = rhs(s);
    SpeciesState out = s;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        out.r[i] += dt * k.dr[i];
        out.b[i] += dt * k.db[i];
    }
    check_admissible(out, kBoxTolerance, "step_nonlocal");
    return out;
}

double NonlocalModel::max_stable_dt(const SpeciesState& s) const {
    double d_max = 0.0;
    const bool blue = s.has_blue();
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        d_max = std::max(d_max, diffusivity(s.r[i], s.b[i], Species::R, params_));
        if (blue) d_max = std::max(d_max, diffusivity(s.r[i], s.b[i], Species::B, params_));
    }
    const double m_k = make_kernel(grid_.dimension(), params_.epsilon, KernelVariant::Jump).total_mass();
    return 0.5 / (m_k * d_max);
}

double NonlocalModel::entropy(const SpeciesState& s) const {
    const auto& q = params_;
    double acc = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double r = s.r[i];
        const double b = s.b[i];
        acc += xlogx(r) + xlogx(b) + xlogx(1.0 - r - b) + r * (q.C_rb * b - q.C_rr * r) +
               b * (q.C_br * r - q.C_bb * b);
    }
    return acc * grid_.cell_volume();
}

Rates rhs_nonlocal(const SpeciesState& s, const ModelParams& params) { return NonlocalModel(s.grid(), params).rhs(s); }

SpeciesState step_nonlocal(const SpeciesState& s, const ModelParams& params) {
    return NonlocalModel(s.grid(), params).step(s);
}

Trajectory run_nonlocal(const SpeciesState& state0, const ModelParams& params, double t_end, int stride,
                        const Observer& observer) {
    const NonlocalModel model(state0.grid(), params);
    return detail::run_explicit(
        model, state0, t_end, stride, observer, [&](const SpeciesState& s) { return model.entropy(s); });
}

} // namespace segregation
