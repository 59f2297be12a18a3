#include "segregation/dynamics_local.hpp"

#include "segregation/errors.hpp"
#include "time_loop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace segregation {

namespace {

double xlogx(double x) { return x <= 0.0 ? 0.0 : x * std::log(x); }

} // namespace

void write_entropy_csv(std::ostream& os, const std::vector<EntropyRecord>& records) {
    os << "t,E,mass_r,mass_b\n";
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.t, r.E, r.mass_r, r.mass_b);
        os << buf;
    }
}

LocalModel::LocalModel(const Grid& grid, const ModelParams& params)
    : grid_(grid), params_(params),
      sense_(convolver_for(make_kernel(grid.dimension(), params.epsilon, KernelVariant::Sense), grid)) {
    params_.validate();
}

LocalModel::Potentials LocalModel::potentials(const SpeciesState& s) const {
    const DensityField ur = sense_->apply(s.r);
    const DensityField ub = s.has_blue() ? sense_->apply(s.b) : DensityField(grid_, 0.0);
    Potentials p{DensityField(grid_), DensityField(grid_), DensityField(grid_), DensityField(grid_)};
    const auto& q = params_;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        p.v_r[i] = q.C_rb * ub[i] - q.C_rr * ur[i];
        p.v_b[i] = q.C_br * ur[i] - q.C_bb * ub[i];
        p.d_r[i] = q.C_r * std::exp(p.v_r[i]);
        p.d_b[i] = q.C_b * std::exp(p.v_b[i]);
    }
    return p;
}

Rates LocalModel::time_derivative(const SpeciesState& s) const {
    if (!(s.grid() == grid_)) throw ConfigError("state grid does not match the model grid");
    const Potentials p = potentials(s);
    const DensityField rho = s.rho();
    const double inv_h = 1.0 / grid_.spacing();
    const int n = grid_.points_per_axis();

    FaceFlux jr(grid_), jb(grid_);
    for (int axis = 0; axis < grid_.dimension(); ++axis) {
        auto& fr = jr.components[axis];
        auto& fb = jb.components[axis];
        for (int iy = 0; iy < (grid_.dimension() == 1 ? 1 : n); ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                const std::size_t c = grid_.index(ix, iy);
                const std::size_t e = axis == 0 ? grid_.index(ix + 1, iy) : grid_.index(ix, iy + 1);
                const double rho_f = 0.5 * (rho[c] + rho[e]);
                const double vac = 1.0 - rho_f;
                const double g_rho = (rho[e] - rho[c]) * inv_h;

                const double r_f = 0.5 * (s.r[c] + s.r[e]);
                const double dr_f = 0.5 * (p.d_r[c] + p.d_r[e]);
                fr[c] = dr_f * (vac * (s.r[e] - s.r[c]) * inv_h + r_f * g_rho +
                                r_f * vac * (p.v_r[e] - p.v_r[c]) * inv_h);

                const double b_f = 0.5 * (s.b[c] + s.b[e]);
                const double db_f = 0.5 * (p.d_b[c] + p.d_b[e]);
                fb[c] = db_f * (vac * (s.b[e] - s.b[c]) * inv_h + b_f * g_rho +
                                b_f * vac * (p.v_b[e] - p.v_b[c]) * inv_h);
            }
        }
    }
    return {divergence_of_flux(jr), divergence_of_flux(jb)};
}

SpeciesState LocalModel::step(const SpeciesState& s, double dt) const {
    if (dt <= 0.0) dt = params_.dt;
    const Rates k = time_derivative(s);
    SpeciesState out = s;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        out.r[i] += dt * k.dr[i];
        out.b[i] += dt * k.db[i];
    }
    check_admissible(out, kBoxTolerance, "step_local");
    return out;
}

double LocalModel::entropy(const SpeciesState& s) const {
    const Potentials p = potentials(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double r = s.r[i];
        const double b = s.b[i];
        acc += xlogx(r) + xlogx(b) + xlogx(1.0 - r - b) + r * p.v_r[i] + b * p.v_b[i];
    }
    return acc * grid_.cell_volume();
}

double LocalModel::max_stable_dt(const SpeciesState& s) const {
    const Potentials p = potentials(s);
    double d_max = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) d_max = std::max(d_max, p.d_r[i]);
    if (s.has_blue())
        for (std::size_t i = 0; i < grid_.size(); ++i) d_max = std::max(d_max, p.d_b[i]);
    const double h = grid_.spacing();
    return 0.4 * h * h / (grid_.dimension() * d_max);
}

SpeciesState step_local(const SpeciesState& s, const ModelParams& params) {
    return LocalModel(s.grid(), params).step(s);
}

double entropy(const SpeciesState& s, const ModelParams& params) { return LocalModel(s.grid(), params).entropy(s); }

Trajectory run_local(const SpeciesState& state0, const ModelParams& params, double t_end, int stride,
                     const Observer& observer) {
    const LocalModel model(state0.grid(), params);
    return detail::run_explicit(
        model, state0, t_end, stride, observer, [&](const SpeciesState& s) { return model.entropy(s); });
}

} // namespace segregation
