#include "segregation/stability.hpp"

#include "segregation/errors.hpp"
#include "segregation/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace segregation {

namespace {

constexpr double kPi = std::numbers::pi;

double laplace_symbol(double xi) { return -4.0 * kPi * kPi * xi * xi; }

double sense_symbol(double xi, const ModelParams& p, int dim) {
    return fourier_symbol(make_kernel(dim, p.epsilon, KernelVariant::Sense), xi);
}

// K1^(xi) - M_K1 <= 0, zero only at xi = 0.
double jump_deficit(double xi, const ModelParams& p, int dim) {
    const auto k = make_kernel(dim, p.epsilon, KernelVariant::Jump);
    return fourier_symbol(k, xi) - k.total_mass();
}

} // namespace

void ConstantState::validate() const {
    if (!(r0 > 0.0) || !(b0 >= 0.0) || !(r0 + b0 < 1.0)) {
        throw ConfigError("constant state needs 0 < r0, 0 <= b0 and r0 + b0 < 1");
    }
}

const char* to_string(ModelKind m) { return m == ModelKind::LocalPDE ? "local_pde" : "nonlocal_integro"; }

double growth_rate_single_pde(double xi, double r0, const ModelParams& p, int dim) {
    const double a = p.C_rr * (1.0 - r0) * r0;
    return laplace_symbol(xi) * diffusivity(r0, 0.0, Species::R, p) * (1.0 - a * sense_symbol(xi, p, dim));
}

double growth_rate_single_integro(double xi, double r0, const ModelParams& p, int dim) {
    const double a = p.C_rr * (1.0 - r0) * r0;
    return jump_deficit(xi, p, dim) * diffusivity(r0, 0.0, Species::R, p) * (1.0 - a);
}

double dominant_mode(double r0, const ModelParams& p, int dim) {
    const double a = p.C_rr * (1.0 - r0) * r0;
    if (a < 1.0) throw NoInstability("C_rr (1 - r0) r0 < 1: every mode is stable");
    if (a == 1.0) return 0.0;
    const double closed = std::sqrt(std::sqrt(a) - 1.0) / (2.0 * kPi * p.epsilon);
    if (dim == 1) return closed;

    // 2D symbol has exponent 3/2; the growth rate is unimodal on (0, xi0)
    // where xi0 is the root of A K^ = 1. Golden-section search there.
    const auto k = make_kernel(dim, p.epsilon, KernelVariant::Sense);
    double hi = closed;
    while (a * fourier_symbol(k, hi) > 1.0) hi *= 2.0;
    double lo = 0.0;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double x) { return growth_rate_single_pde(x, r0, p, dim); };
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

Matrix2 matrix_two_species_pde(double xi, const ConstantState& s, const ModelParams& p, int dim) {
    const double k = sense_symbol(xi, p, dim);
    const double lap = laplace_symbol(xi);
    const double vac = 1.0 - s.rho0();
    const double dr = diffusivity(s.r0, s.b0, Species::R, p);
    const double db = diffusivity(s.r0, s.b0, Species::B, p);
    Matrix2 m;
    m[0][0] = lap * dr * ((1.0 - s.b0) - p.C_rr * vac * s.r0 * k);
    m[0][1] = lap * dr * (s.r0 + p.C_rb * vac * s.r0 * k);
    m[1][0] = lap * db * (s.b0 + p.C_br * vac * s.b0 * k);
    m[1][1] = lap * db * ((1.0 - s.r0) - p.C_bb * vac * s.b0 * k);
    return m;
}

Matrix2 matrix_two_species_integro(double xi, const ConstantState& s, const ModelParams& p, int dim) {
    const double w = jump_deficit(xi, p, dim);
    const double vac = 1.0 - s.rho0();
    const double dr = diffusivity(s.r0, s.b0, Species::R, p);
    const double db = diffusivity(s.r0, s.b0, Species::B, p);
    Matrix2 m;
    m[0][0] = dr * w * ((1.0 - s.b0) - p.C_rr * vac * s.r0);
    m[0][1] = dr * w * (s.r0 + p.C_rb * vac * s.r0);
    m[1][0] = db * w * (s.b0 + p.C_br * vac * s.b0);
    m[1][1] = db * w * ((1.0 - s.r0) - p.C_bb * vac * s.b0);
    return m;
}

std::array<std::complex<double>, 2> eigenvalues(const Matrix2& m) {
    using C = std::complex<double>;
    const double half_tr = 0.5 * (m[0][0] + m[1][1]);
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // Discriminant as ((a - d)/2)^2 + bc avoids cancelling tr^2/4 against det.
    const double hd = 0.5 * (m[0][0] - m[1][1]);
    const double disc = hd * hd + m[0][1] * m[1][0];
    C l1, l2;
    if (disc >= 0.0) {
        const double q = half_tr + std::copysign(std::sqrt(disc), half_tr);
        l1 = q;
        l2 = q != 0.0 ? C(det / q) : C(half_tr - std::copysign(std::sqrt(disc), half_tr));
    } else {
        const double im = std::sqrt(-disc);
        l1 = C(half_tr, im);
        l2 = C(half_tr, -im);
    }
    if (l2.real() > l1.real()) std::swap(l1, l2);
    return {l1, l2};
}

double ModeReport::max_real() const {
    return lambda2 ? std::max(lambda1.real(), lambda2->real()) : lambda1.real();
}

namespace {

ModeReport evaluate(double xi, const ConstantState& s, const ModelParams& p, ModelKind model, int dim) {
    ModeReport r;
    r.xi = xi;
    if (s.b0 == 0.0) {
        r.lambda1 = model == ModelKind::LocalPDE ? growth_rate_single_pde(xi, s.r0, p, dim)
                                                 : growth_rate_single_integro(xi, s.r0, p, dim);
        return r;
    }
    const Matrix2 m = model == ModelKind::LocalPDE ? matrix_two_species_pde(xi, s, p, dim)
                                                   : matrix_two_species_integro(xi, s, p, dim);
    const auto ev = eigenvalues(m);
    r.lambda1 = ev[0];
    r.lambda2 = ev[1];
    return r;
}

} // namespace

double max_growth(double xi, const ConstantState& s, const ModelParams& p, ModelKind model, int dim) {
    return evaluate(xi, s, p, model, dim).max_real();
}

StabilityReport classify(const ModelParams& p, const ConstantState& s, ModelKind model, double xi_max, int n_xi,
                         int dim) {
    if (!(xi_max > 0.0)) throw ConfigError("xi_max must be positive");
    if (n_xi < 2) throw ConfigError("n_xi must be at least 2");
    if (dim != 1 && dim != 2) throw ConfigError("dimension must be 1 or 2");
    s.validate();

    StabilityReport rep;
    rep.model = model;
    rep.dimension = dim;
    rep.single_species = s.b0 == 0.0;
    rep.xi_max = xi_max;

    auto f = [&](double xi) { return max_growth(xi, s, p, model, dim); };
    for (int i = 1; i <= n_xi; ++i) {
        rep.modes.push_back(evaluate(xi_max * i / n_xi, s, p, model, dim));
    }

    // Sign changes from unstable to stable, refined by bisection.
    for (std::size_t i = 0; i + 1 < rep.modes.size(); ++i) {
        const double fa = rep.modes[i].max_real();
        const double fb = rep.modes[i + 1].max_real();
        if (fa > 0.0 && fb <= 0.0) {
            double lo = rep.modes[i].xi, hi = rep.modes[i + 1].xi;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                (f(mid) > 0.0 ? lo : hi) = mid;
            }
            rep.threshold_xi = 0.5 * (lo + hi);
        }
    }

    const auto best = std::max_element(rep.modes.begin(), rep.modes.end(),
                                       [](const ModeReport& a, const ModeReport& b) { return a.max_real() < b.max_real(); });
    rep.unstable = best->max_real() > 0.0;
    if (rep.unstable) {
        if (model == ModelKind::LocalPDE && rep.single_species) {
            const double xu = dominant_mode(s.r0, p, dim);
            rep.dominant_mode = xu;
        } else {
            rep.dominant_mode = best->xi;
        }
    }

    // Admissible torus modes.
    const int m_max = int(std::floor(xi_max));
    double best_rate = 0.0;
    for (int m1 = 0; m1 <= m_max; ++m1) {
        for (int m2 = 0; m2 <= (dim == 1 ? 0 : m_max); ++m2) {
            if (m1 == 0 && m2 == 0) continue;
            if (dim == 2 && m2 > m1) continue;  // radial: (m1, m2) and (m2, m1) coincide
            const double xi = std::hypot(double(m1), double(m2));
            if (xi > xi_max) continue;
            const double rate = f(xi);
            if (rate > 0.0) rep.unstable_admissible_modes.push_back(xi);
            if (rate > best_rate) {
                best_rate = rate;
                rep.dominant_admissible_mode = xi;
            }
        }
    }
    std::sort(rep.unstable_admissible_modes.begin(), rep.unstable_admissible_modes.end());
    rep.unstable_admissible_modes.erase(
        std::unique(rep.unstable_admissible_modes.begin(), rep.unstable_admissible_modes.end()),
        rep.unstable_admissible_modes.end());
    return rep;
}

void write_dispersion_csv(std::ostream& os, const StabilityReport& r) {
    os << "xi,re_lambda1,im_lambda1,re_lambda2,im_lambda2\n";
    char buf[160];
    for (const auto& m : r.modes) {
        if (m.lambda2) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", m.xi, m.lambda1.real(),
                          m.lambda1.imag(), m.lambda2->real(), m.lambda2->imag());
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,,\n", m.xi, m.lambda1.real(), m.lambda1.imag());
        }
        os << buf;
    }
}

std::string summary_json(const StabilityReport& r) {
    nlohmann::ordered_json j;
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
    j["model"] = to_string(r.model);
    j["dimension"] = r.dimension;
    j["single_species"] = r.single_species;
    j["xi_max"] = r.xi_max;
    j["unstable"] = r.unstable;
    j["threshold"] = opt(r.threshold_xi);
    j["dominant_mode"] = opt(r.dominant_mode);
    j["dominant_admissible_mode"] = opt(r.dominant_admissible_mode);
    j["unstable_admissible_modes"] = r.unstable_admissible_modes;
    double peak = -INFINITY;
    for (const auto& m : r.modes) peak = std::max(peak, m.max_real());
    j["max_growth_rate"] = peak;
    return j.dump(2);
}

} // namespace segregation
