#include "segregation/steady_state.hpp"

#include "segregation/diagnostics.hpp"
#include "segregation/errors.hpp"
#include "segregation/kernels.hpp"

#include <json.hpp>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace segregation {

namespace {

constexpr double kPi = std::numbers::pi;

void require_open_unit(double r) {
    if (!(r > 0.0 && r < 1.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "g is defined on (0, 1) only, got r=" << r;
        throw DomainError(os.str());
    }
}

template <class F>
double bisect(F&& f, double lo, double hi, const char* what) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw BracketFailure(std::string(what) + ": no sign change in bracket");
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

void PlateauSpec::validate() const {
    if (!(C_rr > 4.0)) throw ConfigError("C_rr must exceed 4 for non-constant steady states");
    if (!(M > 0.0 && M < 1.0)) throw ConfigError("mass M must lie in (0, 1)");
    const auto cp = critical_points(C_rr);
    if (!(cp.r_minus < M && M < cp.r_plus)) throw ConfigError("mass M must lie between r- and r+");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(C_r > 0.0)) throw ConfigError("C_r must be positive");
}

double PlateauSpec::pinned_c_tilde() const { return c_tilde_from_shift(pinned_shift(*this), *this); }

double g_shifted(double r, double C_rr, double shift) {
    require_open_unit(r);
    return r + std::log((1.0 - r) / r) / C_rr + shift;
}

double pinned_shift(const PlateauSpec& spec) { return -spec.M + std::log(spec.M / (1.0 - spec.M)) / spec.C_rr; }

double c_tilde_from_shift(double shift, const PlateauSpec& spec) { return spec.C_r * std::exp(spec.C_rr * shift); }

double g(double r, const PlateauSpec& spec) {
    require_open_unit(r);
    return r - spec.M + std::log(spec.M * (1.0 - r) / (r * (1.0 - spec.M))) / spec.C_rr;
}

double g_prime(double r, const PlateauSpec& spec) {
    require_open_unit(r);
    return 1.0 - 1.0 / (spec.C_rr * r * (1.0 - r));
}

CriticalPoints critical_points(double C_rr) {
    if (!(C_rr > 4.0)) throw ConfigError("C_rr must exceed 4 for g to have interior extrema");
    const double s = std::sqrt(0.25 - 1.0 / C_rr);
    return {0.5 - s, 0.5 + s};
}

OuterZeros outer_zeros(const PlateauSpec& spec) {
    spec.validate();
    const auto cp = critical_points(spec.C_rr);
    auto f = [&](double r) { return g(r, spec); };
    const double tol = 1e-300;
    return {bisect(f, tol, cp.r_minus, "outer_zeros(low)"), bisect(f, cp.r_plus, 1.0 - 1e-16, "outer_zeros(high)")};
}

double bifurcation_epsilon(const PlateauSpec& spec, int k) {
    if (k < 1) throw ConfigError("mode index k must be at least 1");
    const double gp = g_prime(spec.M, spec);
    if (!(gp > 0.0)) throw NoInstability("g'(M) <= 0: the constant state does not bifurcate");
    return std::sqrt(gp) / (2.0 * k * kPi);
}

namespace {

struct HalfProblem {
    int m;       // last index of the half period
    double h;
    double eps;
    double C;
    int k;
    double M;
};

double half_mass(const std::vector<double>& r, const HalfProblem& p) {
    double acc = 0.5 * (r.front() + r.back());
    for (int i = 1; i < p.m; ++i) acc += r[i];
    return 2.0 * p.k * p.h * acc;
}

double half_residual(const std::vector<double>& r, double shift, const HalfProblem& p, std::vector<double>& out) {
    const double a = p.eps * p.eps / (p.h * p.h);
    double worst = 0.0;
    for (int i = 0; i <= p.m; ++i) {
        const double left = i == 0 ? r[1] : r[i - 1];
        const double right = i == p.m ? r[p.m - 1] : r[i + 1];
        out[i] = a * (left - 2.0 * r[i] + right) + g_shifted(r[i], p.C, shift);
        worst = std::max(worst, std::abs(out[i]));
    }
    return worst;
}

// Newton on (r_0..r_m, shift). Returns the iteration count.
int newton_half(std::vector<double>& r, double& shift, const HalfProblem& p) {
    const int size = p.m + 1;
    const double a = p.eps * p.eps / (p.h * p.h);
    std::vector<double> F(size), dl(size - 1), d(size), du(size - 1), rhs(2 * size), trial(size), w(size);
    for (int i = 0; i <= p.m; ++i) w[i] = 2.0 * p.k * p.h * (i == 0 || i == p.m ? 0.5 : 1.0);

    for (int it = 1; it <= 80; ++it) {
        half_residual(r, shift, p, F);
        const double G = half_mass(r, p) - p.M;
        for (int i = 0; i < size; ++i) {
            d[i] = -2.0 * a + 1.0 - 1.0 / (p.C * r[i] * (1.0 - r[i]));
            rhs[i] = -F[i];
            rhs[size + i] = 1.0;
        }
        for (int i = 0; i + 1 < size; ++i) {
            du[i] = i == 0 ? 2.0 * a : a;
            dl[i] = i + 1 == p.m ? 2.0 * a : a;
        }
        const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, size, 2, dl.data(), d.data(), du.data(), rhs.data(), size);
        if (info != 0) {
            throw NoConvergence("plateau BVP: singular Newton matrix (dgtsv info " + std::to_string(info) + ")");
        }
        double wy = 0.0, wz = 0.0;
        for (int i = 0; i < size; ++i) {
            wy += w[i] * rhs[i];
            wz += w[i] * rhs[size + i];
        }
        const double ds = (wy + G) / wz;
        double step = 0.0;
        for (int i = 0; i < size; ++i) {
            rhs[i] -= ds * rhs[size + i];
            step = std::max(step, std::abs(rhs[i]));
        }
        double lambda = 1.0;
        for (;;) {
            bool inside = true;
            for (int i = 0; i < size && inside; ++i) {
                trial[i] = r[i] + lambda * rhs[i];
                inside = trial[i] > 0.0 && trial[i] < 1.0;
            }
            if (inside) break;
            lambda *= 0.5;
            if (lambda < 1e-12) throw NoConvergence("plateau BVP: Newton step cannot stay inside (0, 1)");
        }
        r.swap(trial);
        shift += lambda * ds;
        if (lambda == 1.0 && std::max(step, std::abs(ds)) < 1e-13) return it;
    }
    std::ostringstream os;
    os << "plateau BVP: Newton did not converge at eps=" << p.eps;
    throw NoConvergence(os.str());
}

} // namespace

SteadyProfile solve_plateau_bvp(const PlateauSpec& spec, int k, const Grid& grid) {
    spec.validate();
    if (grid.dimension() != 1) throw ConfigError("plateau BVP is one-dimensional");
    if (k < 1) throw ConfigError("mode index k must be at least 1");
    const int n = grid.points_per_axis();
    if (n % (2 * k) != 0) throw ConfigError("grid size must be divisible by 2k for the plateau BVP");
    const double eps_k = bifurcation_epsilon(spec, k);
    if (!(spec.epsilon < eps_k)) throw ConfigError("epsilon must lie below the k-th bifurcation value");

    // Plateau guess at a small eps (well below every bifurcation point that
    // could attract Newton to a near-constant state), then geometric
    // continuation to the target.
    const auto z = outer_zeros(spec);
    const double start = std::min(spec.epsilon, 0.25 * eps_k);
    HalfProblem p{n / (2 * k), grid.spacing(), start, spec.C_rr, k, spec.M};
    const double high_fraction = (spec.M - z.r_low) / (z.r_high - z.r_low);
    const double edge = high_fraction / (2.0 * k);
    std::vector<double> r(p.m + 1);
    for (int i = 0; i <= p.m; ++i) {
        r[i] = z.r_low + (z.r_high - z.r_low) * 0.5 * (1.0 - std::tanh((i * p.h - edge) / (2.0 * start)));
    }
    double shift = pinned_shift(spec);

    const double ratio = spec.epsilon / start;
    const int stages = std::max(1, int(std::ceil(std::abs(std::log(ratio)) / std::log(1.05))));
    int iterations = 0;
    for (int s = 0; s <= stages; ++s) {
        p.eps = s == stages ? spec.epsilon : start * std::pow(ratio, double(s) / stages);
        iterations += newton_half(r, shift, p);
    }

    SteadyProfile out{DensityField(grid), k};
    for (int i = 0; i < n; ++i) {
        int j = i % (2 * p.m);
        if (j > p.m) j = 2 * p.m - j;
        out.r[i] = r[j];
    }
    const DensityField lap = laplacian(out.r);
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
        res = std::max(res, std::abs(spec.epsilon * spec.epsilon * lap[i] + g_shifted(out.r[i], spec.C_rr, shift)));
    }
    out.plateau_low = out.r.min();
    out.plateau_high = out.r.max();
    out.shift = shift;
    out.c_tilde = c_tilde_from_shift(shift, spec);
    out.residual = res;
    out.mass = mass(out.r);
    out.iterations = iterations;
    const int changes = sign_changes(out.r, spec.M);
    if (changes != 2 * k) {
        std::ostringstream os;
        os << "plateau BVP: expected " << 2 * k << " crossings of M, found " << changes
           << " (amplitude " << out.plateau_high - out.plateau_low << ")";
        throw NoConvergence(os.str());
    }
    return out;
}

namespace {

// log C~ such that mass(1 / (1 + exp(l_i - c))) = M; safeguarded Newton in a bracket.
double fit_log_c_tilde(const std::vector<double>& l, double M, double weight, double guess) {
    const auto [lo_it, hi_it] = std::minmax_element(l.begin(), l.end());
    const double logit = std::log(M / (1.0 - M));
    double lo = *lo_it + logit, hi = *hi_it + logit;
    double c = std::clamp(guess, lo, hi);
    for (int it = 0; it < 200; ++it) {
        double m = 0.0, dm = 0.0;
        for (double li : l) {
            const double s = 1.0 / (1.0 + std::exp(li - c));
            m += s;
            dm += s * (1.0 - s);
        }
        m = m * weight - M;
        dm *= weight;
        if (m == 0.0) return c;
        (m > 0.0 ? hi : lo) = c;
        double next = dm > 0.0 ? c - m / dm : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - c) <= 1e-15 * std::max(1.0, std::abs(c)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(c)))
            return next;
        c = next;
    }
    return c;
}

} // namespace

SteadyProfile fixed_point_integral(const PlateauSpec& spec, const DensityField& r_init, double tol, long max_iter) {
    if (!(spec.C_r > 0.0) || !(spec.epsilon > 0.0) || !(spec.M > 0.0 && spec.M < 1.0)) {
        throw ConfigError("fixed point needs C_r > 0, epsilon > 0 and 0 < M < 1");
    }
    for (double v : r_init.values()) {
        if (!(v > 0.0 && v < 1.0)) throw DomainError("fixed point initial profile must lie in (0, 1)");
    }
    const Grid& grid = r_init.grid();
    const auto conv = convolver_for(make_kernel(grid.dimension(), spec.epsilon, KernelVariant::Sense), grid);
    const double log_cr = std::log(spec.C_r);

    DensityField r = r_init;
    DensityField next(grid);
    std::vector<double> l(grid.size());
    double c = std::log(spec.pinned_c_tilde());
    for (long it = 1; it <= max_iter; ++it) {
        const DensityField u = conv->apply(r);
        for (std::size_t i = 0; i < l.size(); ++i) l[i] = log_cr - spec.C_rr * u[i];
        c = fit_log_c_tilde(l, spec.M, grid.cell_volume(), c);
        double move = 0.0;
        for (std::size_t i = 0; i < l.size(); ++i) {
            next[i] = 1.0 / (1.0 + std::exp(l[i] - c));
            move = std::max(move, std::abs(next[i] - r[i]));
        }
        if (!std::isfinite(move)) throw NonFinite("fixed point iteration produced non-finite values");
        if (move <= tol) {
            SteadyProfile out{next, 0};
            out.k = dominant_mode(next).mx;
            out.plateau_low = next.min();
            out.plateau_high = next.max();
            out.c_tilde = std::exp(c);
            out.shift = (c - log_cr) / spec.C_rr;
            out.residual = move;
            out.mass = mass(next);
            out.iterations = int(it);
            if (out.plateau_high - out.plateau_low < 1e-12) out.k = 0;
            return out;
        }
        for (std::size_t i = 0; i < l.size(); ++i) r[i] = 0.5 * (r[i] + next[i]);
    }
    throw NoConvergence("fixed point iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

void write_profile_csv(std::ostream& os, const SteadyProfile& p) { write_csv(os, p.r, 0.0); }

std::string profile_metadata_json(const SteadyProfile& p, const PlateauSpec& spec, const std::string& method) {
    nlohmann::ordered_json j;
    j["method"] = method;
    j["M"] = spec.M;
    j["C_rr"] = spec.C_rr;
    j["epsilon"] = spec.epsilon;
    j["C_r"] = spec.C_r;
    j["k"] = p.k;
    try {
        const auto z = outer_zeros(spec);
        j["r_low"] = z.r_low;
        j["r_high"] = z.r_high;
    } catch (const std::exception&) {
        j["r_low"] = nullptr;
        j["r_high"] = nullptr;
    }
    j["plateau_low"] = p.plateau_low;
    j["plateau_high"] = p.plateau_high;
    j["c_tilde"] = p.c_tilde;
    j["shift"] = p.shift;
    j["residual"] = p.residual;
    j["mass"] = p.mass;
    j["iterations"] = p.iterations;
    j["n"] = p.r.grid().points_per_axis();
    return j.dump(2);
}

} // namespace segregation
