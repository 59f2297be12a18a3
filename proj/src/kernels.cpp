#include "segregation/kernels.hpp"

#include "segregation/errors.hpp"
#include "fft_lock.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>

namespace segregation {

std::mutex& detail::fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& planner_mutex() { return detail::fftw_planner_mutex(); }

// Number of lattice translates per side needed for exp(-C2 L / eps) < 1e-16.
int translate_range(const KernelSpec& k) { return 1 + int(std::ceil(37.0 * k.epsilon / k.c2)); }

} // namespace

double KernelSpec::total_mass() const noexcept {
    return variant == KernelVariant::Sense ? 1.0 : 1.0 / (epsilon * epsilon);
}

double KernelSpec::scale() const noexcept {
    const double eps_n = dimension == 1 ? epsilon : epsilon * epsilon;
    return variant == KernelVariant::Sense ? 1.0 / eps_n : 1.0 / (eps_n * epsilon * epsilon);
}

double KernelSpec::value(double distance) const noexcept {
    return scale() * c1 * std::exp(-c2 * distance / epsilon);
}

KernelSpec make_kernel(int dimension, double epsilon, KernelVariant variant) {
    if (dimension != 1 && dimension != 2) {
        throw ConfigError("kernel dimension must be 1 or 2, got " + std::to_string(dimension));
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("kernel epsilon must be positive");
    }
    KernelSpec k;
    k.dimension = dimension;
    k.epsilon = epsilon;
    k.variant = variant;
    k.c2 = std::sqrt((dimension + 1) / 2.0);
    // |S^0| = 2, |S^1| = 2 pi; (N-1)! = 1 for both.
    const double sphere = dimension == 1 ? 2.0 : 2.0 * kPi;
    k.c1 = std::pow(k.c2, dimension) / sphere;
    return k;
}

double fourier_symbol(const KernelSpec& k, double xi) {
    const double a = k.epsilon * k.epsilon * 4.0 * kPi * kPi * xi * xi + k.c2 * k.c2;
    const double sense = k.dimension == 1 ? 2.0 * k.c1 * k.c2 / a : 2.0 * k.c1 * k.c2 * kPi / (a * std::sqrt(a));
    return k.variant == KernelVariant::Sense ? sense : sense / (k.epsilon * k.epsilon);
}

std::vector<double> periodized_samples(const KernelSpec& k, const Grid& g) {
    const int n = g.points_per_axis();
    const double h = g.spacing();
    const int L = translate_range(k);
    std::vector<double> out(g.size(), 0.0);
    // Evaluate on offsets 0..n/2 and mirror, so the samples are exactly even.
    if (g.dimension() == 1) {
        for (int m = 0; m <= n / 2; ++m) {
            double s = 0.0;
            for (int l = -L; l <= L; ++l) s += k.value(std::abs(m * h + l));
            out[m] = s;
            out[g.wrap(-m)] = s;
        }
        return out;
    }
    for (int my = 0; my <= n / 2; ++my) {
        for (int mx = 0; mx <= n / 2; ++mx) {
            double s = 0.0;
            for (int ly = -L; ly <= L; ++ly)
                for (int lx = -L; lx <= L; ++lx) s += k.value(std::hypot(mx * h + lx, my * h + ly));
            out[g.index(mx, my)] = s;
            out[g.index(-mx, my)] = s;
            out[g.index(mx, -my)] = s;
            out[g.index(-mx, -my)] = s;
        }
    }
    return out;
}

std::vector<double> min_image_samples(const KernelSpec& k, const Grid& g) {
    const int n = g.points_per_axis();
    const double h = g.spacing();
    auto d = [&](int m) {
        const double x = m * h;
        return std::min(x, 1.0 - x);
    };
    std::vector<double> out(g.size());
    if (g.dimension() == 1) {
        for (int m = 0; m < n; ++m) out[m] = k.value(d(m));
    } else {
        for (int my = 0; my < n; ++my)
            for (int mx = 0; mx < n; ++mx) out[g.index(mx, my)] = k.value(std::hypot(d(mx), d(my)));
    }
    return out;
}

double sampled_second_moment(const KernelSpec& k, const Grid& g) {
    const auto s = periodized_samples(k, g);
    const int n = g.points_per_axis();
    const double h = g.spacing();
    auto d = [&](int m) {
        const double x = m * h;
        return std::min(x, 1.0 - x);
    };
    double acc = 0.0;
    if (g.dimension() == 1) {
        for (int m = 0; m < n; ++m) acc += s[m] * d(m) * d(m);
    } else {
        for (int my = 0; my < n; ++my)
            for (int mx = 0; mx < n; ++mx) acc += s[g.index(mx, my)] * (d(mx) * d(mx) + d(my) * d(my));
    }
    return acc * g.cell_volume();
}

Convolver::Convolver(const KernelSpec& k, const Grid& g) : kernel_(k), grid_(g) {
    if (k.dimension != g.dimension()) {
        throw ConfigError("kernel and grid dimensions differ");
    }
    samples_ = periodized_samples(k, g);
    double raw_mass = 0.0;
    for (double v : samples_) raw_mass += v;
    raw_mass *= g.cell_volume();
    const double rescale = k.total_mass() / raw_mass;
    for (double& v : samples_) v *= rescale;

    const int n = g.points_per_axis();
    const std::size_t spectral = g.dimension() == 1 ? std::size_t(n / 2 + 1) : std::size_t(n) * (n / 2 + 1);
    symbol_.resize(spectral);

    std::vector<double> real(g.size());
    {
        std::lock_guard lock(planner_mutex());
        auto* in = real.data();
        auto* out = reinterpret_cast<fftw_complex*>(symbol_.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (g.dimension() == 1) {
            forward_ = fftw_plan_dft_r2c_1d(n, in, out, flags);
            backward_ = fftw_plan_dft_c2r_1d(n, out, in, flags);
        } else {
            forward_ = fftw_plan_dft_r2c_2d(n, n, in, out, flags);
            backward_ = fftw_plan_dft_c2r_2d(n, n, out, in, flags);
        }
    }
    real = samples_;
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), real.data(),
                         reinterpret_cast<fftw_complex*>(symbol_.data()));
    for (auto& c : symbol_) c = {c.real() * g.cell_volume(), 0.0};
}

Convolver::~Convolver() {
    std::lock_guard lock(planner_mutex());
    if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

double Convolver::discrete_symbol(int mx, int my) const {
    const int n = grid_.points_per_axis();
    // Even kernel: the symbol depends only on |m| per axis.
    int ax = std::abs(grid_.wrap(mx));
    if (ax > n / 2) ax = n - ax;
    if (grid_.dimension() == 1) return symbol_[ax].real();
    return symbol_[std::size_t(grid_.wrap(my)) * (n / 2 + 1) + ax].real();
}

DensityField Convolver::apply(const DensityField& f) const {
    if (!(f.grid() == grid_)) throw ConfigError("convolution grid mismatch");
    std::vector<double> real(f.data());
    std::vector<std::complex<double>> spectrum(symbol_.size());
    auto* spec = reinterpret_cast<fftw_complex*>(spectrum.data());
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), real.data(), spec);
    const double inv_total = 1.0 / double(grid_.size());
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= symbol_[i].real() * inv_total;
    fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), spec, real.data());
    return DensityField(grid_, std::move(real));
}

std::shared_ptr<const Convolver> convolver_for(const KernelSpec& k, const Grid& g) {
    using Key = std::tuple<int, double, int, int>;
    static std::shared_mutex mutex;
    static std::map<Key, std::shared_ptr<const Convolver>> cache;
    const Key key{k.dimension, k.epsilon, int(k.variant), g.points_per_axis()};
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto made = std::make_shared<const Convolver>(k, g);
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.emplace(key, std::move(made));
    return it->second;
}

DensityField periodic_convolve(const KernelSpec& k, const DensityField& f) {
    return convolver_for(k, f.grid())->apply(f);
}

} // namespace segregation
