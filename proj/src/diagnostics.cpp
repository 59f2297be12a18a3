#include "segregation/diagnostics.hpp"

#include "fft_lock.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

namespace segregation {

double perturbation_amplitude(const DensityField& f) {
    const double m = f.mean();
    double a = 0.0;
    for (double v : f.values()) a = std::max(a, std::abs(v - m));
    return a;
}

Mode dominant_mode(const DensityField& f) {
    const Grid& g = f.grid();
    const int n = g.points_per_axis();
    const int cols = n / 2 + 1;
    const int rows = g.dimension() == 1 ? 1 : n;
    std::vector<double> in(f.data());
    std::vector<std::complex<double>> out(std::size_t(rows) * cols);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        auto* o = reinterpret_cast<fftw_complex*>(out.data());
        fftw_plan p = g.dimension() == 1 ? fftw_plan_dft_r2c_1d(n, in.data(), o, FFTW_ESTIMATE)
                                         : fftw_plan_dft_r2c_2d(n, n, in.data(), o, FFTW_ESTIMATE);
        fftw_execute(p);
        fftw_destroy_plan(p);
    }
    Mode best;
    best.magnitude = -1.0;
    for (int mx = 0; mx < cols; ++mx) {
        for (int j = 0; j < rows; ++j) {
            int my = j <= n / 2 ? j : j - n;
            if (g.dimension() == 2 && my == -n / 2) my = n / 2;
            if (mx == 0 && my == 0) continue;
            const double mag = std::abs(out[std::size_t(j) * cols + mx]) / double(g.size());
            if (mag > best.magnitude) best = {mx, my, mag};
        }
    }
    return best;
}

double mode_magnitude(const DensityField& f, int mx, int my) {
    const Grid& g = f.grid();
    const int n = g.points_per_axis();
    std::complex<double> acc = 0.0;
    const double w = 2.0 * std::numbers::pi / n;
    for (int iy = 0; iy < (g.dimension() == 1 ? 1 : n); ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const long phase = (long(mx) * ix + long(my) * iy) % n;
            acc += f.at(ix, iy) * std::polar(1.0, -w * double(phase));
        }
    }
    return std::abs(acc) / double(g.size());
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

} // namespace

int bump_count(const DensityField& f) {
    const double hi = f.max();
    const double lo = f.min();
    if (!(hi > lo)) return 0;
    const double level = 0.5 * (hi + lo);
    const Grid& g = f.grid();
    const int n = g.points_per_axis();
    const int rows = g.dimension() == 1 ? 1 : n;
    DisjointSets sets(g.size());
    for (int iy = 0; iy < rows; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (!(f.at(ix, iy) > level)) continue;
            if (f.at(ix + 1, iy) > level) sets.unite(g.index(ix, iy), g.index(ix + 1, iy));
            if (rows > 1 && f.at(ix, iy + 1) > level) sets.unite(g.index(ix, iy), g.index(ix, iy + 1));
        }
    }
    int count = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (f[i] > level && sets.find(i) == i) ++count;
    return count;
}

int sign_changes(const DensityField& f, double level) {
    const std::size_t n = f.size();
    int changes = 0;
    int prev = 0;
    // Start from the last nonzero sign so zeros do not count twice.
    for (std::size_t i = n; i-- > 0;) {
        if (f[i] != level) {
            prev = f[i] > level ? 1 : -1;
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i] == level) continue;
        const int s = f[i] > level ? 1 : -1;
        if (s != prev) ++changes;
        prev = s;
    }
    return changes;
}

} // namespace segregation
