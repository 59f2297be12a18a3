#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "segregation/errors.hpp"
#include "segregation/kernels.hpp"

#include <cmath>
#include <numbers>
#include <thread>

using namespace segregation;
constexpr double pi = std::numbers::pi;

TEST_CASE("kernel constants") {
    const auto k1 = make_kernel(1, 0.05, KernelVariant::Sense);
    CHECK(k1.c1 == 0.5);
    CHECK(k1.c2 == 1.0);
    const auto k2 = make_kernel(2, 0.1, KernelVariant::Sense);
    CHECK(k2.c1 == doctest::Approx(3.0 / (4.0 * pi)).epsilon(1e-15));
    CHECK(k2.c1 == doctest::Approx(0.23873).epsilon(1e-5));
    CHECK(k2.c2 == doctest::Approx(1.22474).epsilon(1e-5));
    CHECK(make_kernel(1, 0.05, KernelVariant::Jump).total_mass() == doctest::Approx(400.0));
    CHECK_THROWS_AS(make_kernel(3, 0.05, KernelVariant::Sense), ConfigError);
    CHECK_THROWS_AS(make_kernel(0, 0.05, KernelVariant::Sense), ConfigError);
    CHECK_THROWS_AS(make_kernel(1, 0.0, KernelVariant::Sense), ConfigError);
}

TEST_CASE("base kernel has unit mass and second moment 2N") {
    // Radial quadrature of C1 exp(-C2 s) s^(N-1) |S^(N-1)| (and times s^2), Simpson on [0, 60].
    for (int dim : {1, 2}) {
        const auto k = make_kernel(dim, 1.0, KernelVariant::Sense);
        const double sphere = dim == 1 ? 2.0 : 2.0 * pi;
        const int m = 200000;
        const double L = 60.0, h = L / m;
        double m0 = 0.0, m2 = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double s = i * h;
            const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double v = k.c1 * std::exp(-k.c2 * s) * std::pow(s, dim - 1) * sphere;
            m0 += w * v;
            m2 += w * v * s * s;
        }
        CHECK(m0 * h / 3.0 == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(m2 * h / 3.0 == doctest::Approx(2.0 * dim).epsilon(1e-10));
    }
}

TEST_CASE("periodized sampled kernel has mass close to one") {
    const auto k = make_kernel(1, 0.05, KernelVariant::Sense);
    double prev = 1.0;
    for (int n : {500, 1000, 2000}) {
        const auto s = periodized_samples(k, Grid(1, n));
        const double err = std::abs(oracle::kahan_sum(s) / n - 1.0);
        if (n == 500) CHECK(err <= 1e-3);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("fourier symbol values") {
    for (double eps : {0.01, 0.05, 0.3}) {
        CHECK(fourier_symbol(make_kernel(1, eps, KernelVariant::Sense), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(fourier_symbol(make_kernel(2, eps, KernelVariant::Sense), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(fourier_symbol(make_kernel(1, eps, KernelVariant::Jump), 0.0) ==
              doctest::Approx(1.0 / (eps * eps)).epsilon(1e-14));
    }
    const auto k = make_kernel(1, 0.05, KernelVariant::Sense);
    CHECK(fourier_symbol(k, 3.339) == doctest::Approx(1.0 / 2.1).epsilon(1e-3));
    const auto kj = make_kernel(2, 0.1, KernelVariant::Jump);
    const auto ks = make_kernel(2, 0.1, KernelVariant::Sense);
    CHECK(fourier_symbol(kj, 2.5) == doctest::Approx(fourier_symbol(ks, 2.5) / 0.01).epsilon(1e-14));
}

TEST_CASE("fourier symbol matches numerical transforms") {
    // 1D: 2 int_0^inf K(x) cos(2 pi xi x) dx; 2D: int_0^inf K(s) J0(2 pi R s) 2 pi s ds.
    const int m = 400000;
    for (double xi : {0.0, 1.0, 3.0, 7.5}) {
        const auto k1 = make_kernel(1, 0.05, KernelVariant::Sense);
        const auto k2 = make_kernel(2, 0.1, KernelVariant::Sense);
        const double L1 = 2.0, L2 = 4.0;
        double a1 = 0.0, a2 = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double x = L1 * i / m;
            a1 += w * 2.0 * k1.value(x) * std::cos(2 * pi * xi * x);
            const double s = L2 * i / m;
            a2 += w * k2.value(s) * std::cyl_bessel_j(0.0, 2 * pi * xi * s) * 2 * pi * s;
        }
        a1 *= L1 / m / 3.0;
        a2 *= L2 / m / 3.0;
        CHECK(fourier_symbol(k1, xi) == doctest::Approx(a1).epsilon(1e-8));
        CHECK(fourier_symbol(k2, xi) == doctest::Approx(a2).epsilon(1e-8));
    }
}

TEST_CASE("fourier symbol is decreasing in |xi|") {
    oracle::Rng rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        const auto k = make_kernel(rng.integer(1, 2), rng.uniform(0.005, 0.5),
                                   rng.integer(0, 1) ? KernelVariant::Jump : KernelVariant::Sense);
        const double a = rng.uniform(0.0, 50.0), b = rng.uniform(0.0, 50.0);
        const double lo = std::min(a, b), hi = std::max(a, b);
        CHECK(fourier_symbol(k, hi) <= fourier_symbol(k, lo));
        CHECK(fourier_symbol(k, hi) > 0.0);
    }
}

TEST_CASE("convolution reproduces constants") {
    for (int dim : {1, 2}) {
        const Grid g(dim, dim == 1 ? 100 : 40);
        const DensityField f(g, 0.37);
        const auto s = periodic_convolve(make_kernel(dim, 0.05, KernelVariant::Sense), f);
        for (double v : s.values()) CHECK(std::abs(v - 0.37) <= 1e-10);
        const auto j = periodic_convolve(make_kernel(dim, 0.05, KernelVariant::Jump), f);
        for (double v : j.values()) CHECK(std::abs(v - 0.37 * 400.0) <= 1e-10 * 400.0);
    }
}

TEST_CASE("cosine modes are eigenfunctions with the continuum symbol") {
    const auto k = make_kernel(1, 0.05, KernelVariant::Sense);
    for (int m : {1, 3, 8}) {
        double prev = 1.0;
        for (int n : {500, 2000}) {
            const Grid g(1, n);
            const auto f = DensityField::sample(g, [&](double x, double) { return std::cos(2 * pi * m * x); });
            const auto out = periodic_convolve(k, f);
            const double sym = fourier_symbol(k, m);
            double err = 0.0;
            for (int i = 0; i < n; ++i) err = std::max(err, std::abs(out[i] - sym * f[i]));
            err /= sym;
            if (n == 500) CHECK(err <= 1e-2);
            CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("discrete and continuum symbols agree at integer frequencies") {
    for (double eps : {0.05, 0.1}) {
        for (int n : {500, 1000}) {
            const auto k = make_kernel(1, eps, KernelVariant::Sense);
            const Convolver c(k, Grid(1, n));
            for (int m = 0; m <= 20; ++m) CHECK(std::abs(c.discrete_symbol(m) - fourier_symbol(k, m)) <= 1e-3);
        }
    }
}

TEST_CASE("convolution preserves mass") {
    oracle::Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = rng.integer(1, 2);
        const Grid g(dim, rng.integer(16, dim == 1 ? 400 : 64));
        const auto f = rng.field(g, 0.0, 1.0);
        const auto k = make_kernel(dim, rng.uniform(0.02, 0.2), KernelVariant::Sense);
        CHECK(std::abs(mass(periodic_convolve(k, f)) - mass(f)) <= 1e-10);
    }
}

TEST_CASE("FFT convolution equals the direct trapezoidal sum") {
    oracle::Rng rng(8);
    struct Case {
        int dim, n;
        double eps;
        KernelVariant v;
    };
    for (const Case& c : {Case{1, 128, 0.05, KernelVariant::Sense}, Case{1, 256, 0.1, KernelVariant::Sense},
                          Case{1, 128, 0.05, KernelVariant::Jump}, Case{2, 16, 0.1, KernelVariant::Sense},
                          Case{2, 24, 0.2, KernelVariant::Jump}}) {
        const Grid g(c.dim, c.n);
        const auto k = make_kernel(c.dim, c.eps, c.v);
        const auto f = rng.field(g, 0.0, 1.0);
        const auto fast = periodic_convolve(k, f);
        const auto slow = oracle::direct_convolution(oracle::normalized_samples(k, g), f);
        CHECK(oracle::max_abs_diff(fast, slow) <= 1e-10 * k.total_mass());
    }
}

TEST_CASE("convolution commutes with translation and reflection") {
    oracle::Rng rng(12);
    for (int dim : {1, 2}) {
        const Grid g(dim, dim == 1 ? 90 : 30);
        const auto k = make_kernel(dim, 0.07, KernelVariant::Sense);
        const auto f = rng.field(g, 0.0, 1.0);
        const int sx = 7, sy = dim == 2 ? -4 : 0;
        CHECK(oracle::max_abs_diff(periodic_convolve(k, shifted(f, sx, sy)), shifted(periodic_convolve(k, f), sx, sy)) <=
              1e-14);
        DensityField refl(g);
        const int n = g.points_per_axis();
        for (int iy = 0; iy < (dim == 1 ? 1 : n); ++iy)
            for (int ix = 0; ix < n; ++ix) refl.at(ix, iy) = f.at(-ix, -iy);
        const auto a = periodic_convolve(k, refl);
        const auto b = periodic_convolve(k, f);
        double d = 0.0;
        for (int iy = 0; iy < (dim == 1 ? 1 : n); ++iy)
            for (int ix = 0; ix < n; ++ix) d = std::max(d, std::abs(a.at(ix, iy) - b.at(-ix, -iy)));
        CHECK(d <= 1e-14);
    }
}

TEST_CASE("second moment of the sampled jump kernel") {
    CHECK(sampled_second_moment(make_kernel(1, 0.05, KernelVariant::Jump), Grid(1, 2000)) ==
          doctest::Approx(2.0).epsilon(0.01));
    CHECK(sampled_second_moment(make_kernel(2, 0.05, KernelVariant::Jump), Grid(2, 400)) ==
          doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("lattice wrapping versus minimum-image truncation") {
    // Pointwise difference is bounded by the first omitted translates,
    // 2 (C1/eps) exp(-C2/(2 eps)) / (1 - exp(-C2/eps)) in 1D.
    for (double eps : {0.01, 0.02, 0.05, 0.1}) {
        const auto k = make_kernel(1, eps, KernelVariant::Sense);
        const Grid g(1, 400);
        const auto wrap = periodized_samples(k, g);
        const auto trunc = min_image_samples(k, g);
        double d = 0.0;
        for (std::size_t i = 0; i < wrap.size(); ++i) d = std::max(d, std::abs(wrap[i] - trunc[i]));
        const double bound = 2.0 * (k.c1 / eps) * std::exp(-k.c2 / (2 * eps)) / (1.0 - std::exp(-k.c2 / eps));
        // plus rounding of samples of size C1/eps
        CHECK(d <= bound + 1e-14 * k.c1 / eps);
        if (eps <= 0.02) CHECK(d <= 1e-8);
    }
}

TEST_CASE("shared convolver cache under concurrent use") {
    const Grid g(1, 300);
    const auto k = make_kernel(1, 0.031, KernelVariant::Sense);
    oracle::Rng rng(1);
    const auto f = rng.field(g, 0.0, 1.0);
    const auto ref = Convolver(k, g).apply(f);
    std::vector<std::thread> pool;
    std::vector<int> ok(8, 0);
    for (int t = 0; t < 8; ++t) {
        pool.emplace_back([&, t] {
            int good = 1;
            for (int rep = 0; rep < 20; ++rep) good &= convolver_for(k, g)->apply(f).data() == ref.data();
            ok[t] = good;
        });
    }
    for (auto& th : pool) th.join();
    for (int v : ok) CHECK(v == 1);
    CHECK(convolver_for(k, g).get() == convolver_for(k, g).get());
}
