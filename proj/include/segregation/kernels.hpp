#pragma once

// Exponential interaction kernels K~(z) = C1 exp(-C2 |z|) in the jump scaling
// eps^-(N+2) K~(x/eps) and the sensing scaling eps^-N K~(x/eps), their
// continuum Fourier symbols, and periodic convolution on torus grids.

#include "segregation/torus_grid.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace segregation {

enum class KernelVariant { Jump, Sense };

struct KernelSpec {
    int dimension = 1;
    double epsilon = 0.05;
    KernelVariant variant = KernelVariant::Sense;
    double c1 = 0.5;
    double c2 = 1.0;

    // Integral over R^N: 1 for Sense, 1/eps^2 for Jump.
    double total_mass() const noexcept;
    // Prefactor eps^-N (Sense) or eps^-(N+2) (Jump) multiplying K~(x/eps).
    double scale() const noexcept;
    // Unperiodized kernel at distance |x|.
    double value(double distance) const noexcept;
};

// C2 = sqrt((N+1)/2), C1 = C2^N / (|S^{N-1}| (N-1)!), so that K~ has unit
// mass and second moment 2N. Throws ConfigError unless N in {1, 2} and eps > 0.
KernelSpec make_kernel(int dimension, double epsilon, KernelVariant variant);

// Continuum transform at |xi| (xi in cycles per unit length, exp(-2 pi i xi.x)).
double fourier_symbol(const KernelSpec& k, double xi_magnitude);

// Node samples of the lattice-periodized kernel sum_m K(x + m), not rescaled.
// Translates are added until their contribution drops below 1e-16 relative.
std::vector<double> periodized_samples(const KernelSpec& k, const Grid& g);

// Node samples of K(d(x)) with the minimum-image distance d, not rescaled.
std::vector<double> min_image_samples(const KernelSpec& k, const Grid& g);

// h^N sum K(x_j) |d(x_j)|^2 over the periodized samples (2N for Jump up to quadrature error).
double sampled_second_moment(const KernelSpec& k, const Grid& g);

// Circular convolution with the periodized kernel, weighted by h^N so it
// approximates the continuum integral. Samples are rescaled so that the
// discrete mass equals total_mass() exactly; constants are then reproduced
// (Sense) and convolution preserves mass. Immutable after construction, so
// one instance may be shared by any number of threads.
class Convolver {
public:
    Convolver(const KernelSpec& k, const Grid& g);
    ~Convolver();
    Convolver(const Convolver&) = delete;
    Convolver& operator=(const Convolver&) = delete;

    const KernelSpec& kernel() const noexcept { return kernel_; }
    const Grid& grid() const noexcept { return grid_; }
    // Rescaled node samples of the periodized kernel.
    const std::vector<double>& samples() const noexcept { return samples_; }
    // h^N * DFT(samples) at integer frequency (mx, my); real because the kernel is even.
    double discrete_symbol(int mx, int my = 0) const;

    DensityField apply(const DensityField& f) const;

private:
    KernelSpec kernel_;
    Grid grid_;
    std::vector<double> samples_;
    std::vector<std::complex<double>> symbol_;  // h^N * DFT, r2c layout
    void* forward_ = nullptr;                   // fftw_plan
    void* backward_ = nullptr;
};

// Shared, thread-safe cache of convolvers keyed by (kernel, grid).
std::shared_ptr<const Convolver> convolver_for(const KernelSpec& k, const Grid& g);

DensityField periodic_convolve(const KernelSpec& k, const DensityField& f);

} // namespace segregation
