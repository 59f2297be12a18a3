#pragma once

// Uniform periodic grids on the unit torus [0,1)^N, N = 1 or 2, and the
// finite-difference operators used by the local model.

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace segregation {

class Grid {
public:
    Grid(int dimension, int points_per_axis);

    int dimension() const noexcept { return dim_; }
    int points_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    // h^N, the quadrature weight of one cell.
    double cell_volume() const noexcept { return dim_ == 1 ? h_ : h_ * h_; }
    std::size_t size() const noexcept { return dim_ == 1 ? std::size_t(n_) : std::size_t(n_) * n_; }

    int wrap(int i) const noexcept {
        const int r = i % n_;
        return r < 0 ? r + n_ : r;
    }
    // Row-major: x index varies fastest. Indices wrap on every axis.
    std::size_t index(int ix, int iy = 0) const noexcept {
        return dim_ == 1 ? std::size_t(wrap(ix)) : std::size_t(wrap(iy)) * n_ + std::size_t(wrap(ix));
    }
    double coordinate(int i) const noexcept { return i * h_; }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.dim_ == b.dim_ && a.n_ == b.n_;
    }

private:
    int dim_;
    int n_;
    double h_;
};

class DensityField {
public:
    explicit DensityField(Grid grid, double fill = 0.0);
    DensityField(Grid grid, std::vector<double> values);

    // Samples fn at the grid nodes (y is 0 in 1D).
    static DensityField sample(const Grid& grid, const std::function<double(double, double)>& fn);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    const std::vector<double>& data() const noexcept { return values_; }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& at(int ix, int iy = 0) noexcept { return values_[grid_.index(ix, iy)]; }
    double at(int ix, int iy = 0) const noexcept { return values_[grid_.index(ix, iy)]; }

    double min() const;
    double max() const;
    double mean() const;
    bool all_finite() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

// Vector field on a staggered layout: components[a][c] lives on the face
// between cell c and cell c + e_a. Only components[0] is used in 1D.
struct FaceFlux {
    explicit FaceFlux(Grid g);
    Grid grid;
    std::array<std::vector<double>, 2> components;
};

// Face-centred difference (f(c + e_a) - f(c)) / h on every axis.
FaceFlux face_gradient(const DensityField& f);

// (J(c) - J(c - e_a)) / h summed over axes. Telescopes, so sum over the torus is 0.
DensityField divergence_of_flux(const FaceFlux& flux);

// Second-order Laplacian, computed as divergence_of_flux(face_gradient(f)).
DensityField laplacian(const DensityField& f);

// h^N * sum of values, summed left to right in storage order.
double mass(const DensityField& f);

// Cyclic shift: result(c) = f(c - shift).
DensityField shifted(const DensityField& f, int shift_x, int shift_y = 0);

// Pointwise Pearson correlation of two fields on the same grid.
double correlation(const DensityField& a, const DensityField& b);

// CSV snapshot format. Both dimensions start with "# n=<n> dim=<N> t=<time>";
// 1D continues with an "x,value" header and one row per node, 2D with n rows of
// n comma-separated values (row j holds y = j h).
void write_csv(std::ostream& os, const DensityField& f, double t);

struct Snapshot {
    DensityField field;
    double t;
};
Snapshot read_csv(std::istream& is);

} // namespace segregation
