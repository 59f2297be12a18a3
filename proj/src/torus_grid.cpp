#include "segregation/torus_grid.hpp"

#include "segregation/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace segregation {

Grid::Grid(int dimension, int points_per_axis)
    : dim_(dimension), n_(points_per_axis), h_(1.0 / points_per_axis) {
    if (dimension != 1 && dimension != 2) {
        throw ConfigError("grid dimension must be 1 or 2, got " + std::to_string(dimension));
    }
    if (points_per_axis < 8) {
        throw ConfigError("grid needs at least 8 points per axis, got " + std::to_string(points_per_axis));
    }
}

DensityField::DensityField(Grid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

DensityField::DensityField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ConfigError("field size does not match grid");
    }
}

DensityField DensityField::sample(const Grid& grid, const std::function<double(double, double)>& fn) {
    DensityField f(grid);
    const int n = grid.points_per_axis();
    if (grid.dimension() == 1) {
        for (int i = 0; i < n; ++i) f.at(i) = fn(grid.coordinate(i), 0.0);
    } else {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) f.at(i, j) = fn(grid.coordinate(i), grid.coordinate(j));
    }
    return f;
}

double DensityField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double DensityField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double DensityField::mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / double(values_.size());
}

bool DensityField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

FaceFlux::FaceFlux(Grid g) : grid(g) {
    components[0].assign(g.size(), 0.0);
    if (g.dimension() == 2) components[1].assign(g.size(), 0.0);
}

FaceFlux face_gradient(const DensityField& f) {
    const Grid& g = f.grid();
    const int n = g.points_per_axis();
    const double inv_h = 1.0 / g.spacing();
    FaceFlux out(g);
    if (g.dimension() == 1) {
        for (int i = 0; i < n; ++i) out.components[0][i] = (f.at(i + 1) - f.at(i)) * inv_h;
        return out;
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t c = g.index(i, j);
            out.components[0][c] = (f.at(i + 1, j) - f[c]) * inv_h;
            out.components[1][c] = (f.at(i, j + 1) - f[c]) * inv_h;
        }
    }
    return out;
}

DensityField divergence_of_flux(const FaceFlux& flux) {
    const Grid& g = flux.grid;
    const int n = g.points_per_axis();
    const double inv_h = 1.0 / g.spacing();
    DensityField out(g);
    const auto& jx = flux.components[0];
    if (g.dimension() == 1) {
        for (int i = 0; i < n; ++i) out[i] = (jx[i] - jx[g.index(i - 1)]) * inv_h;
        return out;
    }
    const auto& jy = flux.components[1];
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t c = g.index(i, j);
            out[c] = (jx[c] - jx[g.index(i - 1, j)]) * inv_h + (jy[c] - jy[g.index(i, j - 1)]) * inv_h;
        }
    }
    return out;
}

DensityField laplacian(const DensityField& f) { return divergence_of_flux(face_gradient(f)); }

double mass(const DensityField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_volume();
}

DensityField shifted(const DensityField& f, int shift_x, int shift_y) {
    const Grid& g = f.grid();
    const int n = g.points_per_axis();
    DensityField out(g);
    if (g.dimension() == 1) {
        for (int i = 0; i < n; ++i) out.at(i) = f.at(i - shift_x);
    } else {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) out.at(i, j) = f.at(i - shift_x, j - shift_y);
    }
    return out;
}

double correlation(const DensityField& a, const DensityField& b) {
    const double ma = a.mean();
    const double mb = b.mean();
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

namespace {

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_csv(std::ostream& os, const DensityField& f, double t) {
    const Grid& g = f.grid();
    const int n = g.points_per_axis();
    os << "# n=" << n << " dim=" << g.dimension() << " t=" << format_real(t) << '\n';
    if (g.dimension() == 1) {
        os << "x,value\n";
        for (int i = 0; i < n; ++i) os << format_real(g.coordinate(i)) << ',' << format_real(f.at(i)) << '\n';
        return;
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i) os << ',';
            os << format_real(f.at(i, j));
        }
        os << '\n';
    }
}

Snapshot read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
        throw ConfigError("snapshot: missing '# n=<n> dim=<N> t=<t>' header");
    }
    int n = 0, dim = 0;
    double t = 0.0;
    if (std::sscanf(line.c_str(), "# n=%d dim=%d t=%lf", &n, &dim, &t) != 3) {
        throw ConfigError("snapshot: malformed header '" + line + "'");
    }
    const Grid g(dim, n);
    std::vector<double> values;
    values.reserve(g.size());
    if (dim == 1) {
        if (!std::getline(is, line) || line != "x,value") throw ConfigError("snapshot: expected 'x,value' header");
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw ConfigError("snapshot: malformed row '" + line + "'");
            values.push_back(std::stod(line.substr(comma + 1)));
        }
    } else {
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::stringstream row(line);
            std::string cell;
            while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        }
    }
    if (values.size() != g.size()) {
        throw ConfigError("snapshot: expected " + std::to_string(g.size()) + " values, got " +
                          std::to_string(values.size()));
    }
    return {DensityField(g, std::move(values)), t};
}

} // namespace segregation
