#include "varlex/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace varlex {

int& thread_cap() {
    static int cap = 0;
    return cap;
}

double DomainGrid::cell_volume() const {
    double h = cell_size();
    return dim == 1 ? h : h * h;
}

double DomainGrid::domain_volume() const {
    double w = 2.0 * half_width;
    return dim == 1 ? w : w * w;
}

long DomainGrid::cell_count() const {
    return dim == 1 ? cells_per_axis : cells_per_axis * cells_per_axis;
}

int DomainGrid::max_depth() const {
    int k = 0;
    for (long n = cells_per_axis; n > 1; n >>= 1) ++k;
    return k;
}

long DomainGrid::flat_index(std::array<long, 2> idx) const {
    return dim == 1 ? idx[0] : idx[0] * cells_per_axis + idx[1];
}

std::array<long, 2> DomainGrid::axis_index(long flat) const {
    if (dim == 1) return {flat, 0};
    return {flat / cells_per_axis, flat % cells_per_axis};
}

std::array<double, 2> DomainGrid::cell_center(long flat) const {
    auto idx = axis_index(flat);
    double h = cell_size();
    std::array<double, 2> c{0.0, 0.0};
    for (int a = 0; a < dim; ++a)
        c[static_cast<std::size_t>(a)] =
            -half_width + (static_cast<double>(idx[static_cast<std::size_t>(a)]) + 0.5) * h;
    return c;
}

double DomainGrid::center_radius(long flat) const {
    auto c = cell_center(flat);
    return dim == 1 ? std::abs(c[0]) : std::hypot(c[0], c[1]);
}

namespace {

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

DomainGrid build_domain(int dim, double half_width, long cells_per_axis) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("build_domain: dimension must be 1 or 2, got " +
                                    std::to_string(dim));
    if (!(half_width > 0.0))
        throw std::invalid_argument("build_domain: half-width must be positive");
    if (!is_power_of_two(cells_per_axis))
        throw std::invalid_argument("build_domain: cells per axis must be a power of two, got " +
                                    std::to_string(cells_per_axis));
    return DomainGrid{dim, half_width, cells_per_axis};
}

GridField::GridField(DomainGrid g, double fill)
    : grid(g), values(static_cast<std::size_t>(g.cell_count()), fill) {}

GridField::GridField(DomainGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<long>(values.size()) != grid.cell_count())
        throw std::invalid_argument("GridField: value count does not match the grid");
}

double GridField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

bool GridField::all_zero() const {
    for (double v : values)
        if (v != 0.0) return false;
    return true;
}

void validate_weight(const GridField& w, const std::string& what) {
    for (double v : w.values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(what + ": weights must satisfy 0 < w(x) < inf on every cell");
}

double DyadicCube::volume(int dim) const { return dim == 1 ? side : side * side; }

bool DyadicCube::contains(std::array<double, 2> point, int dim) const {
    for (int a = 0; a < dim; ++a) {
        auto i = static_cast<std::size_t>(a);
        if (point[i] < lo[i] || point[i] >= lo[i] + side) return false;
    }
    return true;
}

long CellBox::count(int dim) const {
    if (empty()) return 0;
    long c = last[0] - first[0] + 1;
    if (dim == 2) c *= last[1] - first[1] + 1;
    return c;
}

CellBox cell_box(const DyadicCube& cube, const DomainGrid& grid) {
    CellBox box;
    double h = grid.cell_size();
    for (int a = 0; a < grid.dim; ++a) {
        auto i = static_cast<std::size_t>(a);
        // centers -L + (i + 1/2) h in [lo, lo + side): comparisons against
        // half-integers keep aligned cubes exact.
        double lo_cells = (cube.lo[i] + grid.half_width) / h - 0.5;
        double hi_cells = (cube.lo[i] + cube.side + grid.half_width) / h - 0.5;
        long first = static_cast<long>(std::ceil(lo_cells));
        long last = static_cast<long>(std::ceil(hi_cells)) - 1;
        first = std::max<long>(first, 0);
        last = std::min<long>(last, grid.cells_per_axis - 1);
        box.first[i] = first;
        box.last[i] = last;
        if (first > last) { // empty on this axis: normalize and stop
            box.first = {1, 1};
            box.last = {0, 0};
            return box;
        }
    }
    if (grid.dim == 1) {
        box.first[1] = box.last[1] = 0;
    }
    return box;
}

std::vector<std::array<double, 2>> zero_shift(int dim) {
    (void)dim;
    return {std::array<double, 2>{0.0, 0.0}};
}

std::vector<std::array<double, 2>> all_shifts(int dim) {
    std::vector<std::array<double, 2>> out;
    if (dim == 1) {
        out.push_back({0.0, 0.0});
        out.push_back({1.0 / 3.0, 0.0});
    } else {
        for (double t0 : {0.0, 1.0 / 3.0})
            for (double t1 : {0.0, 1.0 / 3.0}) out.push_back({t0, t1});
    }
    return out;
}

DyadicCube make_dyadic_cube(const DomainGrid& grid, std::array<double, 2> shift, int depth,
                            std::array<long, 2> corner) {
    DyadicCube cube;
    cube.shift = shift;
    cube.depth = depth;
    cube.corner = corner;
    double width = 2.0 * grid.half_width;
    double scale = std::ldexp(1.0, -depth); // 2^-k
    double sign = (depth % 2 == 0) ? 1.0 : -1.0;
    cube.side = width * scale;
    for (int a = 0; a < grid.dim; ++a) {
        auto i = static_cast<std::size_t>(a);
        double unit_lo = scale * (sign * shift[i] + static_cast<double>(corner[i]));
        cube.lo[i] = -grid.half_width + width * unit_lo;
    }
    return cube;
}

CubeFamily enumerate_cubes(const DomainGrid& grid,
                           std::span<const std::array<double, 2>> shifts, int max_depth) {
    if (max_depth < 0) throw std::invalid_argument("enumerate_cubes: max depth must be >= 0");
    for (const auto& t : shifts) {
        bool unshifted = true;
        for (int a = 0; a < grid.dim; ++a) unshifted = unshifted && t[static_cast<std::size_t>(a)] == 0.0;
        if (unshifted && max_depth > grid.max_depth())
            throw std::invalid_argument(
                "enumerate_cubes: depth " + std::to_string(max_depth) +
                " exceeds the grid resolution log2(N) = " + std::to_string(grid.max_depth()) +
                " for the unshifted family");
    }

    CubeFamily family;
    family.grid = grid;
    family.shifts.assign(shifts.begin(), shifts.end());
    family.max_depth = max_depth;

    for (const auto& t : shifts) {
        for (int k = 0; k <= max_depth; ++k) {
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            long cells = 1L << k;
            // unit-coordinate cube 2^-k (s + j + [0,1)) meets [0,1) iff
            // -1 - s < j < 2^k - s
            std::array<long, 2> jmin{0, 0}, jmax{0, 0};
            for (int a = 0; a < grid.dim; ++a) {
                auto i = static_cast<std::size_t>(a);
                double s = sign * t[i];
                jmin[i] = static_cast<long>(std::floor(-s - 1.0)) + 1;
                jmax[i] = static_cast<long>(std::ceil(static_cast<double>(cells) - s)) - 1;
            }
            if (grid.dim == 1) {
                for (long j = jmin[0]; j <= jmax[0]; ++j)
                    family.cubes.push_back(make_dyadic_cube(grid, t, k, {j, 0}));
            } else {
                for (long j0 = jmin[0]; j0 <= jmax[0]; ++j0)
                    for (long j1 = jmin[1]; j1 <= jmax[1]; ++j1)
                        family.cubes.push_back(make_dyadic_cube(grid, t, k, {j0, j1}));
            }
        }
    }
    return family;
}

CubeFamily dyadic_family(const DomainGrid& grid, int max_depth) {
    if (max_depth < 0) max_depth = grid.max_depth();
    auto shifts = zero_shift(grid.dim);
    return enumerate_cubes(grid, shifts, max_depth);
}

CubeFamily aligned_family(const DomainGrid& grid) {
    CubeFamily family;
    family.grid = grid;
    family.shifts = zero_shift(grid.dim);
    family.max_depth = grid.max_depth();
    double width = 2.0 * grid.half_width;
    long n = grid.cells_per_axis;
    double inv_n = 1.0 / static_cast<double>(n); // exact: n is a power of two
    for (long size = 1; size <= n; ++size) {
        for (long i0 = 0; i0 + size <= n; ++i0) {
            long j1_end = grid.dim == 2 ? n - size : 0;
            for (long i1 = 0; i1 <= j1_end; ++i1) {
                DyadicCube cube;
                cube.depth = -1;
                cube.corner = {i0, i1};
                // unit coordinates over N keep power-of-two sized cubes
                // bit-identical to their dyadic counterparts
                cube.side = width * (static_cast<double>(size) * inv_n);
                cube.lo[0] = -grid.half_width + width * (static_cast<double>(i0) * inv_n);
                cube.lo[1] = grid.dim == 2
                                 ? -grid.half_width + width * (static_cast<double>(i1) * inv_n)
                                 : 0.0;
                family.cubes.push_back(cube);
            }
        }
    }
    return family;
}

double integrate_over(const DyadicCube& cube, const GridField& field) {
    CellBox box = cell_box(cube, field.grid);
    double sum = 0.0;
    for_each_cell(box, field.grid, [&](long c) { sum += field[c]; });
    return sum * field.grid.cell_volume();
}

double average_over(const DyadicCube& cube, const GridField& field) {
    return integrate_over(cube, field) / cube.volume(field.grid.dim);
}

std::string family_to_csv(const CubeFamily& family) {
    std::ostringstream out;
    out.precision(17);
    if (family.grid.dim == 1)
        out << "shift0,depth,corner0,side\n";
    else
        out << "shift0,shift1,depth,corner0,corner1,side\n";
    for (const auto& cube : family.cubes) {
        if (family.grid.dim == 1)
            out << cube.shift[0] << ',' << cube.depth << ',' << cube.corner[0] << ',' << cube.side
                << '\n';
        else
            out << cube.shift[0] << ',' << cube.shift[1] << ',' << cube.depth << ','
                << cube.corner[0] << ',' << cube.corner[1] << ',' << cube.side << '\n';
    }
    return out.str();
}

} // namespace varlex
