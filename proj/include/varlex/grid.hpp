#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace varlex {

/// Uniform lattice over the half-open cube [-L, L)^n, n in {1, 2}.
///
/// N cells per axis (a power of two, so every dyadic cube of depth
/// <= log2 N aligns exactly with cell boundaries), cell size h = 2L/N.
/// Immutable after construction; all operations on it are pure.
struct DomainGrid {
    int dim = 1;             // n
    double half_width = 0.5; // L, domain = [-L, L)^n
    long cells_per_axis = 1; // N

    double cell_size() const { return 2.0 * half_width / static_cast<double>(cells_per_axis); }
    double cell_volume() const;
    double domain_volume() const;
    long cell_count() const;
    int max_depth() const; // log2(N)

    /// Row-major flat index; axis 0 is the slowest.
    long flat_index(std::array<long, 2> idx) const;
    std::array<long, 2> axis_index(long flat) const;
    std::array<double, 2> cell_center(long flat) const;
    /// Euclidean distance of the cell center from the origin.
    double center_radius(long flat) const;

    bool operator==(const DomainGrid& other) const = default;
};

/// build_domain validates n in {1,2}, L > 0, N a power of two.
DomainGrid build_domain(int dim, double half_width, long cells_per_axis);

/// Scalar samples on a DomainGrid, one value per cell (piecewise constant
/// representative). Functions, weights and densities all live here.
struct GridField {
    DomainGrid grid;
    std::vector<double> values; // row-major, size = grid.cell_count()

    GridField() = default;
    GridField(DomainGrid g, double fill);
    GridField(DomainGrid g, std::vector<double> v);

    double& operator[](long i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](long i) const { return values[static_cast<std::size_t>(i)]; }
    long size() const { return static_cast<long>(values.size()); }

    double max_abs() const;
    bool all_zero() const;
};

/// Throws unless 0 < value < infinity on every cell.
void validate_weight(const GridField& w, const std::string& what = "weight");

/// One cube of the shifted dyadic family
///   D_t = { 2^{-k} ((-1)^k t + j + [0,1)^n) },   t in {0, 1/3}^n,
/// mapped affinely onto the domain window (unit coordinate u corresponds to
/// physical -L + 2L u). `lo`/`side` cache the physical geometry.
/// depth == -1 marks a synthetic cell-aligned cube outside any D_t.
struct DyadicCube {
    std::array<double, 2> shift{0.0, 0.0}; // t per axis
    int depth = 0;                         // k
    std::array<long, 2> corner{0, 0};      // j per axis
    std::array<double, 2> lo{0.0, 0.0};    // physical lower corner
    double side = 0.0;                     // physical side length

    double volume(int dim) const;
    bool contains(std::array<double, 2> point, int dim) const; // [lo, lo+side) per axis
    bool is_shifted() const { return shift[0] != 0.0 || shift[1] != 0.0; }
};

/// Inclusive per-axis ranges of cells whose centers lie inside a cube.
struct CellBox {
    std::array<long, 2> first{0, 0};
    std::array<long, 2> last{-1, -1};
    bool empty() const { return first[0] > last[0] || first[1] > last[1]; }
    long count(int dim) const;
};

CellBox cell_box(const DyadicCube& cube, const DomainGrid& grid);

/// Visits the flat index of every cell whose center lies in the cube.
template <class Fn>
void for_each_cell(const CellBox& box, const DomainGrid& grid, Fn&& fn) {
    if (box.empty()) return;
    if (grid.dim == 1) {
        for (long i = box.first[0]; i <= box.last[0]; ++i) fn(i);
    } else {
        for (long i = box.first[0]; i <= box.last[0]; ++i)
            for (long j = box.first[1]; j <= box.last[1]; ++j)
                fn(i * grid.cells_per_axis + j);
    }
}

/// Finite collection of dyadic cubes, depths 0..max_depth, one entry per
/// (shift, depth, corner) whose cube meets the domain window.
struct CubeFamily {
    DomainGrid grid;
    std::vector<std::array<double, 2>> shifts;
    int max_depth = 0;
    std::vector<DyadicCube> cubes;

    std::size_t size() const { return cubes.size(); }
    const DyadicCube& operator[](std::size_t i) const { return cubes[i]; }
};

/// Shift sets: the unshifted family alone, or all of {0, 1/3}^n.
std::vector<std::array<double, 2>> zero_shift(int dim);
std::vector<std::array<double, 2>> all_shifts(int dim);

/// Constructs the cube of D_t with the given depth and corner, mapped onto
/// the grid's domain window.
DyadicCube make_dyadic_cube(const DomainGrid& grid, std::array<double, 2> shift, int depth,
                            std::array<long, 2> corner);

/// Enumerates every cube of each requested shift with nonempty intersection
/// with the domain window, depths 0..max_depth. Throws when the unshifted
/// family is requested deeper than the grid resolves.
CubeFamily enumerate_cubes(const DomainGrid& grid,
                           std::span<const std::array<double, 2>> shifts,
                           int max_depth);

/// Convenience: the unshifted dyadic family at full grid resolution depth.
CubeFamily dyadic_family(const DomainGrid& grid, int max_depth = -1);

/// Every cell-aligned cube: side s cells, s = 1..N, at every aligned corner.
/// Desk-scale stand-in for the supremum over all cubes. Entries carry
/// depth == -1.
CubeFamily aligned_family(const DomainGrid& grid);

/// Midpoint Riemann sum of the field over the cube: sum of cell values times
/// cell volume over cells whose centers lie in the cube. Empty intersection
/// integrates to zero.
double integrate_over(const DyadicCube& cube, const GridField& field);

/// Average (1/|Q|) * integral with the geometric cube volume.
double average_over(const DyadicCube& cube, const GridField& field);

/// CSV export, one row per cube: shift per axis, depth, corner per axis, side.
std::string family_to_csv(const CubeFamily& family);

} // namespace varlex
