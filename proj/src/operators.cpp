#include "varlex/operators.hpp"

#include "varlex/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace varlex {

namespace {

void check_alpha(double alpha, int m, int dim) {
    if (alpha < 0.0 || alpha >= static_cast<double>(m * dim))
        throw std::invalid_argument("alpha must lie in [0, m n)");
}

std::vector<const GridField*> as_pointers(std::span<const GridField> f) {
    std::vector<const GridField*> out;
    out.reserve(f.size());
    for (const auto& field : f) out.push_back(&field);
    return out;
}

} // namespace

double DyadicValuePyramid::cube_value(int depth, std::array<long, 2> corner) const {
    long side = 1L << depth;
    long flat = grid.dim == 1 ? corner[0] : corner[0] * side + corner[1];
    return value[static_cast<std::size_t>(depth)][static_cast<std::size_t>(flat)];
}

double DyadicValuePyramid::maximal_at(long cell) const {
    auto idx = grid.axis_index(cell);
    int grid_depth = grid.max_depth();
    double best = 0.0;
    for (int k = 0; k <= max_depth; ++k) {
        std::array<long, 2> corner{idx[0] >> (grid_depth - k), idx[1] >> (grid_depth - k)};
        best = std::max(best, cube_value(k, corner));
    }
    return best;
}

GridField DyadicValuePyramid::maximal_field() const {
    GridField out(grid, 0.0);
    parallel_for(static_cast<std::size_t>(out.size()), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) out[static_cast<long>(c)] = maximal_at(static_cast<long>(c));
    });
    return out;
}

DyadicValuePyramid product_average_pyramid(std::span<const GridField> factors, double alpha,
                                           int max_depth) {
    if (factors.empty()) throw std::invalid_argument("product_average_pyramid: no factors");
    const DomainGrid& grid = factors.front().grid;
    int m = static_cast<int>(factors.size());
    check_alpha(alpha, m, grid.dim);
    int grid_depth = grid.max_depth();
    if (max_depth < 0) max_depth = grid_depth;
    if (max_depth > grid_depth)
        throw std::invalid_argument("product_average_pyramid: depth exceeds grid resolution");

    DyadicValuePyramid pyramid;
    pyramid.grid = grid;
    pyramid.max_depth = max_depth;
    pyramid.alpha = alpha;
    pyramid.m = m;

    // per-factor integrals sum_Q |f_i| h^n, built bottom-up from cells
    std::vector<std::vector<std::vector<double>>> integral(
        static_cast<std::size_t>(m));
    double cell_vol = grid.cell_volume();
    for (int i = 0; i < m; ++i) {
        auto& layers = integral[static_cast<std::size_t>(i)];
        layers.resize(static_cast<std::size_t>(grid_depth) + 1);
        auto& leaf = layers[static_cast<std::size_t>(grid_depth)];
        leaf.resize(static_cast<std::size_t>(grid.cell_count()));
        for (long c = 0; c < grid.cell_count(); ++c)
            leaf[static_cast<std::size_t>(c)] = std::abs(factors[static_cast<std::size_t>(i)][c]) * cell_vol;
        for (int k = grid_depth - 1; k >= 0; --k) {
            long side = 1L << k;
            long count = grid.dim == 1 ? side : side * side;
            auto& layer = layers[static_cast<std::size_t>(k)];
            const auto& finer = layers[static_cast<std::size_t>(k) + 1];
            layer.assign(static_cast<std::size_t>(count), 0.0);
            for (long j = 0; j < count; ++j) {
                if (grid.dim == 1) {
                    layer[static_cast<std::size_t>(j)] =
                        finer[static_cast<std::size_t>(2 * j)] + finer[static_cast<std::size_t>(2 * j + 1)];
                } else {
                    long j0 = j / side, j1 = j % side;
                    long fine_side = side * 2;
                    auto at = [&](long a, long b) {
                        return finer[static_cast<std::size_t>(a * fine_side + b)];
                    };
                    layer[static_cast<std::size_t>(j)] =
                        at(2 * j0, 2 * j1) + at(2 * j0, 2 * j1 + 1) + at(2 * j0 + 1, 2 * j1) +
                        at(2 * j0 + 1, 2 * j1 + 1);
                }
            }
        }
    }

    double width = 2.0 * grid.half_width;
    pyramid.value.resize(static_cast<std::size_t>(max_depth) + 1);
    for (int k = 0; k <= max_depth; ++k) {
        long side = 1L << k;
        long count = grid.dim == 1 ? side : side * side;
        double cube_vol = std::pow(width * std::ldexp(1.0, -k), grid.dim);
        double scale = std::pow(cube_vol, alpha / grid.dim - m);
        auto& layer = pyramid.value[static_cast<std::size_t>(k)];
        layer.assign(static_cast<std::size_t>(count), 0.0);
        for (long j = 0; j < count; ++j) {
            double v = scale;
            for (int i = 0; i < m; ++i)
                v *= integral[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]
                             [static_cast<std::size_t>(j)];
            layer[static_cast<std::size_t>(j)] = v;
        }
    }
    return pyramid;
}

GridField fractional_maximal(std::span<const GridField> f, double alpha,
                             const CubeFamily& cubes) {
    if (f.empty()) throw std::invalid_argument("fractional_maximal: no input fields");
    if (cubes.cubes.empty()) throw std::invalid_argument("fractional_maximal: empty cube family");
    const DomainGrid& grid = f.front().grid;
    int m = static_cast<int>(f.size());
    check_alpha(alpha, m, grid.dim);
    auto fields = as_pointers(f);
    double cell_vol = grid.cell_volume();

    GridField out(grid, 0.0);
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, grid);
        if (box.empty()) continue;
        double value = std::pow(cube.volume(grid.dim), alpha / grid.dim - m);
        for (const GridField* field : fields) {
            double sum = 0.0;
            for_each_cell(box, grid, [&](long c) { sum += std::abs((*field)[c]); });
            value *= sum * cell_vol;
        }
        for_each_cell(box, grid, [&](long c) { out[c] = std::max(out[c], value); });
    }
    return out;
}

GridField fractional_average(std::span<const GridField> f, double alpha, const DyadicCube& cube) {
    if (f.empty()) throw std::invalid_argument("fractional_average: no input fields");
    const DomainGrid& grid = f.front().grid;
    check_alpha(alpha, static_cast<int>(f.size()), grid.dim);
    double value = std::pow(cube.volume(grid.dim), alpha / grid.dim);
    for (const auto& field : f) {
        double sum = 0.0;
        CellBox box = cell_box(cube, grid);
        for_each_cell(box, grid, [&](long c) { sum += std::abs(field[c]); });
        value *= sum * grid.cell_volume() / cube.volume(grid.dim);
    }
    GridField out(grid, 0.0);
    CellBox box = cell_box(cube, grid);
    for_each_cell(box, grid, [&](long c) { out[c] = value; });
    return out;
}

GridField fractional_integral(std::span<const GridField> f, double alpha, long tuple_budget) {
    if (f.empty()) throw std::invalid_argument("fractional_integral: no input fields");
    const DomainGrid& grid = f.front().grid;
    int m = static_cast<int>(f.size());
    if (!(alpha > 0.0) || alpha >= static_cast<double>(m * grid.dim))
        throw std::invalid_argument("fractional_integral: alpha must lie in (0, m n)");
    long cells = grid.cell_count();
    double tuples = std::pow(static_cast<double>(cells), m);
    if (tuples > static_cast<double>(tuple_budget))
        throw std::invalid_argument(
            "fractional_integral: N^{mn} source tuples exceed the configured budget; "
            "pass a larger tuple_budget to override");

    double kernel_power = alpha - static_cast<double>(m * grid.dim);
    double h = grid.cell_size();
    double diag = static_cast<double>(m) * 0.5 * h; // regularized all-coincident distance
    double tuple_volume = std::pow(grid.cell_volume(), m);
    auto fields = as_pointers(f);

    // precomputed centers
    std::vector<std::array<double, 2>> centers(static_cast<std::size_t>(cells));
    for (long c = 0; c < cells; ++c) centers[static_cast<std::size_t>(c)] = grid.cell_center(c);

    GridField out(grid, 0.0);
    parallel_for(static_cast<std::size_t>(cells), [&](std::size_t lo_i, std::size_t hi_i) {
        std::vector<long> tuple(static_cast<std::size_t>(m), 0);
        for (std::size_t xi = lo_i; xi < hi_i; ++xi) {
            auto x = centers[xi];
            double acc = 0.0;
            // odometer over source tuples (y_1, ..., y_m)
            std::fill(tuple.begin(), tuple.end(), 0L);
            while (true) {
                double prod = 1.0;
                double dist = 0.0;
                for (int i = 0; i < m; ++i) {
                    long y = tuple[static_cast<std::size_t>(i)];
                    prod *= std::abs((*fields[static_cast<std::size_t>(i)])[y]);
                    if (prod == 0.0) break;
                    auto yc = centers[static_cast<std::size_t>(y)];
                    dist += grid.dim == 1 ? std::abs(x[0] - yc[0])
                                          : std::hypot(x[0] - yc[0], x[1] - yc[1]);
                }
                if (prod != 0.0) {
                    if (dist == 0.0) dist = diag;
                    acc += prod * std::pow(dist, kernel_power);
                }
                int axis = 0;
                while (axis < m) {
                    if (++tuple[static_cast<std::size_t>(axis)] < cells) break;
                    tuple[static_cast<std::size_t>(axis)] = 0;
                    ++axis;
                }
                if (axis == m) break;
            }
            out[static_cast<long>(xi)] = acc * tuple_volume;
        }
    }, 64);
    return out;
}

GridField sharp_maximal(const GridField& f, double delta, const CubeFamily& cubes) {
    if (!(delta > 0.0)) throw std::invalid_argument("sharp_maximal: delta must be positive");
    const DomainGrid& grid = f.grid;
    GridField powered(grid, 0.0);
    for (long c = 0; c < f.size(); ++c) powered[c] = std::pow(std::abs(f[c]), delta);

    GridField out(grid, 0.0);
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, grid);
        long count = box.count(grid.dim);
        if (count == 0) continue;
        double mean = 0.0;
        for_each_cell(box, grid, [&](long c) { mean += powered[c]; });
        mean /= static_cast<double>(count);
        double osc = 0.0;
        for_each_cell(box, grid, [&](long c) { osc += std::abs(powered[c] - mean); });
        osc /= static_cast<double>(count);
        for_each_cell(box, grid, [&](long c) { out[c] = std::max(out[c], osc); });
    }
    for (long c = 0; c < out.size(); ++c) out[c] = std::pow(out[c], 1.0 / delta);
    return out;
}

GridField weighted_dyadic_maximal(const GridField& f, const GridField& sigma,
                                  const CubeFamily& cubes) {
    validate_weight(sigma, "weighted_dyadic_maximal");
    const DomainGrid& grid = f.grid;
    GridField out(grid, 0.0);
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, grid);
        if (box.empty()) continue;
        double num = 0.0, den = 0.0;
        for_each_cell(box, grid, [&](long c) {
            num += std::abs(f[c]) * sigma[c];
            den += sigma[c];
        });
        double value = num / den;
        for_each_cell(box, grid, [&](long c) { out[c] = std::max(out[c], value); });
    }
    return out;
}

CoverCheckResult dyadic_shifted_cover_check(std::span<const GridField> f, double alpha,
                                            const DomainGrid& grid, int max_depth) {
    int m = static_cast<int>(f.size());
    check_alpha(alpha, m, grid.dim);
    if (max_depth < 0 || max_depth > grid.max_depth())
        throw std::invalid_argument("dyadic_shifted_cover_check: bad depth");

    GridField full = fractional_maximal(f, alpha, aligned_family(grid));

    GridField shifted_sum(grid, 0.0);
    GridField dyadic0(grid, 0.0);
    for (const auto& shift : all_shifts(grid.dim)) {
        std::array<std::array<double, 2>, 1> one{shift};
        CubeFamily family = enumerate_cubes(grid, one, max_depth);
        GridField part = fractional_maximal(f, alpha, family);
        bool unshifted = shift[0] == 0.0 && shift[1] == 0.0;
        if (unshifted) dyadic0 = part;
        for (long c = 0; c < shifted_sum.size(); ++c) shifted_sum[c] += part[c];
    }

    CoverCheckResult result;
    result.ratio = GridField(grid, 0.0);
    for (long c = 0; c < full.size(); ++c) {
        if (dyadic0[c] > full[c]) {
            result.dyadic_dominated = false;
            result.max_dyadic_excess = std::max(result.max_dyadic_excess, dyadic0[c] - full[c]);
        }
        if (shifted_sum[c] > 0.0) {
            result.ratio[c] = full[c] / shifted_sum[c];
            result.max_ratio = std::max(result.max_ratio, result.ratio[c]);
        } else if (full[c] > 0.0) {
            throw std::runtime_error("cover check: shifted sum vanishes where the full operator "
                                     "does not");
        }
    }
    return result;
}

namespace {

struct LevelSearch {
    const DyadicValuePyramid* pyramid;
    const DomainGrid* grid;
    double threshold = 0.0;
    std::vector<std::array<long, 2>> claimed; // corners at their depth
    std::vector<int> claimed_depth;

    void descend(int depth, std::array<long, 2> corner) {
        if (pyramid->cube_value(depth, corner) > threshold) {
            claimed.push_back(corner);
            claimed_depth.push_back(depth);
            return;
        }
        if (depth == pyramid->max_depth) return;
        if (grid->dim == 1) {
            descend(depth + 1, {2 * corner[0], 0});
            descend(depth + 1, {2 * corner[0] + 1, 0});
        } else {
            for (long e0 : {0L, 1L})
                for (long e1 : {0L, 1L})
                    descend(depth + 1, {2 * corner[0] + e0, 2 * corner[1] + e1});
        }
    }
};

std::vector<GridField> pointwise_products(std::span<const GridField> f,
                                          std::span<const GridField> sigma) {
    if (f.size() != sigma.size())
        throw std::invalid_argument("cz_decompose: f and sigma counts differ");
    std::vector<GridField> out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        GridField g(f[i].grid, 0.0);
        for (long c = 0; c < g.size(); ++c) {
            g[c] = f[i][c] * sigma[i][c];
            if (g[c] < 0.0)
                throw std::invalid_argument("cz_decompose: f_i sigma_i must be nonnegative");
        }
        out.push_back(std::move(g));
    }
    return out;
}

} // namespace

CZDecomposition cz_decompose(std::span<const GridField> f, std::span<const GridField> sigma,
                             double alpha, double a, const CubeFamily& dyadic_cubes,
                             std::optional<std::pair<int, int>> k_range) {
    const DomainGrid& grid = dyadic_cubes.grid;
    int m = static_cast<int>(f.size());
    check_alpha(alpha, m, grid.dim);
    double upper_factor = std::pow(2.0, static_cast<double>(m * grid.dim) - alpha);
    if (!(a > upper_factor))
        throw std::invalid_argument("cz_decompose: base a must exceed 2^{mn - alpha}");
    if (dyadic_cubes.shifts.size() != 1 || dyadic_cubes.shifts[0][0] != 0.0 ||
        dyadic_cubes.shifts[0][1] != 0.0)
        throw std::invalid_argument("cz_decompose: family must be the unshifted dyadic one");

    std::vector<GridField> products = pointwise_products(f, sigma);
    DyadicValuePyramid pyramid =
        product_average_pyramid(products, alpha, dyadic_cubes.max_depth);

    CZDecomposition dec;
    dec.grid = grid;
    dec.a = a;
    dec.alpha = alpha;
    dec.m = m;
    dec.max_depth = dyadic_cubes.max_depth;

    double vmax = 0.0;
    double vmin_pos = std::numeric_limits<double>::infinity();
    for (const auto& layer : pyramid.value)
        for (double v : layer) {
            vmax = std::max(vmax, v);
            if (v > 0.0) vmin_pos = std::min(vmin_pos, v);
        }
    if (vmax == 0.0) return dec; // identically zero input: empty at every level

    double root_value = pyramid.cube_value(0, {0, 0});
    double log_a = std::log(a);
    if (k_range) {
        dec.k_lo = k_range->first;
        dec.k_hi = k_range->second;
    } else {
        dec.k_lo = static_cast<int>(std::floor(std::log(vmin_pos) / log_a));
        dec.k_hi = static_cast<int>(std::ceil(std::log(vmax) / log_a)) - 1;
        while (std::pow(a, dec.k_hi + 1) < vmax) ++dec.k_hi;
        while (dec.k_hi >= dec.k_lo && !(std::pow(a, dec.k_hi) < vmax)) --dec.k_hi;
        // On the truncated domain the root cube has no parent to certify the
        // upper stopping bound; drop levels where the root itself would
        // violate it. (On R^n a strictly larger cube would have been
        // selected instead.)
        if (root_value > 0.0) {
            int k_root = static_cast<int>(
                std::ceil((std::log(root_value) - std::log(upper_factor)) / log_a));
            while (std::pow(a, k_root) * upper_factor < root_value) ++k_root;
            while (std::pow(a, k_root - 1) * upper_factor >= root_value) --k_root;
            if (k_root > dec.k_lo) {
                dec.k_lo = k_root;
                dec.level_range_clamped = true;
            }
        }
    }
    if (dec.k_hi < dec.k_lo) return dec;

    long cells = grid.cell_count();
    std::vector<char> omega_above(static_cast<std::size_t>(cells), 0); // Omega_{k+1}
    std::vector<char> claimed_any(static_cast<std::size_t>(cells), 0);

    std::vector<CZLevel> reversed;
    for (int k = dec.k_hi; k >= dec.k_lo; --k) {
        CZLevel level;
        level.k = k;
        level.threshold = std::pow(a, k);

        LevelSearch search;
        search.pyramid = &pyramid;
        search.grid = &grid;
        search.threshold = level.threshold;
        search.descend(0, {0, 0});

        std::vector<char> omega_here(static_cast<std::size_t>(cells), 0);
        for (std::size_t i = 0; i < search.claimed.size(); ++i) {
            StoppingCube stop;
            int depth = search.claimed_depth[i];
            stop.cube = make_dyadic_cube(grid, {0.0, 0.0}, depth, search.claimed[i]);
            stop.product = pyramid.cube_value(depth, search.claimed[i]);
            if (!(stop.product > level.threshold) ||
                !(stop.product <= upper_factor * level.threshold))
                throw std::runtime_error("cz_decompose: stopping inequality violated");
            CellBox box = cell_box(stop.cube, grid);
            for_each_cell(box, grid, [&](long c) {
                auto cu = static_cast<std::size_t>(c);
                if (omega_here[cu])
                    throw std::runtime_error("cz_decompose: level cubes overlap");
                omega_here[cu] = 1;
                if (!omega_above[cu]) {
                    if (claimed_any[cu])
                        throw std::runtime_error("cz_decompose: residual sets overlap");
                    claimed_any[cu] = 1;
                    stop.residual_cells.push_back(c);
                }
            });
            level.cubes.push_back(std::move(stop));
        }
        // nesting Omega_{k+1} subset of Omega_k
        for (long c = 0; c < cells; ++c)
            if (omega_above[static_cast<std::size_t>(c)] && !omega_here[static_cast<std::size_t>(c)])
                throw std::runtime_error("cz_decompose: level sets fail to nest");
        omega_above = std::move(omega_here);
        reversed.push_back(std::move(level));
    }
    dec.levels.assign(reversed.rbegin(), reversed.rend());
    return dec;
}

SparseDominationResult sparse_domination_check(const CZDecomposition& dec,
                                               std::span<const GridField> f,
                                               std::span<const GridField> sigma, double alpha) {
    std::vector<GridField> products = pointwise_products(f, sigma);
    DyadicValuePyramid pyramid = product_average_pyramid(products, alpha, dec.max_depth);
    GridField maximal = pyramid.maximal_field();

    GridField sparse(dec.grid, 0.0);
    for (const auto& level : dec.levels)
        for (const auto& stop : level.cubes)
            for (long c : stop.residual_cells) sparse[c] += stop.product;

    SparseDominationResult result;
    for (long c = 0; c < sparse.size(); ++c) {
        if (sparse[c] > 0.0) {
            ++result.covered_cells;
            result.max_ratio = std::max(result.max_ratio, maximal[c] / sparse[c]);
        } else if (maximal[c] > 0.0) {
            ++result.uncovered_positive_cells;
        }
    }
    return result;
}

} // namespace varlex
