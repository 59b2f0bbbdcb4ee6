#include "varlex/generators.hpp"
#include "varlex/lebesgue.hpp"
#include "varlex/operators.hpp"
#include "varlex/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace varlex;

namespace {

const DomainGrid kGrid = build_domain(1, 0.5, 64);
const CubeFamily kDyadic = dyadic_family(kGrid, kGrid.max_depth());

GridField left_half_indicator(const DomainGrid& g) {
    GridField f(g, 0.0);
    for (long c = 0; c < g.cell_count() / 2; ++c) f[c] = 1.0;
    return f;
}

} // namespace

TEST_CASE("pyramid values agree with integrate_over") {
    Rng rng(3);
    std::vector<GridField> f{random_probe(kGrid, rng), random_probe(kGrid, rng)};
    double alpha = 0.5;
    DyadicValuePyramid pyramid = product_average_pyramid(f, alpha);
    for (int k = 0; k <= kGrid.max_depth(); k += 2) {
        for (long j = 0; j < (1L << k); j += 3) {
            DyadicCube cube = make_dyadic_cube(kGrid, {0.0, 0.0}, k, {j, 0});
            double oracle = std::pow(cube.side, alpha - 2.0) * integrate_over(cube, f[0]) *
                            integrate_over(cube, f[1]);
            CHECK(pyramid.cube_value(k, {j, 0}) == doctest::Approx(oracle).epsilon(1e-12));
        }
    }
}

TEST_CASE("dyadic maximal of a half indicator") {
    GridField f = left_half_indicator(kGrid);
    std::vector<GridField> fs{f};
    GridField m = fractional_maximal(fs, 0.0, kDyadic);
    for (long c = 0; c < kGrid.cell_count(); ++c) {
        double expected = c < kGrid.cell_count() / 2 ? 1.0 : 0.5;
        CHECK(m[c] == doctest::Approx(expected));
    }
}

TEST_CASE("maximal of a constant is the constant") {
    std::vector<GridField> fs{GridField(kGrid, 2.7)};
    GridField m = fractional_maximal(fs, 0.0, kDyadic);
    for (long c = 0; c < kGrid.cell_count(); ++c) CHECK(m[c] == doctest::Approx(2.7));
}

TEST_CASE("bilinear maximal of matching indicators") {
    DyadicCube q0 = make_dyadic_cube(kGrid, {0.0, 0.0}, 2, {1, 0});
    GridField f = indicator_probe(kGrid, q0);
    std::vector<GridField> fs{f, f};
    double alpha = 0.6;
    GridField m = fractional_maximal(fs, alpha, kDyadic);
    double expected = std::pow(q0.side, alpha); // attained by Q0 itself
    for_each_cell(cell_box(q0, kGrid), kGrid,
                  [&](long c) { CHECK(m[c] == doctest::Approx(expected).epsilon(1e-12)); });
    CHECK_THROWS_AS(fractional_maximal(fs, 2.0, kDyadic), std::invalid_argument);
}

TEST_CASE("maximal operator matches an exhaustive cube enumeration") {
    Rng rng(11);
    std::vector<GridField> fs{random_probe(kGrid, rng), random_probe(kGrid, rng)};
    double alpha = 0.4;
    CubeFamily family = enumerate_cubes(kGrid, all_shifts(1), 4);
    GridField m = fractional_maximal(fs, alpha, family);
    for (long c = 0; c < kGrid.cell_count(); c += 5) {
        auto x = kGrid.cell_center(c);
        double best = 0.0;
        for (const auto& cube : family.cubes) {
            if (!cube.contains(x, 1)) continue;
            double v = std::pow(cube.volume(1), alpha - 2.0) * integrate_over(cube, fs[0]) *
                       integrate_over(cube, fs[1]);
            best = std::max(best, v);
        }
        CHECK(m[c] == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("sublinearity in each slot") {
    Rng rng(13);
    std::vector<GridField> base{random_probe(kGrid, rng), random_probe(kGrid, rng)};
    GridField g = random_probe(kGrid, rng);
    GridField sum(kGrid, 0.0);
    for (long c = 0; c < sum.size(); ++c) sum[c] = base[0][c] + g[c];
    std::vector<GridField> with_sum{sum, base[1]};
    std::vector<GridField> with_g{g, base[1]};
    GridField lhs = fractional_maximal(with_sum, 0.3, kDyadic);
    GridField a = fractional_maximal(base, 0.3, kDyadic);
    GridField b = fractional_maximal(with_g, 0.3, kDyadic);
    for (long c = 0; c < lhs.size(); ++c) CHECK(lhs[c] <= a[c] + b[c] + 1e-12);
}

TEST_CASE("enlarging the family never decreases the maximal function") {
    Rng rng(17);
    std::vector<GridField> fs{random_probe(kGrid, rng)};
    GridField shallow = fractional_maximal(fs, 0.2, dyadic_family(kGrid, 3));
    GridField deep = fractional_maximal(fs, 0.2, dyadic_family(kGrid, 6));
    for (long c = 0; c < shallow.size(); ++c) CHECK(deep[c] >= shallow[c] - 1e-15);
}

TEST_CASE("averaging operator values") {
    DyadicCube b = make_dyadic_cube(kGrid, {0.0, 0.0}, 1, {1, 0});
    GridField f = indicator_probe(kGrid, b);
    std::vector<GridField> fs{f};
    GridField avg = fractional_average(fs, 0.0, b);
    for (long c = 0; c < kGrid.cell_count(); ++c) {
        double expected = b.contains(kGrid.cell_center(c), 1) ? 1.0 : 0.0;
        CHECK(avg[c] == doctest::Approx(expected));
    }

    // average sits below the maximal function on the cube
    Rng rng(23);
    std::vector<GridField> rand{random_probe(kGrid, rng)};
    GridField avg2 = fractional_average(rand, 0.3, b);
    GridField max2 = fractional_maximal(rand, 0.3, kDyadic);
    for (long c = 0; c < kGrid.cell_count(); ++c) CHECK(avg2[c] <= max2[c] + 1e-12);

    // bilinear direct-average oracle on the right half
    GridField one(kGrid, 1.0);
    GridField quarter(kGrid, 0.0);
    for (long c = kGrid.cell_count() / 2; c < 3 * kGrid.cell_count() / 4; ++c) quarter[c] = 1.0;
    std::vector<GridField> pair{one, quarter};
    double alpha = 0.5;
    GridField avg3 = fractional_average(pair, alpha, b);
    double expected = std::pow(b.side, alpha) * 1.0 * 0.5;
    for_each_cell(cell_box(b, kGrid), kGrid,
                  [&](long c) { CHECK(avg3[c] == doctest::Approx(expected).epsilon(1e-12)); });
}

TEST_CASE("fractional integral: positivity and far-field asymptotics") {
    DomainGrid wide = build_domain(1, 1.0, 128);
    GridField f = left_half_indicator(wide); // support [-1, 0)
    std::vector<GridField> fs{f};
    double alpha = 0.5;
    GridField integral = fractional_integral(fs, alpha);
    for (long c = 0; c < wide.cell_count(); ++c) CHECK(integral[c] >= 0.0);

    // closed form at cells right of the support: ((x+1)^a - x^a) / a
    for (long c = 3 * wide.cell_count() / 4; c < wide.cell_count(); c += 7) {
        double x = wide.cell_center(c)[0];
        double exact = (std::pow(x + 1.0, alpha) - std::pow(x, alpha)) / alpha;
        CHECK(integral[c] == doctest::Approx(exact).epsilon(5e-3)); // first-order midpoint rule
    }

    CHECK_THROWS_AS(fractional_integral(fs, alpha, 100), std::invalid_argument); // budget
}

TEST_CASE("maximal is dominated by the fractional integral, stably") {
    double constants[2];
    int idx = 0;
    for (long n : {64L, 128L}) {
        DomainGrid g = build_domain(1, 0.5, n);
        GridField f = bump_probe(g, 0.1, 0.15, 0.1);
        std::vector<GridField> fs{f};
        GridField mx = fractional_maximal(fs, 0.5, dyadic_family(g, g.max_depth()));
        GridField in = fractional_integral(fs, 0.5);
        double c = 0.0;
        for (long cell = 0; cell < g.cell_count(); ++cell)
            c = std::max(c, mx[cell] / in[cell]);
        constants[idx++] = c;
    }
    CHECK(std::abs(constants[1] - constants[0]) / constants[1] < 0.1);
}

TEST_CASE("sharp maximal function") {
    CHECK(sharp_maximal(GridField(kGrid, 3.0), 1.0, kDyadic).max_abs() == 0.0);

    GridField f = left_half_indicator(kGrid);
    GridField sharp = sharp_maximal(f, 1.0, kDyadic);
    for (long c = 0; c < kGrid.cell_count(); ++c)
        CHECK(sharp[c] == doctest::Approx(0.5)); // root cube oscillation wins everywhere

    // exhaustive oracle on random data
    Rng rng(29);
    GridField g = random_probe(kGrid, rng);
    GridField sharp_g = sharp_maximal(g, 1.0, kDyadic);
    for (long c = 0; c < kGrid.cell_count(); c += 9) {
        double best = 0.0;
        for (const auto& cube : kDyadic.cubes) {
            if (!cube.contains(kGrid.cell_center(c), 1)) continue;
            CellBox box = cell_box(cube, kGrid);
            long count = box.count(1);
            double mean = 0.0;
            for_each_cell(box, kGrid, [&](long cc) { mean += g[cc]; });
            mean /= static_cast<double>(count);
            double osc = 0.0;
            for_each_cell(box, kGrid, [&](long cc) { osc += std::abs(g[cc] - mean); });
            best = std::max(best, osc / static_cast<double>(count));
        }
        CHECK(sharp_g[c] == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("sharp maximal sits below the power-adjusted maximal") {
    Rng rng(31);
    GridField f = random_probe(kGrid, rng);
    for (double delta : {1.0, 0.5}) {
        GridField powered(kGrid, 0.0);
        for (long c = 0; c < f.size(); ++c) powered[c] = std::pow(std::abs(f[c]), delta);
        std::vector<GridField> fs{powered};
        GridField mx = fractional_maximal(fs, 0.0, kDyadic);
        GridField sharp = sharp_maximal(f, delta, kDyadic);
        double factor = std::pow(2.0, 1.0 / delta);
        for (long c = 0; c < f.size(); ++c)
            CHECK(sharp[c] <= factor * std::pow(mx[c], 1.0 / delta) + 1e-12);
    }
}

TEST_CASE("weighted dyadic maximal") {
    Rng rng(37);
    GridField f = random_probe(kGrid, rng);

    // sigma = 1 collapses to the unweighted dyadic maximal
    GridField unweighted = fractional_maximal(std::vector<GridField>{f}, 0.0, kDyadic);
    GridField weighted = weighted_dyadic_maximal(f, GridField(kGrid, 1.0), kDyadic);
    for (long c = 0; c < f.size(); ++c)
        CHECK(weighted[c] == doctest::Approx(unweighted[c]).epsilon(1e-12));

    GridField constant = weighted_dyadic_maximal(GridField(kGrid, 1.4),
                                                 random_log_uniform_weight(kGrid, 0.5, rng),
                                                 kDyadic);
    for (long c = 0; c < constant.size(); ++c) CHECK(constant[c] == doctest::Approx(1.4));
}

TEST_CASE("weighted dyadic maximal is L2(sigma)-bounded with constant p'") {
    Rng rng(41);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        GridField f(kGrid, 0.0);
        for (long c = 0; c < f.size(); ++c) f[c] = rng.uniform(-1.0, 1.0);
        GridField sigma = random_log_uniform_weight(kGrid, 0.8, rng);
        GridField m = weighted_dyadic_maximal(f, sigma, kDyadic);
        double num = 0.0, den = 0.0;
        for (long c = 0; c < f.size(); ++c) {
            num += m[c] * m[c] * sigma[c];
            den += f[c] * f[c] * sigma[c];
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    CHECK(worst <= 4.0);
}

TEST_CASE("stopping decomposition of the quarter indicator") {
    // f sigma = indicator of the first quarter, a = 4: at threshold 1/4 the
    // maximal cube with average above it is the left half
    DomainGrid g = build_domain(1, 0.5, 16);
    CubeFamily family = dyadic_family(g, g.max_depth());
    GridField f(g, 0.0);
    for (long c = 0; c < 4; ++c) f[c] = 1.0;
    std::vector<GridField> fs{f};
    std::vector<GridField> sigma{GridField(g, 1.0)};
    CZDecomposition dec =
        cz_decompose(fs, sigma, 0.0, 4.0, family, std::pair<int, int>{-1, -1});
    REQUIRE(dec.levels.size() == 1);
    REQUIRE(dec.levels[0].cubes.size() == 1);
    const StoppingCube& stop = dec.levels[0].cubes[0];
    CHECK(stop.cube.depth == 1);
    CHECK(stop.cube.corner[0] == 0);
    CHECK(stop.product == doctest::Approx(0.5));
    CHECK(stop.product > 0.25);        // strict lower
    CHECK(stop.product <= 2.0 * 0.25); // non-strict upper with 2^{mn-alpha} = 2
}

TEST_CASE("zero input yields an empty decomposition") {
    std::vector<GridField> fs{GridField(kGrid, 0.0)};
    std::vector<GridField> sigma{GridField(kGrid, 1.0)};
    CZDecomposition dec = cz_decompose(fs, sigma, 0.0, 4.0, kDyadic);
    CHECK(dec.levels.empty());
    SparseDominationResult sparse = sparse_domination_check(dec, fs, sigma, 0.0);
    CHECK(sparse.max_ratio == 0.0);
    CHECK(sparse.covered_cells == 0);
}

TEST_CASE("base below the doubling threshold is rejected") {
    std::vector<GridField> fs{GridField(kGrid, 1.0)};
    std::vector<GridField> sigma{GridField(kGrid, 1.0)};
    CHECK_THROWS_AS(cz_decompose(fs, sigma, 0.0, 1.5, kDyadic), std::invalid_argument);
    GridField negative(kGrid, -1.0);
    std::vector<GridField> bad{negative};
    CHECK_THROWS_AS(cz_decompose(bad, sigma, 0.0, 4.0, kDyadic), std::invalid_argument);
}

TEST_CASE("single-indicator sparse ratio stays below the base") {
    DomainGrid g = build_domain(1, 0.5, 256);
    CubeFamily family = dyadic_family(g, g.max_depth());
    GridField f(g, 0.0);
    f[17] = 1.0;
    std::vector<GridField> fs{f};
    std::vector<GridField> sigma{GridField(g, 1.0)};
    double a = 2.0 + 1.0; // 2^{mn - alpha} + 1 for m = 1, alpha = 0
    CZDecomposition dec = cz_decompose(fs, sigma, 0.0, a, family);
    SparseDominationResult sparse = sparse_domination_check(dec, fs, sigma, 0.0);
    CHECK(sparse.max_ratio <= a + 1e-12);
}

TEST_CASE("stopping inequalities replay exactly on every returned cube") {
    Rng rng(43);
    DomainGrid g = build_domain(1, 0.5, 512);
    CubeFamily family = dyadic_family(g, g.max_depth());
    double alpha = 0.5;
    double upper = std::pow(2.0, 2.0 - alpha);
    double a = upper + 1.0;
    for (int t = 0; t < 5; ++t) {
        std::vector<GridField> fs{spiky_probe(g, 20.0, rng), spiky_probe(g, 20.0, rng)};
        std::vector<GridField> sigma{random_log_uniform_weight(g, 0.6, rng),
                                     random_log_uniform_weight(g, 0.6, rng)};
        CZDecomposition dec = cz_decompose(fs, sigma, alpha, a, family);
        CHECK(!dec.levels.empty());
        for (const auto& level : dec.levels) {
            for (const auto& stop : level.cubes) {
                CHECK(stop.product > level.threshold);
                CHECK(stop.product <= upper * level.threshold);
                // independent recomputation through integrate_over
                double replay = std::pow(stop.cube.side, alpha - 2.0);
                for (int i = 0; i < 2; ++i) {
                    GridField prod(g, 0.0);
                    for (long c = 0; c < g.cell_count(); ++c)
                        prod[c] = fs[static_cast<std::size_t>(i)][c] *
                                  sigma[static_cast<std::size_t>(i)][c];
                    replay *= integrate_over(stop.cube, prod);
                }
                CHECK(stop.product == doctest::Approx(replay).epsilon(1e-11));
            }
        }
        SparseDominationResult sparse = sparse_domination_check(dec, fs, sigma, alpha);
        CHECK(sparse.max_ratio <= a * upper + 1e-9);
    }
}

TEST_CASE("cover check: zero input, domination, and ratio stability") {
    DomainGrid g = build_domain(1, 0.5, 128);
    std::vector<GridField> zero{GridField(g, 0.0)};
    CoverCheckResult z = dyadic_shifted_cover_check(zero, 0.0, g, g.max_depth());
    CHECK(z.max_ratio == 0.0);

    double ratios[2];
    int idx = 0;
    for (long n : {128L, 256L}) {
        DomainGrid gg = build_domain(1, 0.5, n);
        GridField f(gg, 0.0);
        f[n / 3] = 1.0; // single cell indicator
        std::vector<GridField> fs{f};
        CoverCheckResult cover = dyadic_shifted_cover_check(fs, 0.25, gg, gg.max_depth());
        CHECK(cover.dyadic_dominated);
        CHECK(cover.max_ratio >= 0.25); // the shifted sum has at most 2 terms in 1d
        CHECK(std::isfinite(cover.max_ratio));
        ratios[idx++] = cover.max_ratio;
    }
    CHECK(ratios[0] > 0.0);
    CHECK(ratios[1] > 0.0);
}
