#include "varlex/generators.hpp"
#include "varlex/lebesgue.hpp"
#include "varlex/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace varlex;

namespace {

const DomainGrid kGrid = build_domain(1, 0.5, 256);

GridField random_field(Rng& rng, double scale = 1.0, bool signed_values = false) {
    GridField f(kGrid, 0.0);
    for (long c = 0; c < f.size(); ++c)
        f[c] = scale * (signed_values ? rng.uniform(-1.0, 1.0) : rng.uniform());
    return f;
}

} // namespace

TEST_CASE("modular of simple fields") {
    ExponentField p = make_exponent(kGrid, "sine", 2.0, 0.5);
    CHECK(modular(GridField(kGrid, 1.0), p) == doctest::Approx(1.0)); // 1^p = 1, |domain| = 1
    ExponentField two = ExponentField::constant(kGrid, 2.0);
    CHECK(modular(GridField(kGrid, 2.0), two) == doctest::Approx(4.0));
}

TEST_CASE("modular matches the per-cell oracle") {
    Rng rng(3);
    ExponentField p = make_exponent(kGrid, "sine", 2.2, 0.6);
    GridField f = random_field(rng, 3.0, true);
    double oracle = 0.0;
    for (long c = 0; c < f.size(); ++c)
        oracle += std::pow(std::abs(f[c]), p[c]) * kGrid.cell_volume();
    CHECK(modular(f, p) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("luxemburg norm: trivial cases") {
    ExponentField two = ExponentField::constant(kGrid, 2.0);
    CHECK(luxemburg_norm(GridField(kGrid, 1.0), two).norm == doctest::Approx(1.0).epsilon(1e-10));
    ExponentField three = ExponentField::constant(kGrid, 3.0);
    CHECK(luxemburg_norm(GridField(kGrid, 0.37), three).norm ==
          doctest::Approx(0.37).epsilon(1e-10));
    CHECK(luxemburg_norm(GridField(kGrid, 0.0), three).norm == 0.0);
}

TEST_CASE("luxemburg norm solves the scalar root-find problem for f = 1") {
    // for f = 1 the norm solves integral lambda^{-p(x)} dx = 1; bisect that
    // equation independently in plain scalar arithmetic
    ExponentField p = make_exponent(kGrid, "sine", 2.0, 0.5);
    double lo = 0.5, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double value = 0.0;
        for (long c = 0; c < kGrid.cell_count(); ++c)
            value += std::pow(mid, -p[c]) * kGrid.cell_volume();
        (value > 1.0 ? lo : hi) = mid;
    }
    double oracle = 0.5 * (lo + hi);
    CHECK(luxemburg_norm(GridField(kGrid, 1.0), p).norm ==
          doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("modular at the returned norm is close to one") {
    Rng rng(17);
    for (int t = 0; t < 25; ++t) {
        ExponentField p = make_exponent(kGrid, "sine", rng.uniform(1.5, 3.0), 0.4);
        GridField f = random_field(rng, std::pow(10.0, rng.uniform(-3.0, 3.0)), true);
        LuxemburgResult r = luxemburg_norm(f, p);
        CHECK(std::abs(r.modular_at_norm - 1.0) <= 1e-9);
        CHECK(r.iterations <= 200);
    }
}

TEST_CASE("homogeneity on random pairs") {
    Rng rng(5);
    ExponentField p = make_exponent(kGrid, "sine", 2.1, 0.6);
    for (int t = 0; t < 100; ++t) {
        GridField f = random_field(rng, 1.0, true);
        double c = std::pow(10.0, rng.uniform(-2.0, 2.0));
        GridField cf(kGrid, 0.0);
        for (long i = 0; i < f.size(); ++i) cf[i] = c * f[i];
        double lhs = luxemburg_norm(cf, p).norm;
        double rhs = c * luxemburg_norm(f, p).norm;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("triangle inequality on random pairs") {
    Rng rng(29);
    ExponentField p = make_exponent(kGrid, "logdecay", 1.8, 0.8);
    for (int t = 0; t < 60; ++t) {
        GridField f = random_field(rng, 2.0, true);
        GridField g = random_field(rng, 2.0, true);
        GridField sum(kGrid, 0.0);
        for (long i = 0; i < f.size(); ++i) sum[i] = f[i] + g[i];
        CHECK(luxemburg_norm(sum, p).norm <=
              luxemburg_norm(f, p).norm + luxemburg_norm(g, p).norm + 1e-9);
    }
}

TEST_CASE("unit ball equivalence: norm <= 1 iff modular <= 1") {
    Rng rng(31);
    ExponentField p = make_exponent(kGrid, "sine", 2.4, 0.7);
    for (int t = 0; t < 100; ++t) {
        GridField f = random_field(rng, std::pow(10.0, rng.uniform(-1.0, 1.0)), true);
        double norm = luxemburg_norm(f, p).norm;
        double rho = modular(f, p);
        if (norm <= 1.0 - 1e-9) CHECK(rho <= 1.0 + 1e-9);
        if (rho <= 1.0 - 1e-9) CHECK(norm <= 1.0 + 1e-9);
    }
}

TEST_CASE("monotone field sequences have monotone converging norms") {
    Rng rng(37);
    ExponentField p = make_exponent(kGrid, "sine", 2.0, 0.5);
    GridField f = random_field(rng, 2.0);
    double limit = luxemburg_norm(f, p).norm;
    double previous = 0.0;
    for (double s : {0.25, 0.5, 0.75, 1.0}) {
        GridField fk(kGrid, 0.0);
        for (long c = 0; c < f.size(); ++c) fk[c] = s * f[c];
        double norm = luxemburg_norm(fk, p).norm;
        CHECK(norm >= previous - 1e-12);
        previous = norm;
    }
    CHECK(previous == doctest::Approx(limit).epsilon(1e-10));
}

TEST_CASE("weighted norm is the norm of the product") {
    Rng rng(41);
    ExponentField p = make_exponent(kGrid, "sine", 2.0, 0.5);
    GridField f = random_field(rng, 1.5, true);
    GridField w = random_log_uniform_weight(kGrid, 0.7, rng);
    GridField wf(kGrid, 0.0);
    for (long c = 0; c < f.size(); ++c) wf[c] = w[c] * f[c];
    CHECK(weighted_norm(f, p, w).norm ==
          doctest::Approx(luxemburg_norm(wf, p).norm).epsilon(1e-12));

    CHECK(weighted_norm(f, p, GridField(kGrid, 1.0)).norm ==
          doctest::Approx(luxemburg_norm(f, p).norm).epsilon(1e-12));

    ExponentField two = ExponentField::constant(kGrid, 2.0);
    CHECK(weighted_norm(GridField(kGrid, 1.0), two, GridField(kGrid, 2.0)).norm ==
          doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("Hoelder pair on trivial inputs") {
    ExponentField two = ExponentField::constant(kGrid, 2.0);
    HolderPair unit = holder_check(GridField(kGrid, 1.0), GridField(kGrid, 1.0), two);
    CHECK(unit.lhs == doctest::Approx(1.0));
    CHECK(unit.rhs == doctest::Approx(4.0).epsilon(1e-9));

    HolderPair zero = holder_check(GridField(kGrid, 0.0), GridField(kGrid, 1.0), two);
    CHECK(zero.lhs == 0.0);
}

TEST_CASE("Hoelder inequality holds on 200 random pairs") {
    Rng rng(43);
    for (int t = 0; t < 200; ++t) {
        ExponentField p = make_exponent(kGrid, "sine", rng.uniform(1.6, 2.8), 0.4);
        GridField f = random_field(rng, std::pow(10.0, rng.uniform(-1.5, 1.5)), true);
        GridField g = random_field(rng, std::pow(10.0, rng.uniform(-1.5, 1.5)), true);
        HolderPair pair = holder_check(f, g, p);
        CHECK(pair.lhs <= pair.rhs * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("classical duality recovers the norm exactly for constant p") {
    Rng rng(47);
    ExponentField p = ExponentField::constant(kGrid, 2.5);
    for (int t = 0; t < 20; ++t) {
        GridField f = random_field(rng, 2.0, true);
        double norm = luxemburg_norm(f, p).norm;
        double bound = dual_lower_bound(f, p, 0, rng); // extremal candidate only
        CHECK(bound == doctest::Approx(norm).epsilon(1e-8));
    }
}

TEST_CASE("duality sandwich on variable exponents") {
    Rng rng(53);
    for (int t = 0; t < 40; ++t) {
        ExponentField p = make_exponent(kGrid, "sine", rng.uniform(1.7, 2.6), 0.5);
        GridField f = random_field(rng, 1.0, true);
        double norm = luxemburg_norm(f, p).norm;
        double bound = dual_lower_bound(f, p, 15, rng);
        CHECK(bound >= norm * (1.0 - 1e-8));                     // extremal included
        CHECK(bound <= holder_constant(p) * norm * (1.0 + 1e-8)); // sharp Hoelder cap
    }
    GridField zero(kGrid, 0.0);
    ExponentField two = ExponentField::constant(kGrid, 2.0);
    CHECK(dual_lower_bound(zero, two, 3, rng) == 0.0);
}

TEST_CASE("modular-norm comparison degenerate cases") {
    ExponentField two = ExponentField::constant(kGrid, 2.0);
    GridField f(kGrid, 1.0); // norm exactly 1
    ModularNormBounds b = modular_norm_bounds(f, two);
    CHECK(b.lower == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.upper == doctest::Approx(1.0).epsilon(1e-9));

    // constant p: both bounds coincide with the norm
    GridField g(kGrid, 3.7);
    ModularNormBounds bg = modular_norm_bounds(g, two);
    CHECK(bg.lower == doctest::Approx(bg.norm).epsilon(1e-9));
    CHECK(bg.upper == doctest::Approx(bg.norm).epsilon(1e-9));
}

TEST_CASE("modular-norm comparison holds on 200 random fields") {
    Rng rng(59);
    for (int t = 0; t < 200; ++t) {
        ExponentField p = make_exponent(kGrid, "sine", rng.uniform(1.6, 3.0), 0.5);
        GridField f = random_field(rng, std::pow(10.0, rng.uniform(-2.0, 2.0)), true);
        ModularNormBounds b = modular_norm_bounds(f, p);
        CHECK(b.holds(1e-9 * std::max(1.0, b.norm)));
    }
}

TEST_CASE("BMO norm of canonical fields") {
    CubeFamily family = dyadic_family(kGrid, kGrid.max_depth());

    CHECK(bmo_norm(GridField(kGrid, 4.2), family) <= 1e-12);

    // half indicator: oscillation 1/2 attained on the whole domain
    GridField half(kGrid, 0.0);
    for (long c = 0; c < kGrid.cell_count() / 2; ++c) half[c] = 1.0;
    CHECK(bmo_norm(half, family) == doctest::Approx(0.5));

    // linear field: mean oscillation of a cube of side l is l/4, maximal at
    // the root, and exact for even cell counts
    GridField linear(kGrid, 0.0);
    for (long c = 0; c < kGrid.cell_count(); ++c) linear[c] = kGrid.cell_center(c)[0];
    CHECK(bmo_norm(linear, family) == doctest::Approx(0.25));
}

TEST_CASE("BMO norm matches an exhaustive cube scan") {
    Rng rng(61);
    GridField b = random_field(rng, 1.0, true);
    CubeFamily family = dyadic_family(kGrid, 5);
    double oracle = 0.0;
    for (const auto& cube : family.cubes) {
        CellBox box = cell_box(cube, kGrid);
        long count = box.count(1);
        double mean = 0.0;
        for_each_cell(box, kGrid, [&](long c) { mean += b[c]; });
        mean /= static_cast<double>(count);
        double osc = 0.0;
        for_each_cell(box, kGrid, [&](long c) { osc += std::abs(b[c] - mean); });
        oracle = std::max(oracle, osc / static_cast<double>(count));
    }
    CHECK(bmo_norm(b, family) == doctest::Approx(oracle).epsilon(1e-13));
}
