#include "varlex/exponent.hpp"
#include "varlex/generators.hpp"
#include "varlex/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace varlex;

namespace {

const DomainGrid kGrid = build_domain(1, 0.5, 256);

ExponentField sine_exponent(double base = 2.0, double amp = 0.5) {
    return make_exponent(kGrid, "sine", base, amp);
}

} // namespace

TEST_CASE("class validation") {
    CHECK_THROWS_AS(ExponentField::constant(kGrid, 1.0), std::invalid_argument); // P needs > 1
    CHECK_NOTHROW(ExponentField::constant(kGrid, 1.0, ExponentClass::P1));
    CHECK_THROWS_AS(ExponentField::constant(kGrid, 0.0, ExponentClass::P0), std::invalid_argument);
    CHECK_NOTHROW(ExponentField::constant(kGrid, 0.5, ExponentClass::P0));
}

TEST_CASE("conjugate of constants") {
    ExponentField two = ExponentField::constant(kGrid, 2.0);
    CHECK(conjugate(two)[0] == doctest::Approx(2.0));
    ExponentField four = ExponentField::constant(kGrid, 4.0);
    CHECK(conjugate(four)[7] == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("conjugate matches the pointwise formula and is an involution") {
    ExponentField p = sine_exponent();
    ExponentField pc = conjugate(p);
    ExponentField back = conjugate(pc);
    for (long c = 0; c < kGrid.cell_count(); ++c) {
        CHECK(pc[c] == doctest::Approx(p[c] / (p[c] - 1.0)).epsilon(1e-14));
        CHECK(back[c] == doctest::Approx(p[c]).epsilon(1e-12));
    }
}

TEST_CASE("conjugate rejects exponents touching 1") {
    GridField v(kGrid, 2.0);
    v[3] = 1.0;
    ExponentField p = ExponentField::create(std::move(v), ExponentClass::P1);
    CHECK_THROWS_AS(conjugate(p), std::invalid_argument);
}

TEST_CASE("derive_q arithmetic and failure") {
    ExponentField two = ExponentField::constant(kGrid, 2.0);
    ExponentField q = derive_q(two, 0.25 * kGrid.dim, kGrid.dim, 1);
    CHECK(q[0] == doctest::Approx(4.0));

    ExponentField p32 = ExponentField::constant(kGrid, 1.5);
    CHECK_THROWS_AS(derive_q(p32, (2.0 / 3.0) * kGrid.dim, kGrid.dim, 1), std::invalid_argument);

    // alpha = 0 keeps p
    ExponentField p = sine_exponent();
    ExponentField same = derive_q(p, 0.0, kGrid.dim, 1);
    for (long c = 0; c < kGrid.cell_count(); ++c) CHECK(same[c] == doctest::Approx(p[c]));
}

TEST_CASE("derive_q then invert the shift returns p") {
    ExponentField p = sine_exponent(2.2, 0.4);
    double ratio = 0.2;
    ExponentField q = derive_q(p, ratio * kGrid.dim, kGrid.dim, 1);
    for (long c = 0; c < kGrid.cell_count(); ++c) {
        double recovered = 1.0 / (1.0 / q[c] + ratio);
        CHECK(recovered == doctest::Approx(p[c]).epsilon(1e-12));
    }
}

TEST_CASE("log-Hoelder constants vanish for constants") {
    LogHolderReport r = log_holder(ExponentField::constant(kGrid, 2.4));
    CHECK(r.local_constant == 0.0);
    CHECK(r.asymptotic_constant == 0.0);
}

TEST_CASE("pairwise scan oracle for the local constant") {
    ExponentField p = sine_exponent();
    LogHolderReport r = log_holder(p);
    double oracle = 0.0;
    double h = kGrid.cell_size();
    for (long a = 0; a < kGrid.cell_count(); ++a)
        for (long b = a + 1; b < kGrid.cell_count(); ++b) {
            double dist = std::abs(kGrid.cell_center(a)[0] - kGrid.cell_center(b)[0]);
            if (dist < h || dist >= 0.5) continue;
            oracle = std::max(oracle, std::abs(p[a] - p[b]) * (-std::log(dist)));
        }
    CHECK(r.local_constant == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("jump exponent is diagnosed as non-log-Hoelder") {
    double coarse =
        log_holder(make_exponent(build_domain(1, 0.5, 64), "jump", 2.0, 1.0)).local_constant;
    double fine =
        log_holder(make_exponent(build_domain(1, 0.5, 512), "jump", 2.0, 1.0)).local_constant;
    CHECK(fine > 1.5 * coarse); // grows without bound under refinement
}

TEST_CASE("canonical log-decay field has bounded asymptotic constant") {
    DomainGrid wide = build_domain(1, 4.0, 512);
    ExponentField p = make_exponent(wide, "logdecay", 2.0, 1.0);
    LogHolderReport r = log_holder(p, 2.0);
    CHECK(r.asymptotic_constant <= 1.0 + 1e-9);
    CHECK(r.p_infinity == 2.0);
}

TEST_CASE("refinement does not shrink the reported local constant") {
    double coarse =
        log_holder(make_exponent(build_domain(1, 0.5, 64), "sine", 2.0, 0.5)).local_constant;
    double fine =
        log_holder(make_exponent(build_domain(1, 0.5, 256), "sine", 2.0, 0.5)).local_constant;
    CHECK(fine >= coarse * (1.0 - 0.01)); // up to sampling noise
}

TEST_CASE("cube exponents: constants collapse") {
    DyadicCube q = make_dyadic_cube(kGrid, {0.0, 0.0}, 1, {0, 0});
    std::vector<ExponentField> ps{ExponentField::constant(kGrid, 2.0)};
    CubeExponents ce = cube_exponents(ps, 0.0, q);
    CHECK(ce.eta == doctest::Approx(2.0));
    CHECK(ce.delta == doctest::Approx(2.0));
    CHECK(ce.harmonic_mean[0] == doctest::Approx(2.0));

    std::vector<ExponentField> pair{ExponentField::constant(kGrid, 4.0),
                                    ExponentField::constant(kGrid, 4.0)};
    CubeExponents ce2 = cube_exponents(pair, 0.0, q);
    CHECK(ce2.eta == doctest::Approx(2.0));
}

TEST_CASE("cube exponents match an exhaustive cell scan") {
    Rng rng(11);
    std::vector<ExponentField> ps{sine_exponent(2.3, 0.4), sine_exponent(3.1, 0.5)};
    double alpha = 0.3;
    for (int k : {0, 2, 4}) {
        DyadicCube q = make_dyadic_cube(kGrid, {0.0, 0.0}, k,
                                        {static_cast<long>(rng.below(1ULL << k)), 0});
        CubeExponents ce = cube_exponents(ps, alpha, q);
        CellBox box = cell_box(q, kGrid);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            double lo = 1e300, hi = 0.0, inv_sum = 0.0;
            long count = 0;
            for_each_cell(box, kGrid, [&](long c) {
                lo = std::min(lo, ps[i][c]);
                hi = std::max(hi, ps[i][c]);
                inv_sum += 1.0 / ps[i][c];
                ++count;
            });
            CHECK(ce.p_minus[i] == doctest::Approx(lo));
            CHECK(ce.p_plus[i] == doctest::Approx(hi));
            CHECK(ce.harmonic_mean[i] ==
                  doctest::Approx(static_cast<double>(count) / inv_sum).epsilon(1e-13));
        }
        double inv_eta = 1.0 / ce.p_minus[0] + 1.0 / ce.p_minus[1];
        CHECK(1.0 / ce.eta == doctest::Approx(inv_eta).epsilon(1e-13));
        CHECK(1.0 / ce.delta == doctest::Approx(inv_eta - alpha).epsilon(1e-13));
    }
}

TEST_CASE("delta sits below q over every cube") {
    std::vector<ExponentField> ps{sine_exponent(2.5, 0.3), sine_exponent(3.0, 0.4)};
    double ratio = 0.2;
    GridField qv(kGrid, 0.0);
    for (long c = 0; c < qv.size(); ++c)
        qv[c] = 1.0 / (1.0 / ps[0][c] + 1.0 / ps[1][c] - ratio);
    ExponentField q = ExponentField::create(std::move(qv), ExponentClass::P);

    CubeFamily family = dyadic_family(kGrid, 6);
    double global_bound = 0.0;
    for (const auto& cube : family.cubes) {
        CubeExponents ce = cube_exponents(ps, ratio * kGrid.dim, cube);
        CHECK(ce.delta <= q.p_minus_on(cube) + 1e-12);
        global_bound = std::max(global_bound, ce.delta);
    }
    CHECK(global_bound <= q.p_plus() + 1e-12); // delta is bounded over all cubes
}

TEST_CASE("delta rejects exhausted fractional budget") {
    std::vector<ExponentField> ps{ExponentField::constant(kGrid, 2.0)};
    DyadicCube root = make_dyadic_cube(kGrid, {0.0, 0.0}, 0, {0, 0});
    CHECK_THROWS_AS(cube_exponents(ps, 0.5 * kGrid.dim, root), std::invalid_argument);
}
