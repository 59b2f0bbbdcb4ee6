#include "varlex/exponent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace varlex {

std::string to_string(ExponentClass c) {
    switch (c) {
        case ExponentClass::P: return "P";
        case ExponentClass::P1: return "P1";
        case ExponentClass::P0: return "P0";
    }
    return "P0";
}

ExponentClass exponent_class_from_string(const std::string& s) {
    if (s == "P") return ExponentClass::P;
    if (s == "P1") return ExponentClass::P1;
    if (s == "P0") return ExponentClass::P0;
    throw std::invalid_argument("unknown exponent class tag: " + s);
}

ExponentField ExponentField::create(GridField values, ExponentClass required) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double v : values.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("exponent field has non-finite samples");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (values.values.empty()) throw std::invalid_argument("exponent field is empty");
    double floor = required == ExponentClass::P ? 1.0 : (required == ExponentClass::P1 ? 1.0 : 0.0);
    bool strict = required != ExponentClass::P1;
    if ((strict && !(lo > floor)) || (!strict && !(lo >= floor)))
        throw std::invalid_argument("exponent field violates class " + to_string(required) +
                                    ": ess inf = " + std::to_string(lo));
    return ExponentField(std::move(values), required, lo, hi);
}

ExponentField ExponentField::constant(const DomainGrid& grid, double p0, ExponentClass required) {
    return create(GridField(grid, p0), required);
}

double ExponentField::p_minus_on(const DyadicCube& cube) const {
    CellBox box = cell_box(cube, grid());
    double lo = std::numeric_limits<double>::infinity();
    for_each_cell(box, grid(), [&](long c) { lo = std::min(lo, values_[c]); });
    if (box.empty()) throw std::invalid_argument("p_minus_on: cube covers no cells");
    return lo;
}

double ExponentField::p_plus_on(const DyadicCube& cube) const {
    CellBox box = cell_box(cube, grid());
    double hi = 0.0;
    for_each_cell(box, grid(), [&](long c) { hi = std::max(hi, values_[c]); });
    if (box.empty()) throw std::invalid_argument("p_plus_on: cube covers no cells");
    return hi;
}

ExponentField conjugate(const ExponentField& p) {
    if (p.cls() != ExponentClass::P || !(p.p_minus() > 1.0))
        throw std::invalid_argument("conjugate: exponent must lie in class P (p- > 1)");
    GridField out(p.grid(), 0.0);
    for (long c = 0; c < out.size(); ++c) out[c] = p[c] / (p[c] - 1.0);
    return ExponentField::create(std::move(out), ExponentClass::P);
}

ExponentField derive_q(const ExponentField& p, double alpha, int dim, int m) {
    double ratio = alpha / static_cast<double>(dim);
    if (ratio < 0.0 || ratio >= static_cast<double>(m))
        throw std::invalid_argument("derive_q: alpha/n must lie in [0, m)");
    GridField out(p.grid(), 0.0);
    for (long c = 0; c < out.size(); ++c) {
        double inv_q = 1.0 / p[c] - ratio;
        if (!(inv_q > 0.0)) {
            auto idx = p.grid().axis_index(c);
            throw std::invalid_argument("derive_q: 1/q <= 0 at cell (" + std::to_string(idx[0]) +
                                        "," + std::to_string(idx[1]) + ")");
        }
        out[c] = 1.0 / inv_q;
    }
    return ExponentField::create(std::move(out), ExponentClass::P0);
}

ExponentField scale_exponent(const ExponentField& p, double factor, ExponentClass required) {
    if (!(factor > 0.0)) throw std::invalid_argument("scale_exponent: factor must be positive");
    GridField out(p.grid(), 0.0);
    for (long c = 0; c < out.size(); ++c) out[c] = factor * p[c];
    return ExponentField::create(std::move(out), required);
}

LogHolderReport log_holder(const ExponentField& p, std::optional<double> p_infinity) {
    const DomainGrid& grid = p.grid();
    long cells = grid.cell_count();
    if (cells < 2) throw std::invalid_argument("log_holder: grid needs at least 2 cells");

    LogHolderReport report;
    if (p_infinity) {
        report.p_infinity = *p_infinity;
    } else {
        double best_r = -1.0;
        long best_cell = 0;
        for (long c = 0; c < cells; ++c) {
            double r = grid.center_radius(c);
            if (r > best_r) {
                best_r = r;
                best_cell = c;
            }
        }
        report.p_infinity = p[best_cell];
    }

    double h = grid.cell_size();
    for (long a = 0; a < cells; ++a) {
        auto ca = grid.cell_center(a);
        for (long b = a + 1; b < cells; ++b) {
            auto cb = grid.cell_center(b);
            double dist = grid.dim == 1 ? std::abs(ca[0] - cb[0])
                                        : std::hypot(ca[0] - cb[0], ca[1] - cb[1]);
            // skip the log singularity below one cell and the cutoff at 1/2
            if (dist < h || dist >= 0.5) continue;
            double c0 = std::abs(p[a] - p[b]) * (-std::log(dist));
            report.local_constant = std::max(report.local_constant, c0);
        }
        double decay = std::abs(p[a] - report.p_infinity) * std::log(std::exp(1.0) + grid.center_radius(a));
        report.asymptotic_constant = std::max(report.asymptotic_constant, decay);
    }
    return report;
}

CubeExponents cube_exponents(std::span<const ExponentField> p_list, double alpha,
                             const DyadicCube& cube) {
    if (p_list.empty()) throw std::invalid_argument("cube_exponents: empty exponent list");
    const DomainGrid& grid = p_list.front().grid();
    CellBox box = cell_box(cube, grid);
    if (box.empty()) throw std::invalid_argument("cube_exponents: cube covers no cells");

    CubeExponents out;
    double inv_eta = 0.0;
    for (const auto& p : p_list) {
        double lo = p.p_minus_on(cube);
        out.p_minus.push_back(lo);
        out.p_plus.push_back(p.p_plus_on(cube));
        out.harmonic_mean.push_back(harmonic_mean_on(p, cube));
        inv_eta += 1.0 / lo;
    }
    out.eta = 1.0 / inv_eta;
    double inv_delta = inv_eta - alpha / static_cast<double>(grid.dim);
    if (!(inv_delta > 0.0))
        throw std::invalid_argument("cube_exponents: delta undefined (1/eta <= alpha/n)");
    out.delta = 1.0 / inv_delta;
    return out;
}

double harmonic_mean_on(const ExponentField& p, const DyadicCube& cube) {
    CellBox box = cell_box(cube, p.grid());
    if (box.empty()) throw std::invalid_argument("harmonic_mean_on: cube covers no cells");
    double sum = 0.0;
    long count = 0;
    for_each_cell(box, p.grid(), [&](long c) {
        sum += 1.0 / p[c];
        ++count;
    });
    return static_cast<double>(count) / sum;
}

} // namespace varlex
