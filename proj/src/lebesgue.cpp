#include "varlex/lebesgue.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace varlex {

namespace detail {

namespace {

// |t|^p with overflow guard; anything past exp(700) would overflow, and for
// the bisection it only matters that the result is "far above 1".
double guarded_pow(double t, double p) {
    if (t == 0.0) return 0.0;
    double log_term = p * std::log(t);
    if (log_term > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(log_term);
}

} // namespace

double modular(std::span<const double> values, std::span<const double> exponents,
               double cell_volume) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        sum += guarded_pow(std::abs(values[i]), exponents[i]);
    return sum * cell_volume;
}

namespace {

double modular_scaled(std::span<const double> values, std::span<const double> exponents,
                      double cell_volume, double lambda) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = std::abs(values[i]);
        if (v == 0.0) continue;
        sum += guarded_pow(v / lambda, exponents[i]);
        if (sum > 1e30) return std::numeric_limits<double>::infinity();
    }
    return sum * cell_volume;
}

} // namespace

LuxemburgResult luxemburg(std::span<const double> values, std::span<const double> exponents,
                          double cell_volume, double tolerance, int max_iterations) {
    LuxemburgResult result;
    double peak = 0.0;
    double p_lo = std::numeric_limits<double>::infinity();
    double p_hi = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        peak = std::max(peak, std::abs(values[i]));
        p_lo = std::min(p_lo, exponents[i]);
        p_hi = std::max(p_hi, exponents[i]);
    }
    if (peak == 0.0 || values.empty()) return result; // ||0|| = 0

    double volume = cell_volume * static_cast<double>(values.size());
    double lo = peak * std::pow(volume, 1.0 / p_hi) * 0x1.0p-60;
    double hi = peak * std::pow(std::max(1.0, volume), 1.0 / p_lo) * 0x1.0p60;

    // widen geometrically until rho(f/lo) > 1 > rho(f/hi)
    while (modular_scaled(values, exponents, cell_volume, lo) <= 1.0) {
        lo *= 0.5;
        if (lo < std::numeric_limits<double>::min() * 0x1.0p60)
            throw std::runtime_error("luxemburg: lower bracket underflow");
    }
    while (modular_scaled(values, exponents, cell_volume, hi) > 1.0) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw std::runtime_error("luxemburg: upper bracket overflow");
    }
    result.bracket_lo = lo;
    result.bracket_hi = hi;

    double mid = lo;
    double rho = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        mid = std::sqrt(lo * hi); // bisect in log scale for uniform relative accuracy
        rho = modular_scaled(values, exponents, cell_volume, mid);
        ++result.iterations;
        if (std::abs(rho - 1.0) <= tolerance) break;
        if (rho > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    result.norm = mid;
    result.modular_at_norm = rho;
    return result;
}

} // namespace detail

namespace {

void gather(const DyadicCube& cube, const GridField& f, const ExponentField& p,
            std::vector<double>& values, std::vector<double>& exponents) {
    CellBox box = cell_box(cube, f.grid);
    values.clear();
    exponents.clear();
    for_each_cell(box, f.grid, [&](long c) {
        values.push_back(f[c]);
        exponents.push_back(p[c]);
    });
}

} // namespace

double modular(const GridField& f, const ExponentField& p) {
    return detail::modular(f.values, p.field().values, f.grid.cell_volume());
}

LuxemburgResult luxemburg_norm(const GridField& f, const ExponentField& p) {
    if (f.grid.cell_count() != p.grid().cell_count())
        throw std::invalid_argument("luxemburg_norm: field and exponent grids disagree");
    return detail::luxemburg(f.values, p.field().values, f.grid.cell_volume());
}

LuxemburgResult luxemburg_norm_on(const DyadicCube& cube, const GridField& f,
                                  const ExponentField& p) {
    std::vector<double> values, exponents;
    gather(cube, f, p, values, exponents);
    return detail::luxemburg(values, exponents, f.grid.cell_volume());
}

double modular_on(const DyadicCube& cube, const GridField& f, const ExponentField& p) {
    std::vector<double> values, exponents;
    gather(cube, f, p, values, exponents);
    return detail::modular(values, exponents, f.grid.cell_volume());
}

namespace {

GridField pointwise_product(const GridField& a, const GridField& b) {
    GridField out(a.grid, 0.0);
    for (long c = 0; c < out.size(); ++c) out[c] = a[c] * b[c];
    return out;
}

} // namespace

LuxemburgResult weighted_norm(const GridField& f, const ExponentField& p, const GridField& weight) {
    validate_weight(weight);
    return luxemburg_norm(pointwise_product(weight, f), p);
}

LuxemburgResult weighted_norm_on(const DyadicCube& cube, const GridField& f,
                                 const ExponentField& p, const GridField& weight) {
    return luxemburg_norm_on(cube, pointwise_product(weight, f), p);
}

HolderPair holder_check(const GridField& f, const GridField& g, const ExponentField& p) {
    HolderPair pair;
    double vol = f.grid.cell_volume();
    for (long c = 0; c < f.size(); ++c) pair.lhs += std::abs(f[c] * g[c]) * vol;
    pair.rhs = 4.0 * luxemburg_norm(f, p).norm * luxemburg_norm(g, conjugate(p)).norm;
    return pair;
}

double holder_constant(const ExponentField& p) {
    return 1.0 / p.p_minus() + 1.0 - 1.0 / p.p_plus();
}

double dual_lower_bound(const GridField& f, const ExponentField& p, int trials, Rng& rng) {
    if (f.all_zero()) return 0.0;
    const ExponentField pc = conjugate(p);
    double vol = f.grid.cell_volume();

    auto paired_integral = [&](const GridField& g) {
        double conj_norm = luxemburg_norm(g, pc).norm;
        if (conj_norm == 0.0) return 0.0;
        double sum = 0.0;
        for (long c = 0; c < f.size(); ++c) sum += std::abs(f[c] * g[c]) * vol;
        return sum / conj_norm;
    };

    // extremal candidate |f/||f|| |^{p-1}: its conjugate modular equals the
    // modular of f/||f||, so it certifies the norm itself
    double norm = luxemburg_norm(f, p).norm;
    GridField extremal(f.grid, 0.0);
    for (long c = 0; c < f.size(); ++c)
        extremal[c] = std::pow(std::abs(f[c]) / norm, p[c] - 1.0);
    double best = paired_integral(extremal);

    for (int t = 0; t < trials; ++t) {
        GridField g(f.grid, 0.0);
        for (long c = 0; c < g.size(); ++c) {
            double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            g[c] = sign * rng.uniform();
        }
        best = std::max(best, paired_integral(g));
    }
    return best;
}

ModularNormBounds modular_norm_bounds(const GridField& f, const ExponentField& p) {
    ModularNormBounds out;
    out.norm = luxemburg_norm(f, p).norm;
    out.modular = modular(f, p);
    if (out.norm == 0.0) {
        out.lower = out.upper = 0.0;
        return out;
    }
    double a = std::pow(out.modular, 1.0 / p.p_plus());
    double b = std::pow(out.modular, 1.0 / p.p_minus());
    if (out.norm > 1.0) {
        out.lower = a;
        out.upper = b;
    } else {
        out.lower = b;
        out.upper = a;
    }
    return out;
}

double bmo_norm(const GridField& b, const CubeFamily& cubes) {
    if (cubes.cubes.empty()) throw std::invalid_argument("bmo_norm: empty cube family");
    double best = 0.0;
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, b.grid);
        long count = box.count(b.grid.dim);
        if (count == 0) continue;
        double mean = 0.0;
        for_each_cell(box, b.grid, [&](long c) { mean += b[c]; });
        mean /= static_cast<double>(count);
        double osc = 0.0;
        for_each_cell(box, b.grid, [&](long c) { osc += std::abs(b[c] - mean); });
        best = std::max(best, osc / static_cast<double>(count));
    }
    return best;
}

} // namespace varlex
