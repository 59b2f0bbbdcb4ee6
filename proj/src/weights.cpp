#include "varlex/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace varlex {

namespace {

GridField pow_field(const GridField& base, const GridField& exponent) {
    GridField out(base.grid, 0.0);
    for (long c = 0; c < out.size(); ++c) out[c] = std::pow(base[c], exponent[c]);
    return out;
}

GridField recip_field(const GridField& f) {
    GridField out(f.grid, 0.0);
    for (long c = 0; c < out.size(); ++c) out[c] = 1.0 / f[c];
    return out;
}

GridField pow_field(const GridField& base, double e) {
    GridField out(base.grid, 0.0);
    for (long c = 0; c < out.size(); ++c) out[c] = std::pow(base[c], e);
    return out;
}

} // namespace

WeightVector make_weight_vector(std::vector<GridField> components,
                                std::span<const ExponentField> exponents,
                                const ExponentField& q) {
    if (components.empty()) throw std::invalid_argument("make_weight_vector: no components");
    if (components.size() != exponents.size())
        throw std::invalid_argument("make_weight_vector: weight/exponent count mismatch");
    WeightVector out;
    out.product = GridField(components.front().grid, 1.0);
    for (std::size_t i = 0; i < components.size(); ++i) {
        validate_weight(components[i]);
        for (long c = 0; c < out.product.size(); ++c) out.product[c] *= components[i][c];
        const ExponentField pc = conjugate(exponents[i]);
        GridField sigma(components[i].grid, 0.0);
        for (long c = 0; c < sigma.size(); ++c)
            sigma[c] = std::pow(components[i][c], -pc[c]);
        out.sigma.push_back(std::move(sigma));
    }
    out.u = pow_field(out.product, q.field());
    out.components = std::move(components);
    return out;
}

WeightConstantReport classical_ap(const GridField& w, double p, const CubeFamily& cubes,
                                  bool keep_per_cube) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::invalid_argument("classical_ap: exponent must lie in (1, inf)");
    validate_weight(w);
    double pc = p / (p - 1.0);
    double vol = w.grid.cell_volume();
    WeightConstantReport report;
    report.cube_count = cubes.size();
    if (keep_per_cube) report.per_cube.reserve(cubes.size());
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, w.grid);
        if (box.empty()) {
            if (keep_per_cube) report.per_cube.push_back(0.0);
            continue;
        }
        double sp = 0.0, sc = 0.0;
        for_each_cell(box, w.grid, [&](long c) {
            sp += std::pow(w[c], p);
            sc += std::pow(w[c], -pc);
        });
        double value = std::pow(sp * vol, 1.0 / p) * std::pow(sc * vol, 1.0 / pc) /
                       cube.volume(w.grid.dim);
        if (keep_per_cube) report.per_cube.push_back(value);
        if (value > report.constant) {
            report.constant = value;
            report.argmax = cube;
        }
    }
    return report;
}

double reverse_holder(const GridField& w, double r, const CubeFamily& cubes) {
    if (!(r > 1.0)) throw std::invalid_argument("reverse_holder: exponent must exceed 1");
    validate_weight(w);
    double best = 0.0;
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, w.grid);
        long count = box.count(w.grid.dim);
        if (count == 0) continue;
        double mean = 0.0, mean_r = 0.0;
        for_each_cell(box, w.grid, [&](long c) {
            mean += w[c];
            mean_r += std::pow(w[c], r);
        });
        mean /= static_cast<double>(count);
        mean_r /= static_cast<double>(count);
        best = std::max(best, std::pow(mean_r, 1.0 / r) / mean);
    }
    return best;
}

WeightConstantReport variable_apq(const GridField& w, const ExponentField& p,
                                  const ExponentField& q, double alpha, const CubeFamily& cubes,
                                  bool keep_per_cube) {
    validate_weight(w);
    const ExponentField pc = conjugate(p);
    const GridField winv = recip_field(w);
    double n = static_cast<double>(w.grid.dim);
    WeightConstantReport report;
    report.cube_count = cubes.size();
    if (keep_per_cube) report.per_cube.reserve(cubes.size());
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, w.grid);
        if (box.empty()) {
            if (keep_per_cube) report.per_cube.push_back(0.0);
            continue;
        }
        double value = std::pow(cube.volume(w.grid.dim), alpha / n - 1.0) *
                       luxemburg_norm_on(cube, w, q).norm *
                       luxemburg_norm_on(cube, winv, pc).norm;
        if (keep_per_cube) report.per_cube.push_back(value);
        if (value > report.constant) {
            report.constant = value;
            report.argmax = cube;
        }
    }
    return report;
}

WeightConstantReport variable_ap(const GridField& w, const ExponentField& p,
                                 const CubeFamily& cubes) {
    return variable_apq(w, p, p, 0.0, cubes);
}

WeightConstantReport multi_apq_constant(const WeightVector& weights,
                                        std::span<const ExponentField> exponents,
                                        const ExponentField& q, double alpha,
                                        const CubeFamily& cubes, bool keep_per_cube) {
    const int m = weights.m();
    if (static_cast<int>(exponents.size()) != m)
        throw std::invalid_argument("multi_apq_constant: weight/exponent count mismatch");
    const DomainGrid& grid = weights.product.grid;
    double n = static_cast<double>(grid.dim);
    // consistency alpha/n = 1/p - 1/q pointwise
    for (long c = 0; c < grid.cell_count(); ++c) {
        double inv_p = 0.0;
        for (const auto& p : exponents) inv_p += 1.0 / p[c];
        if (std::abs(inv_p - 1.0 / q[c] - alpha / n) > 1e-10)
            throw std::invalid_argument(
                "multi_apq_constant: exponents violate alpha/n = 1/p - 1/q at cell " +
                std::to_string(c));
    }

    std::vector<ExponentField> conjugates;
    std::vector<GridField> inverses;
    conjugates.reserve(static_cast<std::size_t>(m));
    inverses.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        conjugates.push_back(conjugate(exponents[static_cast<std::size_t>(i)]));
        inverses.push_back(recip_field(weights.components[static_cast<std::size_t>(i)]));
    }

    WeightConstantReport report;
    report.cube_count = cubes.size();
    if (keep_per_cube) report.per_cube.reserve(cubes.size());
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, grid);
        if (box.empty()) {
            if (keep_per_cube) report.per_cube.push_back(0.0);
            continue;
        }
        double value = std::pow(cube.volume(grid.dim), alpha / n - static_cast<double>(m)) *
                       luxemburg_norm_on(cube, weights.product, q).norm;
        for (int i = 0; i < m; ++i)
            value *= luxemburg_norm_on(cube, inverses[static_cast<std::size_t>(i)],
                                       conjugates[static_cast<std::size_t>(i)])
                         .norm;
        if (keep_per_cube) report.per_cube.push_back(value);
        if (value > report.constant) {
            report.constant = value;
            report.argmax = cube;
        }
    }
    return report;
}

ImplicationReport vweight4_check(const WeightVector& weights,
                                 std::span<const ExponentField> exponents,
                                 const ExponentField& q, double alpha, const CubeFamily& cubes) {
    const int m = weights.m();
    const double md = static_cast<double>(m);
    ImplicationReport report;
    report.multi_constant = multi_apq_constant(weights, exponents, q, alpha, cubes).constant;

    for (int j = 0; j < m; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        // [omega_j^{-1/m}]_{A_{m p_j'(.)}}^m
        ExponentField mpc = scale_exponent(conjugate(exponents[ju]), md);
        GridField wj = pow_field(weights.components[ju], -1.0 / md);
        double c = variable_ap(wj, mpc, cubes).constant;
        report.component_constants.push_back(std::pow(c, md));
    }
    ExponentField mq = scale_exponent(q, md);
    GridField wprod = pow_field(weights.product, 1.0 / md);
    report.product_constant = std::pow(variable_ap(wprod, mq, cubes).constant, md);

    double worst = report.product_constant;
    for (double c : report.component_constants) worst = std::max(worst, c);
    report.comparison_factor = worst / report.multi_constant;
    return report;
}

double ainfty_absorption(const GridField& w, const CubeFamily& cubes, double fraction,
                         int samples, Rng& rng) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("ainfty_absorption: fraction must lie in (0, 1]");
    validate_weight(w);
    double beta = 1.0;
    std::vector<long> cells;
    for (int s = 0; s < samples; ++s) {
        const auto& cube = cubes.cubes[rng.below(cubes.size())];
        CellBox box = cell_box(cube, w.grid);
        long count = box.count(w.grid.dim);
        if (count == 0) continue;
        cells.clear();
        for_each_cell(box, w.grid, [&](long c) { cells.push_back(c); });
        double total = 0.0;
        for (long c : cells) total += w[c];
        long keep = static_cast<long>(std::ceil(fraction * static_cast<double>(count)));
        keep = std::min(keep, count);
        // partial Fisher-Yates draw of `keep` distinct cells
        for (long i = 0; i < keep; ++i) {
            auto j = i + static_cast<long>(rng.below(static_cast<std::uint64_t>(count - i)));
            std::swap(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)]);
        }
        double part = 0.0;
        for (long i = 0; i < keep; ++i) part += w[cells[static_cast<std::size_t>(i)]];
        beta = std::min(beta, part / total);
    }
    return beta;
}

} // namespace varlex
