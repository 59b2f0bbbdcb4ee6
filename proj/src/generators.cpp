#include "varlex/generators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace varlex {

ExponentField make_exponent(const DomainGrid& grid, const std::string& family, double base,
                            double amp, double freq, ExponentClass required) {
    GridField values(grid, 0.0);
    for (long c = 0; c < values.size(); ++c) {
        auto x = grid.cell_center(c);
        double v = 0.0;
        if (family == "constant") {
            v = base;
        } else if (family == "sine") {
            double s = (x[0] + (grid.dim == 2 ? x[1] : 0.0)) / (2.0 * grid.half_width);
            v = base + amp * std::sin(2.0 * std::numbers::pi * freq * s);
        } else if (family == "logdecay") {
            v = base + amp / std::log(std::exp(1.0) + grid.center_radius(c));
        } else if (family == "jump") {
            v = base + (x[0] > 0.0 ? amp : 0.0);
        } else {
            throw std::invalid_argument("make_exponent: unknown family " + family);
        }
        values[c] = v;
    }
    return ExponentField::create(std::move(values), required);
}

GridField constant_weight(const DomainGrid& grid, double value) {
    GridField w(grid, value);
    validate_weight(w);
    return w;
}

GridField power_weight(const DomainGrid& grid, double gamma) {
    GridField w(grid, 0.0);
    for (long c = 0; c < w.size(); ++c) w[c] = std::pow(grid.center_radius(c), gamma);
    validate_weight(w);
    return w;
}

GridField logbump_weight(const DomainGrid& grid, double amp, double center, double width) {
    GridField w(grid, 0.0);
    for (long c = 0; c < w.size(); ++c) {
        auto x = grid.cell_center(c);
        double dx = x[0] - center;
        double r2 = dx * dx + (grid.dim == 2 ? x[1] * x[1] : 0.0);
        w[c] = std::exp(amp * std::exp(-r2 / (2.0 * width * width)));
    }
    return w;
}

GridField random_log_uniform_weight(const DomainGrid& grid, double spread, Rng& rng) {
    GridField w(grid, 0.0);
    for (long c = 0; c < w.size(); ++c) w[c] = rng.log_uniform(spread);
    return w;
}

GridField spiked_weight(const DomainGrid& grid, long cell, double height) {
    GridField w(grid, 1.0);
    w[cell] = height;
    return w;
}

GridField indicator_probe(const DomainGrid& grid, const DyadicCube& cube) {
    GridField f(grid, 0.0);
    for_each_cell(cell_box(cube, grid), grid, [&](long c) { f[c] = 1.0; });
    return f;
}

GridField random_probe(const DomainGrid& grid, Rng& rng) {
    GridField f(grid, 0.0);
    for (long c = 0; c < f.size(); ++c) f[c] = rng.uniform();
    return f;
}

GridField spiky_probe(const DomainGrid& grid, double scale, Rng& rng) {
    GridField f(grid, 0.0);
    for (long c = 0; c < f.size(); ++c) {
        double u = rng.uniform();
        f[c] = scale * u * u * u * u * u * u;
    }
    return f;
}

GridField bump_probe(const DomainGrid& grid, double center, double width, double floor) {
    GridField f(grid, 0.0);
    for (long c = 0; c < f.size(); ++c) {
        auto x = grid.cell_center(c);
        double dx = x[0] - center;
        double r2 = dx * dx + (grid.dim == 2 ? x[1] * x[1] : 0.0);
        f[c] = floor + std::exp(-r2 / (2.0 * width * width));
    }
    return f;
}

MatrixWeightField random_spd_field(const DomainGrid& grid, int d, double spread, Rng& rng) {
    long cells = grid.cell_count();
    std::vector<double> blocks;
    blocks.reserve(static_cast<std::size_t>(cells) * d * d);

    // smooth angle/eigenvalue modulation keeps neighboring cells correlated
    double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double phase1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double freq = 1.0 + rng.uniform() * 2.0;
    for (long c = 0; c < cells; ++c) {
        auto x = grid.cell_center(c);
        double s = (x[0] + (grid.dim == 2 ? x[1] : 0.0)) / (2.0 * grid.half_width);
        Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
        if (d >= 2) {
            double theta = phase0 + freq * std::numbers::pi * s;
            Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(d, d);
            rot(0, 0) = std::cos(theta);
            rot(0, 1) = -std::sin(theta);
            rot(1, 0) = std::sin(theta);
            rot(1, 1) = std::cos(theta);
            q = rot;
        }
        Eigen::VectorXd lambda(d);
        for (int i = 0; i < d; ++i)
            lambda(i) = std::exp(spread * std::sin(phase1 + (i + 1) * freq * std::numbers::pi * s +
                                                   rng.uniform(-0.05, 0.05)));
        Eigen::MatrixXd w = q * lambda.asDiagonal() * q.transpose();
        w = 0.5 * (w + w.transpose());
        for (int r = 0; r < d; ++r)
            for (int col = 0; col < d; ++col) blocks.push_back(w(r, col));
    }
    return MatrixWeightField(grid, d, std::move(blocks));
}

VectorField random_vector_probe(const DomainGrid& grid, int d, Rng& rng) {
    VectorField f(grid, d);
    for (auto& v : f.data) v = rng.uniform(-1.0, 1.0);
    return f;
}

} // namespace varlex
