#include "varlex/matrix_weight.hpp"

#include "varlex/lebesgue.hpp"
#include "varlex/parallel.hpp"
#include "varlex/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace varlex {

VectorField::VectorField(DomainGrid g, int dim_d)
    : grid(g), d(dim_d),
      data(static_cast<std::size_t>(g.cell_count()) * static_cast<std::size_t>(dim_d), 0.0) {}

Eigen::VectorXd VectorField::at(long cell) const {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = data[static_cast<std::size_t>(cell) * d + i];
    return v;
}

void VectorField::set(long cell, const Eigen::VectorXd& v) {
    for (int i = 0; i < d; ++i) data[static_cast<std::size_t>(cell) * d + i] = v(i);
}

GridField VectorField::magnitude() const {
    GridField out(grid, 0.0);
    for (long c = 0; c < grid.cell_count(); ++c) out[c] = at(c).norm();
    return out;
}

MatrixWeightField::MatrixWeightField(DomainGrid grid, int d, std::vector<double> blocks)
    : grid_(grid), d_(d), data_(std::move(blocks)) {
    if (d < 1 || d > 4)
        throw std::invalid_argument("MatrixWeightField: dimension d must lie in 1..4");
    auto expected = static_cast<std::size_t>(grid.cell_count()) * d * d;
    if (data_.size() != expected)
        throw std::invalid_argument("MatrixWeightField: block count does not match the grid");
    inverse_.resize(data_.size());
    for (long c = 0; c < grid.cell_count(); ++c) {
        Eigen::MatrixXd w = at(c);
        double scale = w.norm();
        if (!((w - w.transpose()).norm() <= 1e-12 * std::max(scale, 1.0)))
            throw std::invalid_argument("MatrixWeightField: cell matrix is not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w);
        if (!(eig.eigenvalues().minCoeff() > 0.0))
            throw std::invalid_argument("MatrixWeightField: cell matrix is not positive definite");
        Eigen::MatrixXd inv = w.inverse();
        for (int r = 0; r < d_; ++r)
            for (int s = 0; s < d_; ++s)
                inverse_[(static_cast<std::size_t>(c) * d_ + r) * d_ + s] = inv(r, s);
    }
}

MatrixWeightField MatrixWeightField::constant(const DomainGrid& grid, const Eigen::MatrixXd& w) {
    int d = static_cast<int>(w.rows());
    std::vector<double> blocks;
    blocks.reserve(static_cast<std::size_t>(grid.cell_count()) * d * d);
    for (long c = 0; c < grid.cell_count(); ++c)
        for (int r = 0; r < d; ++r)
            for (int s = 0; s < d; ++s) blocks.push_back(w(r, s));
    return MatrixWeightField(grid, d, std::move(blocks));
}

Eigen::MatrixXd MatrixWeightField::at(long cell) const {
    Eigen::MatrixXd w(d_, d_);
    for (int r = 0; r < d_; ++r)
        for (int s = 0; s < d_; ++s)
            w(r, s) = data_[(static_cast<std::size_t>(cell) * d_ + r) * d_ + s];
    return w;
}

Eigen::MatrixXd MatrixWeightField::inverse_at(long cell) const {
    Eigen::MatrixXd w(d_, d_);
    for (int r = 0; r < d_; ++r)
        for (int s = 0; s < d_; ++s)
            w(r, s) = inverse_[(static_cast<std::size_t>(cell) * d_ + r) * d_ + s];
    return w;
}

GridField MatrixWeightField::action_magnitude(const Eigen::VectorXd& e) const {
    GridField out(grid_, 0.0);
    for (long c = 0; c < grid_.cell_count(); ++c) out[c] = (at(c) * e).norm();
    return out;
}

GridField MatrixWeightField::operator_norm_field() const {
    GridField out(grid_, 0.0);
    for (long c = 0; c < grid_.cell_count(); ++c) out[c] = operator_norm(at(c));
    return out;
}

double operator_norm(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * a);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

namespace {

double avg_norm_impl(const MatrixWeightField& w, const ExponentField& p, const DyadicCube& cube,
                     const Eigen::VectorXd& v, bool dual) {
    if (v.norm() == 0.0) throw std::invalid_argument("avg_norm: zero probe vector");
    CellBox box = cell_box(cube, w.grid());
    if (box.empty()) throw std::invalid_argument("avg_norm: cube covers no cells");
    std::vector<double> values, exponents;
    for_each_cell(box, w.grid(), [&](long c) {
        Eigen::VectorXd image = dual ? Eigen::VectorXd(w.inverse_at(c) * v)
                                     : Eigen::VectorXd(w.at(c) * v);
        values.push_back(image.norm());
        exponents.push_back(p[c]);
    });
    double norm = detail::luxemburg(values, exponents, w.grid().cell_volume()).norm;
    double p_q = harmonic_mean_on(p, cube);
    return std::pow(cube.volume(w.grid().dim), -1.0 / p_q) * norm;
}

} // namespace

double avg_norm(const MatrixWeightField& w, const ExponentField& p, const DyadicCube& cube,
                const Eigen::VectorXd& v) {
    return avg_norm_impl(w, p, cube, v, false);
}

double avg_norm_dual(const MatrixWeightField& w, const ExponentField& p, const DyadicCube& cube,
                     const Eigen::VectorXd& v) {
    return avg_norm_impl(w, p, cube, v, true);
}

namespace {

/// Deterministic unit directions: the angle grid on the circle for d = 2,
/// otherwise seeded Gaussian directions; `phase` decorrelates the held-out
/// set from the training set.
std::vector<Eigen::VectorXd> unit_directions(int d, int count, int phase) {
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(static_cast<std::size_t>(count));
    if (d == 1) {
        Eigen::VectorXd e(1);
        e(0) = 1.0;
        dirs.push_back(e);
        return dirs;
    }
    if (d == 2) {
        for (int i = 0; i < count; ++i) {
            double theta = std::numbers::pi * (static_cast<double>(i) + 0.5 * phase) /
                           static_cast<double>(count);
            Eigen::VectorXd e(2);
            e << std::cos(theta), std::sin(theta);
            dirs.push_back(e);
        }
        return dirs;
    }
    Rng rng(0xD1CE5EEDULL + static_cast<std::uint64_t>(d) * 1000003ULL +
            static_cast<std::uint64_t>(phase));
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd e(d);
        for (int k = 0; k < d; ++k) {
            double u1 = rng.uniform();
            double u2 = rng.uniform();
            e(k) = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
        }
        double n = e.norm();
        if (n < 1e-12) {
            --i;
            continue;
        }
        dirs.push_back(e / n);
    }
    // make sure the coordinate axes are probed
    for (int k = 0; k < d && k < count; ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e(k) = 1.0;
        dirs[static_cast<std::size_t>(k)] = e;
    }
    return dirs;
}

/// Minimum-volume origin-centered ellipsoid {x : x^T A x <= 1} enclosing the
/// points. Khachiyan-style weight iteration on the design matrix with
/// Wolfe-Atwood away steps, which converge linearly where the plain add-only
/// update stalls.
Eigen::MatrixXd mvee_centered(const std::vector<Eigen::VectorXd>& points, double tolerance,
                              int max_iterations, int& iterations) {
    int d = static_cast<int>(points.front().size());
    auto count = static_cast<int>(points.size());
    double dd = static_cast<double>(d);
    Eigen::VectorXd u = Eigen::VectorXd::Constant(count, 1.0 / count);
    Eigen::MatrixXd design(d, count);
    for (int i = 0; i < count; ++i) design.col(i) = points[static_cast<std::size_t>(i)];

    iterations = 0;
    double worst = 0.0;
    for (; iterations < max_iterations; ++iterations) {
        Eigen::MatrixXd moment = design * u.asDiagonal() * design.transpose();
        Eigen::MatrixXd inv = moment.inverse();
        int add = 0, away = -1;
        worst = 0.0;
        double slack = dd; // smallest g over the support
        for (int i = 0; i < count; ++i) {
            double g = design.col(i).dot(inv * design.col(i));
            if (g > worst) {
                worst = g;
                add = i;
            }
            if (u(i) > 1e-12 && g < slack) {
                slack = g;
                away = i;
            }
        }
        bool add_bad = worst > dd * (1.0 + tolerance);
        bool away_bad = away >= 0 && slack < dd * (1.0 - tolerance) && slack > 1.0 + 1e-9;
        if (!add_bad && !away_bad) break;
        if (!away_bad || worst - dd >= dd - slack) {
            double step = (worst - dd) / (dd * (worst - 1.0));
            u *= (1.0 - step);
            u(add) += step;
        } else {
            // away step u <- (1 + s) u - s e_i, clamped to keep u >= 0
            double step = (dd - slack) / (dd * (slack - 1.0));
            step = std::min(step, u(away) / (1.0 - u(away)));
            u *= (1.0 + step);
            u(away) -= step;
            u(away) = std::max(u(away), 0.0);
        }
    }
    if (worst > dd * (1.0 + 100.0 * tolerance))
        throw std::runtime_error("reducing_operator: ellipsoid iteration failed to converge");

    Eigen::MatrixXd moment = design * u.asDiagonal() * design.transpose();
    Eigen::MatrixXd a = moment.inverse() / dd;
    // expand so every sample satisfies x^T A x <= 1 exactly
    double peak = 0.0;
    for (int i = 0; i < count; ++i)
        peak = std::max(peak, design.col(i).dot(a * design.col(i)));
    if (peak > 0.0) a /= peak;
    return a;
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

} // namespace

ReducingOperator reducing_operator(const MatrixWeightField& w, ReduceKind kind,
                                   const ExponentField& exponent, const DyadicCube& cube,
                                   int directions, int held_out, double mvee_tolerance,
                                   int mvee_max_iterations) {
    int d = w.d();
    if (directions <= 0) directions = 64 * d;
    bool dual = kind == ReduceKind::Dual;
    auto r_norm = [&](const Eigen::VectorXd& v) {
        return avg_norm_impl(w, exponent, cube, v, dual);
    };

    ReducingOperator op;
    op.cube = cube;
    op.exponent_tag = dual ? "dual" : "primal";

    if (d == 1) {
        // the interval case is exact: M = <r>(1)
        Eigen::VectorXd e(1);
        e(0) = 1.0;
        double r = r_norm(e);
        op.matrix = Eigen::MatrixXd::Constant(1, 1, r);
        op.certified_lower = op.certified_upper = 1.0;
        return op;
    }

    // boundary samples u / <r>(u) of the unit ball of <r>
    std::vector<Eigen::VectorXd> boundary;
    for (const auto& u : unit_directions(d, directions, 0)) {
        double r = r_norm(u);
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::runtime_error("reducing_operator: degenerate average norm");
        boundary.push_back(u / r);
    }

    Eigen::MatrixXd a = mvee_centered(boundary, mvee_tolerance, mvee_max_iterations,
                                      op.mvee_iterations);

    // The enclosing-ellipsoid norm sits below <r>; rescaling by the deepest
    // training sample restores domination, exactly recovering the ellipsoid
    // itself when the unit ball of <r> is one. Held-out directions between
    // training samples can dip below the training minimum by a second-order
    // sampling error, hence the 1e-4 slack on the certified lower side.
    Eigen::MatrixXd root = spd_sqrt(a);
    double scale = 0.0;
    for (const auto& b : boundary) scale = std::max(scale, 1.0 / (root * b).norm());
    op.matrix = scale * root;

    double lower = std::numeric_limits<double>::infinity();
    double upper = 0.0;
    for (const auto& u : unit_directions(d, held_out, 1)) {
        double r = r_norm(u);
        double ratio = (op.matrix * u).norm() / r;
        lower = std::min(lower, ratio);
        upper = std::max(upper, ratio);
    }
    op.certified_lower = lower;
    op.certified_upper = upper;
    if (!(lower >= 1.0 - 1e-4) || !(upper <= std::sqrt(static_cast<double>(d)) * 1.01))
        throw std::runtime_error("reducing_operator: sandwich certification failed");
    return op;
}

namespace {

void check_fractional_relation(const ExponentField& p, const ExponentField& q, double alpha,
                               int dim) {
    double ratio = alpha / static_cast<double>(dim);
    for (long c = 0; c < p.grid().cell_count(); ++c)
        if (std::abs(1.0 / p[c] - 1.0 / q[c] - ratio) > 1e-10)
            throw std::invalid_argument("matrix weight constant: exponents violate "
                                        "alpha/n = 1/p - 1/q at cell " +
                                        std::to_string(c));
}

} // namespace

WeightConstantReport matrix_apq_direct(const MatrixWeightField& w, const ExponentField& p,
                                       const ExponentField& q, double alpha,
                                       const CubeFamily& cubes, long cell_pair_budget) {
    const DomainGrid& grid = w.grid();
    double n = static_cast<double>(grid.dim);
    check_fractional_relation(p, q, alpha, grid.dim);
    const ExponentField pc = conjugate(p);

    long pair_cost = 0;
    for (const auto& cube : cubes.cubes) {
        long count = cell_box(cube, grid).count(grid.dim);
        pair_cost += count * count;
    }
    if (pair_cost > cell_pair_budget)
        throw std::invalid_argument("matrix_apq_direct: cell-pair cost " +
                                    std::to_string(pair_cost) +
                                    " exceeds the budget; pass a larger cell_pair_budget");

    WeightConstantReport report;
    report.cube_count = cubes.size();
    double cell_vol = grid.cell_volume();
    std::vector<long> cells;
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, grid);
        if (box.empty()) continue;
        cells.clear();
        for_each_cell(box, grid, [&](long c) { cells.push_back(c); });

        std::vector<double> outer_values(cells.size());
        std::vector<double> outer_exponents(cells.size());
        parallel_for(cells.size(), [&](std::size_t lo, std::size_t hi) {
            std::vector<double> inner_values(cells.size());
            std::vector<double> inner_exponents(cells.size());
            for (std::size_t xi = lo; xi < hi; ++xi) {
                Eigen::MatrixXd wx = w.at(cells[xi]);
                for (std::size_t yi = 0; yi < cells.size(); ++yi) {
                    inner_values[yi] = operator_norm(w.inverse_at(cells[yi]) * wx);
                    inner_exponents[yi] = pc[cells[yi]];
                }
                outer_values[xi] =
                    detail::luxemburg(inner_values, inner_exponents, cell_vol).norm;
                outer_exponents[xi] = q[cells[xi]];
            }
        }, 8);
        double value = std::pow(cube.volume(grid.dim), alpha / n - 1.0) *
                       detail::luxemburg(outer_values, outer_exponents, cell_vol).norm;
        if (value > report.constant) {
            report.constant = value;
            report.argmax = cube;
        }
    }
    return report;
}

WeightConstantReport matrix_apq_reduced(const MatrixWeightField& w, const ExponentField& p,
                                        const ExponentField& q, double alpha,
                                        const CubeFamily& cubes, int directions) {
    // |Q|^{alpha/n - 1/p_Q + 1/q_Q} = 1 once the exponents are consistent,
    // so the reduced route carries no explicit volume factor.
    check_fractional_relation(p, q, alpha, w.grid().dim);
    const ExponentField pc = conjugate(p);
    WeightConstantReport report;
    report.cube_count = cubes.size();
    for (const auto& cube : cubes.cubes) {
        if (cell_box(cube, w.grid()).empty()) continue;
        ReducingOperator primal = reducing_operator(w, ReduceKind::Primal, q, cube, directions);
        ReducingOperator dual = reducing_operator(w, ReduceKind::Dual, pc, cube, directions);
        double value = operator_norm(primal.matrix * dual.matrix);
        if (value > report.constant) {
            report.constant = value;
            report.argmax = cube;
        }
    }
    return report;
}

GridField christ_goldberg(const VectorField& f, const MatrixWeightField& w, double alpha,
                          const CubeFamily& cubes) {
    const DomainGrid& grid = f.grid;
    double n = static_cast<double>(grid.dim);
    double cell_vol = grid.cell_volume();
    GridField out(grid, 0.0);

    std::vector<long> cells;
    for (const auto& cube : cubes.cubes) {
        CellBox box = cell_box(cube, grid);
        if (box.empty()) continue;
        cells.clear();
        for_each_cell(box, grid, [&](long c) { cells.push_back(c); });
        // the magnitude sits inside the integral; precompute W^{-1}(y) f(y)
        std::vector<Eigen::VectorXd> transported;
        transported.reserve(cells.size());
        for (long c : cells) transported.push_back(w.inverse_at(c) * f.at(c));
        double scale = std::pow(cube.volume(grid.dim), alpha / n - 1.0);
        for (long x : cells) {
            Eigen::MatrixXd wx = w.at(x);
            double acc = 0.0;
            for (const auto& t : transported) acc += (wx * t).norm();
            out[x] = std::max(out[x], scale * acc * cell_vol);
        }
    }
    return out;
}

VectorField vector_average(const VectorField& f, double alpha, const DyadicCube& cube) {
    const DomainGrid& grid = f.grid;
    double n = static_cast<double>(grid.dim);
    CellBox box = cell_box(cube, grid);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(f.d);
    for_each_cell(box, grid, [&](long c) { sum += f.at(c); });
    Eigen::VectorXd value =
        std::pow(cube.volume(grid.dim), alpha / n - 1.0) * grid.cell_volume() * sum;
    VectorField out(grid, f.d);
    for_each_cell(box, grid, [&](long c) { out.set(c, value); });
    return out;
}

ScalarProjectionReport scalar_projections(const MatrixWeightField& w, const Eigen::VectorXd& e,
                                          const ExponentField& p, const ExponentField& q,
                                          double alpha, const CubeFamily& cubes) {
    if (std::abs(e.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("scalar_projections: probe vector must be a unit vector");
    ScalarProjectionReport report;
    report.direction = variable_apq(w.action_magnitude(e), p, q, alpha, cubes);
    report.norm = variable_apq(w.operator_norm_field(), p, q, alpha, cubes);
    report.matrix_constant = matrix_apq_direct(w, p, q, alpha, cubes).constant;
    report.comparison =
        report.norm.constant / (static_cast<double>(w.d()) * report.matrix_constant);
    return report;
}

} // namespace varlex
