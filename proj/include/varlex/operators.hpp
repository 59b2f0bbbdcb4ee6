#pragma once

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace varlex {

/// Per-depth cube values |Q|^{alpha/n} prod_i <g_i>_Q for the unshifted
/// dyadic tree, built bottom-up from cell sums. The dyadic maximal operator
/// and the stopping-time decomposition both read from it so their values
/// agree bit for bit.
struct DyadicValuePyramid {
    DomainGrid grid;
    int max_depth = 0;
    double alpha = 0.0;
    int m = 1;
    std::vector<std::vector<double>> value; // value[k][flat corner at depth k]

    double cube_value(int depth, std::array<long, 2> corner) const;
    /// max over all dyadic cubes containing the cell.
    double maximal_at(long cell) const;
    GridField maximal_field() const;
};

DyadicValuePyramid product_average_pyramid(std::span<const GridField> factors, double alpha,
                                           int max_depth = -1);

/// Multilinear fractional maximal operator over a finite cube family:
/// at each cell x, max over cubes containing x of
///   |Q|^{alpha/n - m} prod_i integral_Q |f_i|.
GridField fractional_maximal(std::span<const GridField> f, double alpha,
                             const CubeFamily& cubes);

/// Fractional averaging operator on one cube:
///   |B|^{alpha/n} (prod_i <f_i>_B) chi_B.
GridField fractional_average(std::span<const GridField> f, double alpha, const DyadicCube& cube);

/// Kenig-Stein multilinear fractional integral
///   I_alpha(f)(x) = sum over source tuples of prod f_i(y_i)
///                   (sum_i |x - y_i|)^{alpha - mn} h^{mn},
/// with the all-coincident tuple evaluated at the regularized distance
/// m*(h/2). Rejects runs with more than `tuple_budget` source tuples
/// (default 2^24) unless overridden.
GridField fractional_integral(std::span<const GridField> f, double alpha,
                              long tuple_budget = 1L << 24);

/// Fefferman-Stein sharp maximal function composed with the power trick:
///   M_delta^# f = [ M^#(|f|^delta) ]^{1/delta},
/// M^# g (x) = max over cubes containing x of <|g - <g>_Q|>_Q.
GridField sharp_maximal(const GridField& f, double delta, const CubeFamily& cubes);

/// Weighted dyadic maximal operator M_sigma f = sup <|f|>_{sigma,Q} chi_Q.
GridField weighted_dyadic_maximal(const GridField& f, const GridField& sigma,
                                  const CubeFamily& cubes);

/// Comparison of the all-cubes maximal operator against the sum of its
/// shifted dyadic versions (sup over cell-aligned cubes vs sum over the
/// {0,1/3}^n shifted families).
struct CoverCheckResult {
    GridField ratio;                    // full / sum of shifted, 0 where both vanish
    double max_ratio = 0.0;             // empirical covering constant
    bool dyadic_dominated = true;       // M^{D_0} <= M pointwise, exact
    double max_dyadic_excess = 0.0;     // worst violation when not dominated
};

CoverCheckResult dyadic_shifted_cover_check(std::span<const GridField> f, double alpha,
                                            const DomainGrid& grid, int max_depth);

/// One stopping cube of the Calderon-Zygmund decomposition at some level.
struct StoppingCube {
    DyadicCube cube;
    double product = 0.0;             // |Q|^{alpha/n} prod <f_i sigma_i>_Q
    std::vector<long> residual_cells; // E = Q \ Omega_{k+1}, flat cell indices
};

struct CZLevel {
    int k = 0;
    double threshold = 0.0; // a^k
    std::vector<StoppingCube> cubes;
};

/// Stopping-time decomposition for the dyadic multilinear fractional maximal
/// operator of f_i sigma_i with base a > 2^{mn - alpha}: per level k the
/// maximal dyadic cubes with |Q|^{alpha/n} prod <f_i sigma_i>_Q > a^k.
/// Every returned cube satisfies
///   a^k < product <= 2^{mn-alpha} a^k
/// (checked before returning), the residuals are pairwise disjoint across
/// all levels, and the level sets nest.
struct CZDecomposition {
    DomainGrid grid;
    double a = 0.0;
    double alpha = 0.0;
    int m = 1;
    int max_depth = 0;
    int k_lo = 0;
    int k_hi = -1;
    bool level_range_clamped = false; // lower levels dropped so the root cube
                                      // also satisfies the two-sided inequality
    std::vector<CZLevel> levels;      // ascending k
};

CZDecomposition cz_decompose(std::span<const GridField> f, std::span<const GridField> sigma,
                             double alpha, double a, const CubeFamily& dyadic_cubes,
                             std::optional<std::pair<int, int>> k_range = {});

/// Pointwise sparse domination of the dyadic maximal function by the level
/// sums over residual sets: max over covered cells of
///   M_alpha^d(f sigma) / sum_{k,j} product_{Q_j^k} chi_{E_j^k},
/// plus the count of cells with positive maximal value left uncovered by the
/// decomposition's level range.
struct SparseDominationResult {
    double max_ratio = 0.0;
    long uncovered_positive_cells = 0;
    long covered_cells = 0;
};

SparseDominationResult sparse_domination_check(const CZDecomposition& dec,
                                               std::span<const GridField> f,
                                               std::span<const GridField> sigma, double alpha);

} // namespace varlex
