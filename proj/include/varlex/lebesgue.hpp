#pragma once

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"
#include "varlex/rng.hpp"

#include <span>
#include <vector>

namespace varlex {

/// Result of a Luxemburg norm solve: the norm value, the modular evaluated
/// at it (close to 1 for nonzero input), and bisection diagnostics.
struct LuxemburgResult {
    double norm = 0.0;
    double modular_at_norm = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

namespace detail {

/// Modular rho(v) = sum |v_i|^{p_i} * cell_volume over a flat sample set.
double modular(std::span<const double> values, std::span<const double> exponents,
               double cell_volume);

/// Luxemburg norm inf { lambda > 0 : rho(v / lambda) <= 1 } by bisection on
/// the strictly decreasing map lambda -> rho(v/lambda). The bracket starts at
/// max|v| * vol^{1/p+} * 2^-60 .. max|v| * max(1, vol)^{1/p-} * 2^60 and is
/// widened geometrically until the modular straddles 1.
LuxemburgResult luxemburg(std::span<const double> values, std::span<const double> exponents,
                          double cell_volume, double tolerance = 1e-10, int max_iterations = 200);

} // namespace detail

/// rho_{p(.)}(f) over the whole domain.
double modular(const GridField& f, const ExponentField& p);

/// Luxemburg norm of f over the whole domain.
LuxemburgResult luxemburg_norm(const GridField& f, const ExponentField& p);

/// Norm of f * chi_Q (cells whose centers lie in Q).
LuxemburgResult luxemburg_norm_on(const DyadicCube& cube, const GridField& f,
                                  const ExponentField& p);
double modular_on(const DyadicCube& cube, const GridField& f, const ExponentField& p);

/// Weighted norm ||f||_{L^{p(.)}(omega)} = || omega f ||_{L^{p(.)}}.
LuxemburgResult weighted_norm(const GridField& f, const ExponentField& p, const GridField& weight);
LuxemburgResult weighted_norm_on(const DyadicCube& cube, const GridField& f,
                                 const ExponentField& p, const GridField& weight);

/// Generalized Hoelder pair: lhs = integral |f g|, rhs = 4 ||f||_p ||g||_p'.
/// The inequality lhs <= rhs holds for p in class P.
struct HolderPair {
    double lhs = 0.0;
    double rhs = 0.0;
};

HolderPair holder_check(const GridField& f, const GridField& g, const ExponentField& p);

/// Sharp constant of the generalized Hoelder inequality for this exponent:
/// integral |fg| <= (1/p- + 1 - 1/p+) ||f||_p ||g||_p'. Equals 1 exactly
/// when p is constant.
double holder_constant(const ExponentField& p);

/// Norm lower estimate by duality: max of integral |f g| over candidate g
/// normalized to unit conjugate norm. Candidates are the pointwise extremal
/// |f/||f|| |^{p-1} (which recovers the norm itself) plus `trials` random
/// fields. The sandwich result <= holder_constant(p) * ||f|| and
/// ||f|| <= result always holds; for constant p both sides collapse to
/// result = ||f||.
double dual_lower_bound(const GridField& f, const ExponentField& p, int trials, Rng& rng);

/// Modular-vs-norm comparison: when ||f|| > 1,
///   rho^{1/p+} <= ||f|| <= rho^{1/p-},
/// and with the exponents swapped when ||f|| <= 1.
struct ModularNormBounds {
    double norm = 0.0;
    double modular = 0.0;
    double lower = 0.0; // bound that must sit below the norm
    double upper = 0.0; // bound that must sit above the norm
    bool holds(double tolerance) const {
        return lower <= norm + tolerance && norm <= upper + tolerance;
    }
};

ModularNormBounds modular_norm_bounds(const GridField& f, const ExponentField& p);

/// sup over family cubes of the mean oscillation <|b - <b>_Q|>_Q.
double bmo_norm(const GridField& b, const CubeFamily& cubes);

} // namespace varlex
