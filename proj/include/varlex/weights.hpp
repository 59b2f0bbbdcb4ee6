#pragma once

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"
#include "varlex/lebesgue.hpp"
#include "varlex/rng.hpp"

#include <span>
#include <vector>

namespace varlex {

/// An m-tuple of weights together with the derived fields the theory keeps
/// reaching for: product omega = prod omega_i, sigma_i = omega_i^{-p_i'},
/// u = omega^q.
struct WeightVector {
    std::vector<GridField> components;
    GridField product;
    std::vector<GridField> sigma;
    GridField u;

    int m() const { return static_cast<int>(components.size()); }
};

WeightVector make_weight_vector(std::vector<GridField> components,
                                std::span<const ExponentField> exponents,
                                const ExponentField& q);

/// A supremum-over-cubes constant plus the cube attaining it.
struct WeightConstantReport {
    double constant = 0.0;
    DyadicCube argmax;
    std::size_t cube_count = 0;
    std::vector<double> per_cube; // filled when requested
};

/// Classical Muckenhoupt constant in norm form for constant 1 < p < inf:
///   sup_B |B|^-1 ||w chi_B||_{L^p} ||w^-1 chi_B||_{L^p'}.
WeightConstantReport classical_ap(const GridField& w, double p, const CubeFamily& cubes,
                                  bool keep_per_cube = false);

/// Reverse Hoelder ratio sup_B (<w^r>_B)^{1/r} / <w>_B for r > 1.
double reverse_holder(const GridField& w, double r, const CubeFamily& cubes);

/// Variable single-weight constant
///   sup_B |B|^{alpha/n - 1} ||w chi_B||_{q(.)} ||w^-1 chi_B||_{p'(.)};
/// alpha = 0 with q = p gives the variable Muckenhoupt constant.
WeightConstantReport variable_apq(const GridField& w, const ExponentField& p,
                                  const ExponentField& q, double alpha, const CubeFamily& cubes,
                                  bool keep_per_cube = false);
WeightConstantReport variable_ap(const GridField& w, const ExponentField& p,
                                 const CubeFamily& cubes);

/// Multiple-weight constant
///   sup_B |B|^{alpha/n - m} ||omega chi_B||_{q(.)} prod_i ||omega_i^-1 chi_B||_{p_i'(.)}.
/// Requires alpha/n = 1/p - 1/q pointwise for 1/p = sum 1/p_i.
WeightConstantReport multi_apq_constant(const WeightVector& weights,
                                        std::span<const ExponentField> exponents,
                                        const ExponentField& q, double alpha,
                                        const CubeFamily& cubes, bool keep_per_cube = false);

/// Implication check: a finite multiple-weight constant pushes every
/// omega_j^{-1/m} into the m p_j'(.) Muckenhoupt class and omega^{1/m} into
/// the m q(.) class. Reports the measured constants and the smallest C with
/// max_j [omega_j^{-1/m}]^m, [omega^{1/m}]^m <= C [omega_vec].
struct ImplicationReport {
    std::vector<double> component_constants; // [omega_j^{-1/m}]_{A_{m p_j'}}^m
    double product_constant = 0.0;           // [omega^{1/m}]_{A_{m q}}^m
    double multi_constant = 0.0;             // [omega_vec]
    double comparison_factor = 0.0;          // smallest admissible C
};

ImplicationReport vweight4_check(const WeightVector& weights,
                                 std::span<const ExponentField> exponents,
                                 const ExponentField& q, double alpha, const CubeFamily& cubes);

/// Empirical absorption constant: over sampled pairs (Q, E) with E a random
/// union of cells, |E| >= fraction |Q|, the minimum observed w(E)/w(Q).
double ainfty_absorption(const GridField& w, const CubeFamily& cubes, double fraction,
                         int samples, Rng& rng);

} // namespace varlex
