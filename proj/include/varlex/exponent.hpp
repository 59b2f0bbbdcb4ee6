#pragma once

#include "varlex/grid.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace varlex {

/// Exponent classes: P requires 1 < p- <= p+ < inf, P1 relaxes to p- >= 1,
/// P0 to p- > 0. Constructors tag the field explicitly.
enum class ExponentClass { P, P1, P0 };

std::string to_string(ExponentClass c);
ExponentClass exponent_class_from_string(const std::string& s);

/// Grid-sampled exponent function p(.) with cached essential bounds.
class ExponentField {
public:
    static ExponentField create(GridField values, ExponentClass required = ExponentClass::P);
    static ExponentField constant(const DomainGrid& grid, double p0,
                                  ExponentClass required = ExponentClass::P);

    const GridField& field() const { return values_; }
    const DomainGrid& grid() const { return values_.grid; }
    double operator[](long cell) const { return values_[cell]; }

    double p_minus() const { return p_minus_; }
    double p_plus() const { return p_plus_; }
    ExponentClass cls() const { return cls_; }
    bool is_constant(double tol = 0.0) const { return p_plus_ - p_minus_ <= tol; }

    /// Essential bounds over the cube (min/max over covered cell samples).
    double p_minus_on(const DyadicCube& cube) const;
    double p_plus_on(const DyadicCube& cube) const;

private:
    ExponentField(GridField values, ExponentClass cls, double lo, double hi)
        : values_(std::move(values)), cls_(cls), p_minus_(lo), p_plus_(hi) {}

    GridField values_;
    ExponentClass cls_;
    double p_minus_;
    double p_plus_;
};

/// Pointwise conjugate p'(.) = p(.)/(p(.) - 1). Requires class P so the
/// result stays bounded; (p')' = p up to roundoff.
ExponentField conjugate(const ExponentField& p);

/// q(.) from 1/q = 1/p - alpha/n. Requires 1/p(x) - alpha/n > 0 everywhere
/// and alpha/n in [0, m); reports the first offending cell otherwise.
ExponentField derive_q(const ExponentField& p, double alpha, int dim, int m);

/// Pointwise scalar multiple s * p(.) (used for the m p'(.) weight classes).
ExponentField scale_exponent(const ExponentField& p, double factor,
                             ExponentClass required = ExponentClass::P);

/// Measured log-Hoelder constants of a sampled exponent.
///
/// local:      max over cell pairs with h <= |x-y| < 1/2 of |p(x)-p(y)| * (-log|x-y|)
/// asymptotic: max over cells of |p(x)-p_inf| * log(e+|x|)
struct LogHolderReport {
    double local_constant = 0.0;
    double asymptotic_constant = 0.0;
    double p_infinity = 0.0;
};

/// p_inf defaults to the sampled value at the cell farthest from the origin
/// (deterministic tie-break by flat index).
LogHolderReport log_holder(const ExponentField& p, std::optional<double> p_infinity = {});

/// Cube-local exponents for an m-tuple p_1(.), ..., p_m(.):
///   1/eta(Q)  = sum_i 1/(p_i)-(Q)
///   1/delta(Q) = 1/eta(Q) - alpha/n
/// plus the per-factor harmonic means 1/p_Q = <1/p>_Q.
struct CubeExponents {
    std::vector<double> p_minus; // per factor
    std::vector<double> p_plus;
    std::vector<double> harmonic_mean;
    double eta = 0.0;
    double delta = 0.0;
};

CubeExponents cube_exponents(std::span<const ExponentField> p_list, double alpha,
                             const DyadicCube& cube);

/// Harmonic mean of a single exponent over a cube (1/p_Q = <1/p>_Q).
double harmonic_mean_on(const ExponentField& p, const DyadicCube& cube);

} // namespace varlex
