#pragma once

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"
#include "varlex/matrix_weight.hpp"
#include "varlex/rng.hpp"

#include <string>

namespace varlex {

/// Analytic exponent families used by experiment configs and tests.
///   constant:  p0
///   sine:      base + amp sin(2 pi freq (x0 + x1) / (2L))
///   logdecay:  p_inf + amp / log(e + |x|)        (log-Hoelder continuous)
///   jump:      base + amp on {x0 > 0}            (not log-Hoelder; diagnostic)
ExponentField make_exponent(const DomainGrid& grid, const std::string& family, double base,
                            double amp = 0.0, double freq = 1.0,
                            ExponentClass required = ExponentClass::P);

/// Weight families.
///   constant:           c
///   power:              |x|^gamma (cell centers never hit the origin)
///   logbump:            exp(amp exp(-|x - c|^2 / (2 w^2)))
///   random-log-uniform: exp(U(-spread, spread)) iid per cell
GridField constant_weight(const DomainGrid& grid, double value);
GridField power_weight(const DomainGrid& grid, double gamma);
GridField logbump_weight(const DomainGrid& grid, double amp, double center, double width);
GridField random_log_uniform_weight(const DomainGrid& grid, double spread, Rng& rng);
/// 1 everywhere except one huge cell; drives the spiked-constant experiments.
GridField spiked_weight(const DomainGrid& grid, long cell, double height);

/// Probe fields.
GridField indicator_probe(const DomainGrid& grid, const DyadicCube& cube);
GridField random_probe(const DomainGrid& grid, Rng& rng);           // iid U[0,1)
GridField bump_probe(const DomainGrid& grid, double center, double width, double floor = 0.0);
/// Heavy-tailed nonnegative field scale * U^6: localized spikes that give a
/// stopping-time decomposition genuine dynamic range.
GridField spiky_probe(const DomainGrid& grid, double scale, Rng& rng);

/// Random SPD matrix field: per cell R(theta) diag(lambda) R(theta)^T with
/// log-uniform eigenvalues in exp(+-spread) and smoothly varying rotation.
MatrixWeightField random_spd_field(const DomainGrid& grid, int d, double spread, Rng& rng);

/// Random vector probe, components iid U(-1, 1).
VectorField random_vector_probe(const DomainGrid& grid, int d, Rng& rng);

} // namespace varlex
