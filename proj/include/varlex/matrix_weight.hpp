#pragma once

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"
#include "varlex/weights.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace varlex {

/// Vector-valued samples, d components per cell (cell-major layout).
struct VectorField {
    DomainGrid grid;
    int d = 1;
    std::vector<double> data;

    VectorField() = default;
    VectorField(DomainGrid g, int dim_d);

    Eigen::VectorXd at(long cell) const;
    void set(long cell, const Eigen::VectorXd& v);
    /// Euclidean magnitude per cell.
    GridField magnitude() const;
};

/// Per-cell symmetric positive-definite d x d matrix samples W(x), d <= 4.
class MatrixWeightField {
public:
    MatrixWeightField(DomainGrid grid, int d, std::vector<double> row_major_blocks);
    static MatrixWeightField constant(const DomainGrid& grid, const Eigen::MatrixXd& w);

    const DomainGrid& grid() const { return grid_; }
    int d() const { return d_; }
    Eigen::MatrixXd at(long cell) const;
    Eigen::MatrixXd inverse_at(long cell) const;
    const std::vector<double>& raw() const { return data_; }

    /// x -> |W(x) e| for a fixed vector e.
    GridField action_magnitude(const Eigen::VectorXd& e) const;
    /// x -> ||W(x)|| (spectral norm = largest eigenvalue, W is SPD).
    GridField operator_norm_field() const;

private:
    DomainGrid grid_;
    int d_;
    std::vector<double> data_;
    std::vector<double> inverse_; // cached per-cell inverses
};

/// Spectral norm of a general small matrix.
double operator_norm(const Eigen::MatrixXd& a);

/// Cube-average norm <r>_{p(.),Q}(v) = |Q|^{-1/p_Q} || chi_Q |W(.)v| ||_{p(.)}.
double avg_norm(const MatrixWeightField& w, const ExponentField& p, const DyadicCube& cube,
                const Eigen::VectorXd& v);
/// Same with the dual norm r*(x,v) = |W^{-1}(x) v|.
double avg_norm_dual(const MatrixWeightField& w, const ExponentField& p, const DyadicCube& cube,
                     const Eigen::VectorXd& v);

enum class ReduceKind { Primal, Dual };

/// A constant SPD matrix M whose induced norm is equivalent to the cube
/// average norm: <r>(v) <= |Mv| <= factor * <r>(v), factor <= sqrt(d)(1+eps).
/// Computed from the minimum-volume enclosing ellipsoid of the unit ball of
/// <r>, sampled in `directions` boundary directions, then certified on a
/// held-out direction set.
struct ReducingOperator {
    DyadicCube cube;
    std::string exponent_tag; // "primal" (q) or "dual" (p')
    Eigen::MatrixXd matrix;
    double certified_lower = 1.0; // min over held-out of |Mv| / <r>(v)
    double certified_upper = 1.0; // max over held-out of |Mv| / <r>(v)
    int mvee_iterations = 0;
};

ReducingOperator reducing_operator(const MatrixWeightField& w, ReduceKind kind,
                                   const ExponentField& exponent, const DyadicCube& cube,
                                   int directions = 0, int held_out = 256,
                                   double mvee_tolerance = 1e-6, int mvee_max_iterations = 10000);

/// Direct matrix constant
///   sup_Q |Q|^{alpha/n - 1} || || ||W^{-1}(y) W(x)|| chi_Q(y) ||_{p'(.),y}
///                              chi_Q(x) ||_{q(.),x}.
/// Per cube the cost is O(cells^2 d^3); `cell_pair_budget` guards runs.
WeightConstantReport matrix_apq_direct(const MatrixWeightField& w, const ExponentField& p,
                                       const ExponentField& q, double alpha,
                                       const CubeFamily& cubes,
                                       long cell_pair_budget = 1L << 26);

/// Reduced-operator route: sup_Q || W_Q^{q(.)}  Wbar_Q^{p'(.)} ||.
WeightConstantReport matrix_apq_reduced(const MatrixWeightField& w, const ExponentField& p,
                                        const ExponentField& q, double alpha,
                                        const CubeFamily& cubes, int directions = 0);

/// Christ-Goldberg fractional maximal operator
///   sup over cubes containing x of |Q|^{alpha/n - 1}
///   integral_Q |W(x) W^{-1}(y) f(y)| dy.
GridField christ_goldberg(const VectorField& f, const MatrixWeightField& w, double alpha,
                          const CubeFamily& cubes);

/// Vector averaging operator (|Q|^{alpha/n - 1} integral_Q f) chi_Q.
VectorField vector_average(const VectorField& f, double alpha, const DyadicCube& cube);

/// Scalar constants of the fields |W(.)e| and ||W(.)||; the latter is
/// controlled by d * [W] through the basis decomposition
/// ||W|| <= sum_i |W e_i| and the summed-weight triangle inequality.
struct ScalarProjectionReport {
    WeightConstantReport direction; // of |W e|
    WeightConstantReport norm;      // of ||W||
    double matrix_constant = 0.0;   // direct [W]
    double comparison = 0.0;        // [||W||] / (d [W])
};

ScalarProjectionReport scalar_projections(const MatrixWeightField& w, const Eigen::VectorXd& e,
                                          const ExponentField& p, const ExponentField& q,
                                          double alpha, const CubeFamily& cubes);

} // namespace varlex
