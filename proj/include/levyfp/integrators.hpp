#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>

#include "levyfp/grid.hpp"
#include "levyfp/operators.hpp"

namespace levyfp {

/// Direct solve against a stored dense factorization with a residual check and
/// one step of iterative refinement.
Vector solve_linear(const Eigen::PartialPivLU<Matrix>& lu, const Matrix& A, const Vector& rhs);

/// Implicit Euler for the homogeneous equation: (I - dt L) f^{n+1} = f^n.
/// The factorization is computed once; each step is a pair of triangular solves.
class HomogeneousStepper {
public:
    HomogeneousStepper(const LfpOperator& op, double dt);

    Vector step(const Vector& f) const;
    const LfpOperator& op() const { return *op_; }
    double dt() const { return dt_; }

private:
    std::shared_ptr<const LfpOperator> op_;
    double dt_;
    Matrix system_;
    Eigen::PartialPivLU<Matrix> lu_;
};

/// One-off step helper matching the spec operation signature.
Vector step_homogeneous(const LfpOperator& op, const Vector& f, double dt);

/// Fully implicit Euler for the kinetic equation with centered periodic
/// transport: (I + dt T - dt L) f^{n+1} = f^n, factorized once per
/// (operator, grid, dt) with a sparse LU.
class KineticEulerStepper {
public:
    KineticEulerStepper(const LfpOperator& op, const PhaseGrid& pg, double dt);

    Matrix step(const Matrix& f) const;
    const PhaseGrid& pg() const { return pg_; }

private:
    std::shared_ptr<const LfpOperator> op_;
    PhaseGrid pg_;
    double dt_;
    Eigen::SparseMatrix<double> system_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

Matrix step_kinetic_euler(const LfpOperator& op, const PhaseGrid& pg, const Matrix& f, double dt);

/// C^1 piecewise-cubic Hermite reconstruction of periodic samples with centered
/// finite-difference slopes, evaluated at an arbitrary point (wrapped into the period).
double hermite_reconstruct(const Vector& u, double x_query, double period);

/// Strang splitting: backward semi-Lagrangian transport over dt/2, Crank-Nicolson
/// collision step over dt, transport over dt/2.
class SemiLagrangianStepper {
public:
    SemiLagrangianStepper(const LfpOperator& op, const PhaseGrid& pg, double dt);

    Matrix step(const Matrix& f) const;

private:
    std::shared_ptr<const LfpOperator> op_;
    PhaseGrid pg_;
    double dt_;
    Matrix forward_;  // I + dt/2 L
    Eigen::PartialPivLU<Matrix> lu_;  // of I - dt/2 L

    Matrix transport_half(const Matrix& f) const;
};

Matrix step_kinetic_sl(const LfpOperator& op, const PhaseGrid& pg, const Matrix& f, double dt);

}  // namespace levyfp
