#include "levyfp/integrators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace levyfp {

Vector solve_linear(const Eigen::PartialPivLU<Matrix>& lu, const Matrix& A, const Vector& rhs) {
    Vector x = lu.solve(rhs);
    const Vector r = rhs - A * x;
    x += lu.solve(r);  // one refinement pass
    const double res = (rhs - A * x).norm();
    if (!(res <= 1e-12 * rhs.norm() + 1e-300))
        throw std::runtime_error("solve_linear: residual " + std::to_string(res) +
                                 " exceeds 1e-12 * |rhs|; system may be ill-conditioned");
    return x;
}

HomogeneousStepper::HomogeneousStepper(const LfpOperator& op, double dt)
    : op_(std::make_shared<LfpOperator>(op)), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("HomogeneousStepper: dt must be positive");
    const long n = op.grid.size();
    system_ = Matrix::Identity(n, n) - dt * op.L_mat;
    lu_.compute(system_);
}

Vector HomogeneousStepper::step(const Vector& f) const {
    Vector x = lu_.solve(f);
    x += lu_.solve(f - system_ * x);
    if (!x.allFinite()) throw std::runtime_error("HomogeneousStepper: solve produced non-finite values");
    return x;
}

Vector step_homogeneous(const LfpOperator& op, const Vector& f, double dt) {
    return HomogeneousStepper(op, dt).step(f);
}

KineticEulerStepper::KineticEulerStepper(const LfpOperator& op, const PhaseGrid& pg, double dt)
    : op_(std::make_shared<LfpOperator>(op)), pg_(pg), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("KineticEulerStepper: dt must be positive");
    if (pg.vgrid.size() != op.grid.size())
        throw std::invalid_argument("KineticEulerStepper: phase grid and operator disagree");
    const long Nx = pg.Nx, n = pg.vgrid.size();
    const long N = Nx * n;
    const double cfl = dt / (2.0 * pg.dx());

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(Nx * n * n + 2 * N));
    auto id = [&](long i, long j) { return i * n + j; };  // x-major ordering
    for (long i = 0; i < Nx; ++i) {
        for (long j = 0; j < n; ++j) {
            for (long k = 0; k < n; ++k) {
                double val = -dt * op.L_mat(j, k);
                if (j == k) val += 1.0;
                if (val != 0.0) trip.emplace_back(id(i, j), id(i, k), val);
            }
            const double vj = pg.vgrid.v(pg.vgrid.vel(j));
            trip.emplace_back(id(i, j), id(pg.wrap(i + 1), j), cfl * vj);
            trip.emplace_back(id(i, j), id(pg.wrap(i - 1), j), -cfl * vj);
        }
    }
    system_.resize(N, N);
    system_.setFromTriplets(trip.begin(), trip.end());
    system_.makeCompressed();
    lu_.compute(system_);
    if (lu_.info() != Eigen::Success)
        throw std::runtime_error("KineticEulerStepper: sparse factorization failed");
}

Matrix KineticEulerStepper::step(const Matrix& f) const {
    const long Nx = pg_.Nx, n = pg_.vgrid.size();
    if (f.rows() != Nx || f.cols() != n) throw std::invalid_argument("KineticEulerStepper: shape mismatch");
    Vector rhs(Nx * n);
    for (long i = 0; i < Nx; ++i)
        for (long j = 0; j < n; ++j) rhs[i * n + j] = f(i, j);
    const Vector x = lu_.solve(rhs);
    if (!x.allFinite()) throw std::runtime_error("KineticEulerStepper: solve produced non-finite values");
    Matrix out(Nx, n);
    for (long i = 0; i < Nx; ++i)
        for (long j = 0; j < n; ++j) out(i, j) = x[i * n + j];
    return out;
}

Matrix step_kinetic_euler(const LfpOperator& op, const PhaseGrid& pg, const Matrix& f, double dt) {
    return KineticEulerStepper(op, pg, dt).step(f);
}

double hermite_reconstruct(const Vector& u, double x_query, double period) {
    const long N = u.size();
    const double dx = period / static_cast<double>(N);
    const double q = x_query / dx;
    const double qf = std::floor(q);
    const double t = q - qf;
    const long i0 = ((static_cast<long>(qf)) % N + N) % N;
    auto at = [&](long i) { return u[(i % N + N) % N]; };
    const double um = at(i0 - 1), u0 = at(i0), u1 = at(i0 + 1), u2 = at(i0 + 2);
    const double d0 = (u1 - um) / 2.0, d1 = (u2 - u0) / 2.0;  // slopes times dx
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0, h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2, h11 = t3 - t2;
    return h00 * u0 + h10 * d0 + h01 * u1 + h11 * d1;
}

SemiLagrangianStepper::SemiLagrangianStepper(const LfpOperator& op, const PhaseGrid& pg, double dt)
    : op_(std::make_shared<LfpOperator>(op)), pg_(pg), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("SemiLagrangianStepper: dt must be positive");
    if (pg.vgrid.size() != op.grid.size())
        throw std::invalid_argument("SemiLagrangianStepper: phase grid and operator disagree");
    const long n = op.grid.size();
    forward_ = Matrix::Identity(n, n) + (dt / 2.0) * op.L_mat;
    lu_.compute(Matrix::Identity(n, n) - (dt / 2.0) * op.L_mat);
}

Matrix SemiLagrangianStepper::transport_half(const Matrix& f) const {
    const long Nx = pg_.Nx, n = pg_.vgrid.size();
    const double dx = pg_.dx();
    Matrix out(Nx, n);
    for (long j = 0; j < n; ++j) {
        const double vj = pg_.vgrid.v(pg_.vgrid.vel(j));
        // constant departure shift for the whole column: foot = (i - s) dx
        const double s = vj * dt_ / (2.0 * dx);
        const double q0 = -s;
        const double D = std::floor(q0);
        const double t = q0 - D;  // same local coordinate for every i
        const long off = static_cast<long>(D);
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0, h10 = t3 - 2.0 * t2 + t;
        const double h01 = -2.0 * t3 + 3.0 * t2, h11 = t3 - t2;
        // foot lies in cell [i+off, i+off+1]; stencil u_{i+off-1 .. i+off+2}
        const double w0 = -h10 / 2.0;
        const double w1 = h00 - h11 / 2.0;
        const double w2 = h01 + h10 / 2.0;
        const double w3 = h11 / 2.0;
        for (long i = 0; i < Nx; ++i) {
            const long base = i + off;
            auto at = [&](long l) { return f(((l) % Nx + Nx) % Nx, j); };
            out(i, j) = w0 * at(base - 1) + w1 * at(base) + w2 * at(base + 1) + w3 * at(base + 2);
        }
    }
    return out;
}

Matrix SemiLagrangianStepper::step(const Matrix& f) const {
    Matrix g = transport_half(f);
    // Crank-Nicolson collisions, row by row
    for (long i = 0; i < pg_.Nx; ++i) {
        const Vector rhs = forward_ * g.row(i).transpose();
        const Vector sol = lu_.solve(rhs);
        if (!sol.allFinite()) throw std::runtime_error("SemiLagrangianStepper: collision solve failed");
        g.row(i) = sol.transpose();
    }
    return transport_half(g);
}

Matrix step_kinetic_sl(const LfpOperator& op, const PhaseGrid& pg, const Matrix& f, double dt) {
    return SemiLagrangianStepper(op, pg, dt).step(f);
}

}  // namespace levyfp
