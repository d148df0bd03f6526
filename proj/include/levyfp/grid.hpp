#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace levyfp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform symmetric velocity mesh v_j = j h, j = -J..J, with the integral
/// truncation index K (L_W = K h >= 2 L, K odd).
struct VelocityGrid {
    double h = 0.0;  ///< mesh size
    long J = 0;      ///< half point count; 2J+1 points
    long K = 0;      ///< integral truncation index, odd, >= 2J

    VelocityGrid(double h_, long J_, long K_) : h(h_), J(J_), K(K_) {
        if (!(h > 0.0)) throw std::invalid_argument("VelocityGrid: h must be positive");
        if (J < 1) throw std::invalid_argument("VelocityGrid: J must be >= 1");
        if (K % 2 == 0 || K < 2 * J) throw std::invalid_argument("VelocityGrid: K must be odd and >= 2J");
    }

    /// Grid with the default truncation K = 10 J + 1.
    static VelocityGrid with_default_K(double h, long J) { return VelocityGrid(h, J, 10 * J + 1); }

    long size() const { return 2 * J + 1; }
    double L() const { return static_cast<double>(J) * h; }
    double LW() const { return static_cast<double>(K) * h; }
    double v(long j) const { return static_cast<double>(j) * h; }
    /// array index of velocity index j in {-J..J}
    long idx(long j) const { return j + J; }
    /// velocity index of array index i in {0..2J}
    long vel(long i) const { return i - J; }
};

/// Periodic space mesh x_i = i dx, i in Z/(Nx Z), dx = P/Nx, paired with a velocity grid.
struct PhaseGrid {
    long Nx = 0;
    double period = 1.0;
    VelocityGrid vgrid;

    PhaseGrid(long Nx_, double period_, VelocityGrid vgrid_) : Nx(Nx_), period(period_), vgrid(vgrid_) {
        if (Nx < 3 || Nx % 2 == 0) throw std::invalid_argument("PhaseGrid: Nx must be odd and >= 3");
        if (!(period > 0.0)) throw std::invalid_argument("PhaseGrid: period must be positive");
    }

    double dx() const { return period / static_cast<double>(Nx); }
    double x(long i) const { return static_cast<double>(i) * dx(); }
    long wrap(long i) const { long m = i % Nx; return m < 0 ? m + Nx : m; }
};

}  // namespace levyfp
