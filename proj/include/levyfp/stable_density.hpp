#pragma once

#include <vector>

#include "levyfp/alpha.hpp"
#include "levyfp/grid.hpp"

namespace levyfp {

struct DensityOptions {
    double tol = 1e-10;      ///< absolute quadrature tolerance
    int max_depth = 15;      ///< adaptive bisection depth per segment
};

/// Value of the symmetric stable density
///   mu_a(v) = (1/pi) int_0^inf cos(v xi) exp(-xi^a / a) dxi.
/// Closed forms are used at a = 1 (Cauchy) and a = 2 (standard Gaussian).
double eval_density(const AlphaParam& alpha, double v, const DensityOptions& opt = {});

/// Quadrature branch without the closed-form shortcuts (consistency tests).
double eval_density_quadrature(const AlphaParam& alpha, double v, const DensityOptions& opt = {});

/// Samples M_j = mu_a(v_j), j = -J..J. Symmetric by construction: M_j == M_{-j} exactly.
Vector sample_equilibrium(const AlphaParam& alpha, const VelocityGrid& grid, const DensityOptions& opt = {});

/// Tabulated density with 6-point Lagrange interpolation on a uniform grid.
/// Accelerates the reference-solution sweeps which evaluate mu_a millions of times;
/// falls back to direct quadrature outside the tabulated range.
class DensityTable {
public:
    DensityTable(const AlphaParam& alpha, double umax, double du, const DensityOptions& opt = {});

    double operator()(double u) const;
    const AlphaParam& alpha() const { return alpha_; }

private:
    AlphaParam alpha_;
    double du_;
    double umax_;
    DensityOptions opt_;
    std::vector<double> values_;  // mu_a(k du), k = 0..N
};

}  // namespace levyfp
