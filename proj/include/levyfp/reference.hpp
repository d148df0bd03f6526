#pragma once

#include <vector>

#include "levyfp/alpha.hpp"
#include "levyfp/grid.hpp"
#include "levyfp/stable_density.hpp"

namespace levyfp {

/// Homogeneous reference: mixture of rescaled stable densities relaxing to mu_a.
struct Tc1Params {
    double alpha = 1.0;
    std::vector<double> theta{0.75, 0.25};
    std::vector<double> centers{2.0, -6.0};
};

/// f(t,v) = sum_i theta_i sigma(t)^{-1} mu_a((v - w_i e^{-(t+1)}) / sigma(t)),
/// sigma(t) = (1 - e^{-alpha (t+1)})^{1/alpha}.
double exact_homogeneous(const Tc1Params& p, double t, double v, const DensityOptions& opt = {});

/// Table-accelerated variant for grid sweeps.
double exact_homogeneous(const Tc1Params& p, double t, double v, const DensityTable& table);

/// Kinetic reference (alpha = 1): family parametrized by (t0, x0, v0).
struct Tc3Params {
    double t0 = 0.5;
    double x0 = 0.0;
    double v0 = 1.0;
};

/// Piecewise exponent of the Fourier-space integral, continuous across the branch
/// points; tau(t) = 1 - e^{-t}, eta(t) = t - tau(t).
double g_exponent(double t, double xi);

/// Pointwise reference value at solver time t (formula time t + t0):
/// Cauchy profile plus the oscillatory correction integral.
double exact_kinetic(const Tc3Params& p, double t, double x, double v);

/// Reference sampled on a full phase grid at solver time t. The correction
/// integral separates into cos/sin components that only depend on v, so a
/// snapshot costs one pair of quadratures per velocity node.
Matrix exact_kinetic_grid(const Tc3Params& p, double t, const PhaseGrid& pg);

struct ErrorNorms {
    double linf = 0.0;
    double l2mu = 0.0;
};

/// Sup and weighted-l2(M^{-1}) error between fields on the same grid.
ErrorNorms error_norms(const Vector& fnum, const Vector& fref, double h, const Vector& M);
ErrorNorms error_norms(const Matrix& fnum, const Matrix& fref, double dx, double dv, const Vector& M);

}  // namespace levyfp
