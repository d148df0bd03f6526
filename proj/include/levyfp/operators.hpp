#pragma once

#include <optional>

#include "levyfp/alpha.hpp"
#include "levyfp/grid.hpp"
#include "levyfp/stable_density.hpp"
#include "levyfp/weights.hpp"

namespace levyfp {

/// Truncated discrete fractional Laplacian on [-Jh, Jh] with integral truncation
/// at Kh: diagonal mass-removal term, interior weight matrix with algebraic
/// (J/l)^gamma folding onto the columns +-J, and the hypergeometric far-field
/// matrix on those columns. gamma_decay defaults to 1+alpha.
Matrix assemble_lambda_truncated(const AlphaParam& alpha, const VelocityGrid& grid, double gamma_decay,
                                 const WeightTable& w);
Matrix assemble_lambda_truncated(const AlphaParam& alpha, const VelocityGrid& grid, double gamma_decay);

/// Half-point fluxes (VM)_{j+1/2} = -(1/2) sum_{k=-j..j} (Lambda M)_k h for j >= 0,
/// antisymmetric extension for j < 0. Entry m of the result is the flux at
/// half-point -J + m + 1/2, m = 0..2J-1.
Vector compute_vm(const Vector& lambda_M, double h);

/// Exterior-mass parameter I_alpha^L = (1 - sum_j M_j h) / (2 M_J), clamped at 0
/// (with a warning counter) if the bracket goes negative through rounding.
double exterior_mass(const Vector& M, double h);

/// Alpha-aware variant: at alpha = 2 with L large enough that the discrete
/// formula degenerates (M_J underflows), returns the Gaussian closed-form
/// Mills ratio instead.
double exterior_mass(const AlphaParam& alpha, const VelocityGrid& grid, const DensityOptions& opt = {});

/// Drift matrix with centered interior fluxes and the mass-corrected boundary
/// fluxes on rows +-J involving I_alpha^L.
Matrix assemble_gamma_truncated(const Vector& vm, const Vector& M, double I_L, const Matrix& lambda_mat,
                                const VelocityGrid& grid);

/// Assembled truncated Levy-Fokker-Planck operator and its companions.
struct LfpOperator {
    VelocityGrid grid;
    double alpha = 0.0;
    double gamma_decay = 0.0;
    Matrix L_mat;       ///< L = Gamma + Lambda
    Matrix lambda_mat;  ///< truncated fractional Laplacian (classical Laplacian at alpha = 2)
    Vector M;           ///< equilibrium samples
    Vector vm;          ///< half-point fluxes, entry m at half-point -J + m + 1/2
    double I_L = 0.0;   ///< exterior-mass parameter

    /// weighted mass h sum_{|j|<J} f_j + (h+I_L)(f_J + f_{-J}), the quantity the
    /// implicit scheme conserves exactly
    double weighted_mass(const Vector& f) const;
    /// plain discrete mass sum_j f_j h
    double mass(const Vector& f) const;
    /// l2(M^{-1}) norm
    double norm_l2Minv(const Vector& f) const;
};

/// Full assembly pipeline: sample M, Lambda matrix, VM, I_L, Gamma matrix, sum.
/// Dispatches to the Gaussian limit branch at alpha = 2.
LfpOperator assemble_lfp(const AlphaParam& alpha, const VelocityGrid& grid,
                         std::optional<double> gamma_decay = std::nullopt, const DensityOptions& opt = {});

/// alpha -> 2^- limit: conservative Scharfetter-Gummel-like flux form
///   G_{j+1/2} = (M_j + M_{j+1})/(2h) (f_{j+1}/M_{j+1} - f_j/M_j)
/// with zero fluxes at the domain ends. Symmetric in the M^{-1} inner product.
LfpOperator assemble_lfp_gaussian_limit(const VelocityGrid& grid, const DensityOptions& opt = {});

/// Number of times exterior_mass clamped a negative bracket (diagnostic).
long exterior_mass_clamp_count();

}  // namespace levyfp
