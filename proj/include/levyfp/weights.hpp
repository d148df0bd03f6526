#pragma once

#include <vector>

#include "levyfp/alpha.hpp"
#include "levyfp/grid.hpp"

namespace levyfp {

/// Antiderivative stack of the quadrature kernel: phi_a(t) = t^{2-a}/((2-a)(a-1)a),
/// degenerating to t - t ln t at a = 1. Valid strictly inside (0,2).
double phi_alpha(const AlphaParam& alpha, double t);

/// Huang-Oberman quadrature weights beta_k^h, k = 1..K (beta_{-k} = beta_k implied,
/// beta_0 never stored). beta[K] carries the interior formula; the boundary value
/// replacing it on a truncated domain is kept separately.
struct WeightTable {
    double alpha = 0.0;
    double h = 0.0;
    long K = 0;
    std::vector<double> beta;   ///< beta[k-1] = beta_k^h, interior formula, k = 1..K
    double beta_boundary = 0.0; ///< boundary replacement for beta_{+-K}

    double at(long k) const { return beta[static_cast<std::size_t>(std::labs(k)) - 1]; }
};

/// Builds the weight table for alpha strictly inside (0,2), h > 0, K odd >= 3.
WeightTable build_weights(const AlphaParam& alpha, double h, long K);

/// Full-line discrete fractional Laplacian with zero extension of f outside its
/// index range: (Lf)_j = sum_{k=1..K} beta_k (f_{j+k} + f_{j-k} - 2 f_j) h.
/// Output has the same index range as the input.
Vector apply_lambda_fullline(const WeightTable& w, const Vector& f);

}  // namespace levyfp
