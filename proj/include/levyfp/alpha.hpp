#pragma once

#include <cmath>
#include <stdexcept>

namespace levyfp {

/// Stability index of the symmetric alpha-stable equilibrium.
/// alpha = 2 selects the Gaussian limit branch everywhere it appears.
class AlphaParam {
public:
    explicit AlphaParam(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0) || !(alpha <= 2.0))
            throw std::invalid_argument("AlphaParam: alpha must satisfy 0 < alpha <= 2");
    }

    double value() const { return alpha_; }
    bool is_gaussian() const { return alpha_ == 2.0; }
    bool is_cauchy() const { return alpha_ == 1.0; }

    /// Normalization constant of the singular-integral kernel in dimension one,
    /// C_{1,a} = 2^a Gamma((a+1)/2) / (pi^{1/2} |Gamma(-a/2)|).
    double c1() const {
        const double a = alpha_;
        if (a == 2.0) return 0.0;  // kernel constant vanishes in the limit
        // |Gamma(-a/2)| via reflection: Gamma(-a/2) Gamma(1+a/2) = pi / sin(-pi a/2)
        const double gamma_neg = std::abs(M_PI / (std::sin(-M_PI * a / 2.0) * std::tgamma(1.0 + a / 2.0)));
        return std::pow(2.0, a) * std::tgamma((a + 1.0) / 2.0) / (std::sqrt(M_PI) * gamma_neg);
    }

private:
    double alpha_;
};

}  // namespace levyfp
