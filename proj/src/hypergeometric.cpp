#include "levyfp/hypergeometric.hpp"

#include <cmath>
#include <stdexcept>

namespace levyfp {

double gauss_2f1(double a, double b, double c, double z) {
    if (!(std::abs(z) <= 0.75)) throw std::domain_error("gauss_2f1: |z| must be <= 0.75");
    if (c <= 0.0 && c == std::floor(c)) throw std::domain_error("gauss_2f1: c must not be a nonpositive integer");

    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < 600; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= 1e-14 * std::abs(sum)) return sum;
    }
    throw std::runtime_error("gauss_2f1: series did not converge to relative tolerance 1e-13");
}

}  // namespace levyfp
