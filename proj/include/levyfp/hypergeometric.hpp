#pragma once

namespace levyfp {

/// Gauss hypergeometric function 2F1(a,b;c;z) by direct series summation,
/// restricted to |z| <= 0.75 where the series converges comfortably
/// (usage in the truncated operator guarantees |z| = |j/K| <= 1/2).
double gauss_2f1(double a, double b, double c, double z);

}  // namespace levyfp
