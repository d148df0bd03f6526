#include "levyfp/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace levyfp {

namespace {

double phi_d1(double a, double t) {
    if (a == 1.0) return -std::log(t);
    return std::pow(t, 1.0 - a) / ((a - 1.0) * a);
}

double phi_d2(double a, double t) { return -std::pow(t, -a) / a; }

}  // namespace

double phi_alpha(const AlphaParam& alpha, double t) {
    const double a = alpha.value();
    if (!(t > 0.0)) throw std::domain_error("phi_alpha: t must be positive");
    if (a == 2.0 || a == 0.0) throw std::domain_error("phi_alpha: formula is singular at alpha in {0,2}");
    if (a == 1.0) return t - t * std::log(t);
    return std::pow(t, 2.0 - a) / ((2.0 - a) * (a - 1.0) * a);
}

WeightTable build_weights(const AlphaParam& alpha, double h, long K) {
    const double a = alpha.value();
    if (a >= 2.0) throw std::invalid_argument("build_weights: alpha must be strictly inside (0,2)");
    if (!(h > 0.0)) throw std::invalid_argument("build_weights: h must be positive");
    if (K < 3 || K % 2 == 0) throw std::invalid_argument("build_weights: K must be odd and >= 3");

    const double scale = alpha.c1() / std::pow(h, 1.0 + a);
    auto phi = [&](double t) { return phi_alpha(alpha, t); };
    auto phi1 = [&](double t) { return phi_d1(a, t); };

    WeightTable w;
    w.alpha = a;
    w.h = h;
    w.K = K;
    w.beta.resize(static_cast<std::size_t>(K));

    // k = 1 carries the singular part of the integral
    w.beta[0] = scale * (1.0 / (2.0 - a) - phi_d2(a, 1.0) - (phi1(3.0) + 3.0 * phi1(1.0)) / 2.0 +
                         phi(3.0) - phi(1.0));
    for (long k = 2; k <= K; ++k) {
        const double kk = static_cast<double>(k);
        double b;
        if (k % 2 == 0)
            b = 2.0 * (phi1(kk + 1.0) + phi1(kk - 1.0) - phi(kk + 1.0) + phi(kk - 1.0));
        else
            b = -(phi1(kk + 2.0) + 6.0 * phi1(kk) + phi1(kk - 2.0)) / 2.0 + phi(kk + 2.0) - phi(kk - 2.0);
        w.beta[static_cast<std::size_t>(k - 1)] = scale * b;
    }

    const double Kd = static_cast<double>(K);
    w.beta_boundary = 0.5 * scale *
                      (2.0 * phi_d2(a, Kd) + 2.0 * phi(Kd) - 2.0 * phi(Kd - 2.0) - phi1(Kd - 2.0) -
                       3.0 * phi1(Kd));
    return w;
}

Vector apply_lambda_fullline(const WeightTable& w, const Vector& f) {
    const long n = f.size();
    Vector out = Vector::Zero(n);
    for (long j = 0; j < n; ++j) {
        double acc = 0.0;
        const double fj = f[j];
        for (long k = 1; k <= w.K; ++k) {
            const double fp = (j + k < n) ? f[j + k] : 0.0;
            const double fm = (j - k >= 0) ? f[j - k] : 0.0;
            acc += w.beta[static_cast<std::size_t>(k - 1)] * (fp + fm - 2.0 * fj);
        }
        out[j] = acc * w.h;
    }
    return out;
}

}  // namespace levyfp
