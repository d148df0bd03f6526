#include "levyfp/stable_density.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace levyfp {

namespace {

using boost::math::quadrature::gauss_kronrod;

double check_finite_v(double v) {
    if (!std::isfinite(v)) throw std::domain_error("eval_density: v must be finite");
    return std::abs(v);
}

struct Integrand {
    double alpha;
    double v;
    double operator()(double xi) const { return std::cos(v * xi) * std::exp(-std::pow(xi, alpha) / alpha); }
};

/// Decay point: exp(-xi^a/a) < 3e-20 beyond xi_star.
double decay_point(double alpha) { return std::pow(45.0 * alpha, 1.0 / alpha); }

}  // namespace

double eval_density_quadrature(const AlphaParam& alpha, double v, const DensityOptions& opt) {
    const double a = alpha.value();
    const double av = check_finite_v(v);
    const Integrand f{a, av};
    const double xs = decay_point(a);

    double total = 0.0;
    double err_total = 0.0;
    auto segment = [&](double lo, double hi, int depth) {
        double err = 0.0;
        const double val = gauss_kronrod<double, 15>::integrate(f, lo, hi, depth, 1e-13, &err);
        err_total += err;
        return val;
    };
    // the envelope has a xi^{a-1}-type derivative singularity at 0; the power
    // substitution xi = w^p with p a >= 3 makes the integrand C^2 there
    auto head_segment = [&](double hi) {
        const double p = std::ceil(3.0 / a);
        auto g = [&](double w) { return f(std::pow(w, p)) * p * std::pow(w, p - 1.0); };
        double err = 0.0;
        const double val =
            gauss_kronrod<double, 15>::integrate(g, 0.0, std::pow(hi, 1.0 / p), opt.max_depth, 1e-13, &err);
        err_total += err;
        return val;
    };

    if (av * xs <= 10.0) {
        // no meaningful oscillation: head panel plus one adaptive panel to xi_star
        const double mid = std::min(1.0, xs / 2.0);
        total = head_segment(mid) + segment(mid, xs, opt.max_depth);
    } else {
        // segments aligned to the zeros of cos(v xi): xi_k = (pi/2 + k pi)/v.
        // The pieces alternate in sign; compensated summation keeps the cancellation benign.
        const double half_period = M_PI / av;
        double sum = head_segment(std::min(0.5 * half_period, xs));
        double comp = 0.0;  // Kahan carry
        double lo = 0.5 * half_period;
        std::size_t k = 0;
        while (lo < xs) {
            const double hi = std::min(lo + half_period, xs);
            const double piece = segment(lo, hi, (k < 4) ? opt.max_depth : 6);
            const double y = piece - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            lo = hi;
            ++k;
        }
        total = sum;
    }
    if (!(err_total <= opt.tol)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e > %.3e", err_total, opt.tol);
        throw std::runtime_error(std::string("eval_density: estimated quadrature error ") + buf);
    }
    return total / M_PI;
}

double eval_density(const AlphaParam& alpha, double v, const DensityOptions& opt) {
    const double av = check_finite_v(v);
    if (alpha.is_cauchy()) return 1.0 / (M_PI * (1.0 + av * av));
    if (alpha.is_gaussian()) return std::exp(-av * av / 2.0) / std::sqrt(2.0 * M_PI);
    return eval_density_quadrature(alpha, av, opt);
}

Vector sample_equilibrium(const AlphaParam& alpha, const VelocityGrid& grid, const DensityOptions& opt) {
    const long n = grid.size();
    Vector M(n);
    for (long j = 0; j <= grid.J; ++j) {
        const double m = eval_density(alpha, grid.v(j), opt);
        M[grid.idx(j)] = m;
        M[grid.idx(-j)] = m;  // evenness enforced bit-exactly
    }
    for (long i = 0; i < n; ++i)
        if (!(M[i] > 0.0)) throw std::runtime_error("sample_equilibrium: non-positive density sample");
    return M;
}

DensityTable::DensityTable(const AlphaParam& alpha, double umax, double du, const DensityOptions& opt)
    : alpha_(alpha), du_(du), umax_(umax), opt_(opt) {
    if (!(du > 0.0) || !(umax > 0.0)) throw std::invalid_argument("DensityTable: bad range");
    const std::size_t n = static_cast<std::size_t>(std::ceil(umax / du)) + 6;
    values_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) values_[k] = eval_density(alpha_, static_cast<double>(k) * du_, opt_);
}

double DensityTable::operator()(double u) const {
    u = std::abs(u);
    const double s = u / du_;
    const long n = static_cast<long>(values_.size()) - 1;
    long i0 = static_cast<long>(std::floor(s)) - 2;  // 6-point stencil i0..i0+5
    if (i0 + 5 > n) return eval_density(alpha_, u, opt_);
    if (i0 < 0) i0 = 0;
    const double t = s - static_cast<double>(i0);
    // Lagrange interpolation on equispaced nodes 0..5
    double result = 0.0;
    for (int m = 0; m < 6; ++m) {
        double w = 1.0;
        for (int l = 0; l < 6; ++l) {
            if (l == m) continue;
            w *= (t - l) / static_cast<double>(m - l);
        }
        result += w * values_[static_cast<std::size_t>(i0 + m)];
    }
    return result;
}

}  // namespace levyfp
