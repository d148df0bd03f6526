#include "levyfp/reference.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace levyfp {

namespace {

double sigma_of(double alpha, double t) { return std::pow(-std::expm1(-alpha * (t + 1.0)), 1.0 / alpha); }

double mixture(const Tc1Params& p, double t, double v, const std::function<double(double)>& mu) {
    if (!(t >= 0.0)) throw std::domain_error("exact_homogeneous: t must be >= 0");
    const double sig = sigma_of(p.alpha, t);
    const double decay = std::exp(-(t + 1.0));
    double acc = 0.0;
    for (std::size_t i = 0; i < p.theta.size(); ++i)
        acc += p.theta[i] / sig * mu((v - p.centers[i] * decay) / sig);
    return acc;
}

}  // namespace

double exact_homogeneous(const Tc1Params& p, double t, double v, const DensityOptions& opt) {
    const AlphaParam a(p.alpha);
    return mixture(p, t, v, [&](double u) { return eval_density(a, u, opt); });
}

double exact_homogeneous(const Tc1Params& p, double t, double v, const DensityTable& table) {
    return mixture(p, t, v, [&](double u) { return table(u); });
}

double g_exponent(double t, double xi) {
    if (!(t >= 0.0)) throw std::domain_error("g_exponent: t must be >= 0");
    const double tau = -std::expm1(-t);
    const double eta = t - tau;
    if (xi >= 0.0) return xi * tau + eta;
    const double xim = -std::expm1(t);  // -tau/(1-tau)
    if (xi >= xim) return -xi * (2.0 - tau) + eta - 2.0 * std::log1p(-xi);
    return -xi * tau - eta;
}

namespace {

using boost::math::quadrature::gauss_kronrod;

/// cos/sin components of the correction integral at fixed formula time:
///   C(w) = int e^{-g(t,xi)} cos(w xi) dxi,  S(w) = int e^{-g(t,xi)} sin(w xi) dxi.
struct CorrectionCS {
    double C = 0.0;
    double S = 0.0;
};

CorrectionCS correction_cs(double tf, double w) {
    const double tau = -std::expm1(-tf);
    const double eta = tf - tau;
    const double xim = -std::expm1(tf);
    const double denom = tau * tau + w * w;

    CorrectionCS out;
    // right branch: int_0^inf e^{-(xi tau + eta)} {cos,sin}(w xi)
    const double e_eta = std::exp(-eta);
    out.C += e_eta * tau / denom;
    out.S += e_eta * w / denom;
    // left branch: int_{-inf}^{xim} e^{xi tau + eta} {cos,sin}(w xi)
    const double expo = eta + tau * xim;
    if (expo > -700.0) {
        const double e3 = std::exp(expo);
        out.C += e3 * (tau * std::cos(w * xim) + w * std::sin(w * xim)) / denom;
        out.S += e3 * (tau * std::sin(w * xim) - w * std::cos(w * xim)) / denom;
    }
    // middle branch: e^{-eta} e^{xi (2-tau)} (1-xi)^2 {cos,sin}(w xi) on [max(xim, clip), 0]
    double lo = -48.0 / (2.0 - tau);
    lo = -(48.0 + 2.0 * std::log1p(-lo)) / (2.0 - tau);
    lo = std::max(xim, lo);
    if (lo < 0.0) {
        auto envelope = [&](double xi) {
            const double om = 1.0 - xi;
            return std::exp(xi * (2.0 - tau)) * om * om;
        };
        const double tol = 1e-13;
        auto integrate = [&](auto f) {
            const double aw = std::abs(w);
            if (aw * (-lo) <= 6.0) {
                double err;
                return gauss_kronrod<double, 15>::integrate(f, lo, 0.0, 15, tol, &err);
            }
            // segments aligned to half-periods of the oscillation
            const double half = M_PI / aw;
            double acc = 0.0, hi = 0.0;
            while (hi > lo) {
                const double a = std::max(lo, hi - half);
                double err;
                acc += gauss_kronrod<double, 15>::integrate(f, a, hi, 10, tol * half / (-lo), &err);
                hi = a;
            }
            return acc;
        };
        out.C += e_eta * integrate([&](double xi) { return envelope(xi) * std::cos(w * xi); });
        out.S += e_eta * integrate([&](double xi) { return envelope(xi) * std::sin(w * xi); });
    }
    return out;
}

}  // namespace

double exact_kinetic(const Tc3Params& p, double t, double x, double v) {
    const double tf = t + p.t0;
    if (!(tf > 0.0)) throw std::domain_error("exact_kinetic: shifted time must be positive");
    const double tau = -std::expm1(-tf);
    const double w = v - p.v0 * std::exp(-tf);
    const double y = (x + p.x0) - p.v0 * tau;
    const double cauchy = tau / (M_PI * (tau * tau + w * w));
    const CorrectionCS cs = correction_cs(tf, w);
    return cauchy + (cs.C * std::cos(y) - cs.S * std::sin(y)) / M_PI;
}

Matrix exact_kinetic_grid(const Tc3Params& p, double t, const PhaseGrid& pg) {
    const double tf = t + p.t0;
    if (!(tf > 0.0)) throw std::domain_error("exact_kinetic_grid: shifted time must be positive");
    const double tau = -std::expm1(-tf);
    const long Nx = pg.Nx, n = pg.vgrid.size();
    Matrix out(Nx, n);
    for (long j = 0; j < n; ++j) {
        const double v = pg.vgrid.v(pg.vgrid.vel(j));
        const double w = v - p.v0 * std::exp(-tf);
        const double cauchy = tau / (M_PI * (tau * tau + w * w));
        const CorrectionCS cs = correction_cs(tf, w);
        for (long i = 0; i < Nx; ++i) {
            const double y = (pg.x(i) + p.x0) - p.v0 * tau;
            out(i, j) = cauchy + (cs.C * std::cos(y) - cs.S * std::sin(y)) / M_PI;
        }
    }
    return out;
}

ErrorNorms error_norms(const Vector& fnum, const Vector& fref, double h, const Vector& M) {
    if (fnum.size() != fref.size() || fnum.size() != M.size())
        throw std::invalid_argument("error_norms: shape mismatch");
    ErrorNorms e;
    double acc = 0.0;
    for (long i = 0; i < fnum.size(); ++i) {
        const double d = fnum[i] - fref[i];
        e.linf = std::max(e.linf, std::abs(d));
        acc += d * d / M[i];
    }
    e.l2mu = std::sqrt(acc * h);
    return e;
}

ErrorNorms error_norms(const Matrix& fnum, const Matrix& fref, double dx, double dv, const Vector& M) {
    if (fnum.rows() != fref.rows() || fnum.cols() != fref.cols() || fnum.cols() != M.size())
        throw std::invalid_argument("error_norms: shape mismatch");
    ErrorNorms e;
    double acc = 0.0;
    for (long i = 0; i < fnum.rows(); ++i)
        for (long j = 0; j < fnum.cols(); ++j) {
            const double d = fnum(i, j) - fref(i, j);
            e.linf = std::max(e.linf, std::abs(d));
            acc += d * d / M[j];
        }
    e.l2mu = std::sqrt(acc * dx * dv);
    return e;
}

}  // namespace levyfp
