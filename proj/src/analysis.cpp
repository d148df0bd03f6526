#include "levyfp/analysis.hpp"

#include <cmath>
#include <cstdlib>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>

namespace levyfp {

double weighted_l2_norm(const Vector& f, const Vector& gamma, double h) {
    if (f.size() != gamma.size()) throw std::invalid_argument("weighted_l2_norm: shape mismatch");
    double s = 0.0;
    for (long i = 0; i < f.size(); ++i) s += f[i] * f[i] * gamma[i];
    return std::sqrt(s * h);
}

double frac_sobolev_seminorm(const Vector& f, double s, const Vector& gamma, double h, long k_max) {
    if (!(s > 0.0) || !(s <= 1.0)) throw std::domain_error("frac_sobolev_seminorm: s must be in (0,1]");
    if (f.size() != gamma.size()) throw std::invalid_argument("frac_sobolev_seminorm: shape mismatch");
    const long n = f.size();
    double acc = 0.0;
    for (long j = 0; j < n; ++j) {
        double row = 0.0;
        for (long k = 1; k <= k_max; ++k) {
            const double fp = (j + k < n) ? f[j + k] : 0.0;
            const double fm = (j - k >= 0) ? f[j - k] : 0.0;
            const double dkp = f[j] - fp, dkm = f[j] - fm;
            row += (dkp * dkp + dkm * dkm) / std::pow(h * static_cast<double>(k), 1.0 + 2.0 * s);
        }
        acc += row * gamma[j];
    }
    return std::sqrt(acc * h * h);
}

Vector diff(const Vector& f, DiffMode mode, double h) {
    const long n = f.size();
    Vector out(n);
    auto at = [&](long i) { return (i >= 0 && i < n) ? f[i] : 0.0; };
    switch (mode) {
        case DiffMode::Forward:
            for (long i = 0; i < n; ++i) out[i] = (at(i + 1) - f[i]) / h;
            break;
        case DiffMode::Centered:
            if (n < 3) throw std::invalid_argument("diff: centered mode needs length >= 3");
            for (long i = 0; i < n; ++i) out[i] = (at(i + 1) - at(i - 1)) / (2.0 * h);
            break;
        case DiffMode::SecondCentered:
            if (n < 5) throw std::invalid_argument("diff: second-centered mode needs length >= 5");
            for (long i = 0; i < n; ++i) out[i] = (at(i + 2) + at(i - 2) - 2.0 * f[i]) / (4.0 * h * h);
            break;
    }
    return out;
}

namespace {

// F = f/M on the M-extended window; f entry i corresponds to M entry i + k_max
Vector ratio_extended(const Vector& f, const Vector& M, long k_max) {
    Vector F = Vector::Zero(M.size());
    for (long i = 0; i < f.size(); ++i) F[i + k_max] = f[i] / M[i + k_max];
    return F;
}

}  // namespace

double sym_form(const Vector& f, const Vector& g, const WeightTable& w, const Vector& M, double h, long k_max) {
    if (M.size() != f.size() + 2 * k_max || f.size() != g.size())
        throw std::invalid_argument("sym_form: M must extend f's range by k_max on both sides");
    if (k_max > w.K) throw std::invalid_argument("sym_form: k_max exceeds the weight table");
    const Vector F = ratio_extended(f, M, k_max);
    const Vector G = ratio_extended(g, M, k_max);
    const long n = M.size();
    double acc = 0.0;
    // fixed summation order (j ascending, |k| ascending, +k before -k) keeps
    // sym_form(f,g) == sym_form(g,f) bit-exact
    for (long j = 0; j < n; ++j) {
        double row = 0.0;
        for (long k = 1; k <= k_max; ++k) {
            const double beta = w.at(k);
            if (j + k < n) row += beta * (F[j] - F[j + k]) * (G[j] - G[j + k]);
            if (j - k >= 0) row += beta * (F[j] - F[j - k]) * (G[j] - G[j - k]);
        }
        acc += row * M[j];
    }
    return 0.5 * acc * h * h;
}

double skew_form(const Vector& f, const Vector& g, const WeightTable& w, const Vector& M, const Vector& vm,
                 double h, long k_max) {
    if (M.size() != f.size() + 2 * k_max || f.size() != g.size())
        throw std::invalid_argument("skew_form: M must extend f's range by k_max on both sides");
    if (vm.size() < f.size() - 1) throw std::invalid_argument("skew_form: vm too short");
    const Vector F = ratio_extended(f, M, k_max);
    const Vector G = ratio_extended(g, M, k_max);
    const long n = M.size();
    double acc = 0.0;
    for (long j = k_max; j < n - k_max; ++j) {
        double row = 0.0;
        for (long k = 1; k <= k_max; ++k) {
            const double beta = w.at(k);
            if (j + k < n) row += beta * (F[j] * G[j + k] - G[j] * F[j + k]);
            if (j - k >= 0) row += beta * (F[j] * G[j - k] - G[j] * F[j - k]);
        }
        acc += row * M[j];
    }
    double single = 0.0;
    for (long i = 0; i + 1 < f.size(); ++i) {
        const long j = i + k_max;
        single += vm[i] * (F[j + 1] * G[j] - F[j] * G[j + 1]);
    }
    return -0.5 * acc * h * h - 0.5 * single;
}

Vector project_equilibrium(const Vector& f, const Vector& M, double h) {
    if (f.size() != M.size()) throw std::invalid_argument("project_equilibrium: shape mismatch");
    const double ratio = f.sum() / M.sum();  // the h factors cancel
    (void)h;
    return ratio * M;
}

double hypocoercivity_energy(const Matrix& f, const EnergyCoefficients& coeffs, const PhaseGrid& pg,
                             const Vector& M) {
    const long Nx = f.rows(), n = f.cols();
    if (Nx != pg.Nx || n != pg.vgrid.size() || M.size() != n)
        throw std::invalid_argument("hypocoercivity_energy: shape mismatch");
    const double dx = pg.dx(), dv = pg.vgrid.h;

    double n2 = 0.0, nx2 = 0.0, nv2 = 0.0, cross = 0.0;
    for (long i = 0; i < Nx; ++i) {
        const long ip = (i + 1) % Nx, im = (i + Nx - 1) % Nx;
        for (long j = 0; j < n; ++j) {
            const double fv = f(i, j);
            const double dxf = (f(ip, j) - f(im, j)) / (2.0 * dx);
            const double fjp = (j + 1 < n) ? f(i, j + 1) : 0.0;
            const double fjm = (j - 1 >= 0) ? f(i, j - 1) : 0.0;
            const double dvf = (fjp - fjm) / (2.0 * dv);
            const double wgt = 1.0 / M[j];
            n2 += fv * fv * wgt;
            nx2 += dxf * dxf * wgt;
            nv2 += dvf * dvf * wgt;
            cross += dxf * dvf * wgt;
        }
    }
    const double cell = dx * dv;
    return (n2 + coeffs.a * nx2 + coeffs.b * nv2 + 2.0 * coeffs.c * cross) * cell;
}

FullLineWindow::FullLineWindow(const AlphaParam& a, double h_, long support_, long K_,
                               const DensityOptions& opt)
    : alpha(a), h(h_), support(support_), K(K_), w(build_weights(a, h_, K_ % 2 == 0 ? K_ + 1 : K_)) {
    K = w.K;
    const long WM = support + K + 1;
    M.resize(2 * WM + 1);
    for (long j = 0; j <= WM; ++j) {
        const double m = eval_density(alpha, static_cast<double>(j) * h, opt);
        M[WM + j] = m;
        M[WM - j] = m;
    }
    // Lambda M on -(support+1) .. (support+1)
    const long R = support + 1;
    lambda_M.resize(2 * R + 1);
    for (long j = -R; j <= R; ++j) {
        double acc = 0.0;
        for (long k = 1; k <= K; ++k)
            acc += w.beta[static_cast<std::size_t>(k - 1)] * (M[WM + j + k] + M[WM + j - k] - 2.0 * M[WM + j]);
        lambda_M[R + j] = acc * h;
    }
    vm = compute_vm(lambda_M, h);
}

Vector FullLineWindow::apply_L(const Vector& f) const {
    const long S = support, n = 2 * S + 1, R = S + 1, WM = S + K + 1;
    if (f.size() != n) throw std::invalid_argument("FullLineWindow: f must live on -support..support");
    auto fat = [&](long j) { return (std::labs(j) <= S) ? f[S + j] : 0.0; };
    auto Fat = [&](long j) { return (std::labs(j) <= S) ? f[S + j] / M[WM + j] : 0.0; };
    auto vm_at = [&](long j) { return vm[R + j]; };  // flux at j+1/2
    Vector out(n);
    for (long j = -S; j <= S; ++j) {
        double lam = 0.0;
        for (long k = 1; k <= K; ++k)
            lam += w.beta[static_cast<std::size_t>(k - 1)] * (fat(j + k) + fat(j - k) - 2.0 * fat(j));
        lam *= h;
        const double drift = (vm_at(j) * (Fat(j + 1) + Fat(j)) - vm_at(j - 1) * (Fat(j) + Fat(j - 1))) / (2.0 * h);
        out[S + j] = lam + drift;
    }
    return out;
}

double FullLineWindow::inner_Minv(const Vector& u, const Vector& v) const {
    const long S = support, WM = S + K + 1;
    double s = 0.0;
    for (long j = -S; j <= S; ++j) s += u[S + j] * v[S + j] / M[WM + j];
    return s * h;
}

double FullLineWindow::S(const Vector& f, const Vector& g) const {
    const long Smax = support, WM = Smax + K + 1;
    // slice M to exactly +-(support + K)
    const Vector Mslice = M.segment(WM - (Smax + K), 2 * (Smax + K) + 1);
    return sym_form(f, g, w, Mslice, h, K);
}

double FullLineWindow::A(const Vector& f, const Vector& g) const {
    const long Smax = support, WM = Smax + K + 1, R = Smax + 1;
    const Vector Mslice = M.segment(WM - (Smax + K), 2 * (Smax + K) + 1);
    // vm aligned with f's range: entry i is the flux at (-support + i) + 1/2
    const Vector vslice = vm.segment(R - Smax, 2 * Smax);
    return skew_form(f, g, w, Mslice, vslice, h, K);
}

double poincare_ratio(const Vector& f, const AlphaParam& alpha, double h, long k_max,
                      const DensityOptions& opt) {
    const long S = (f.size() - 1) / 2;
    FullLineWindow win(alpha, h, S, k_max, opt);
    const long WM = S + win.K + 1;
    const Vector Mcore = win.M.segment(WM - S, 2 * S + 1);
    const Vector pf = project_equilibrium(f, Mcore, h);
    const Vector d = f - pf;
    const double num = weighted_l2_norm(d, Mcore.cwiseInverse(), h);
    if (num <= 1e-14 * weighted_l2_norm(f, Mcore.cwiseInverse(), h)) return 0.0;
    const double den = win.S(f, f);
    return num * num / den;
}

std::vector<std::function<double(double)>> test_battery() {
    std::vector<std::function<double(double)>> battery;
    // 20 seeded pseudo-random profiles: linear interpolation of lattice values on
    // [-12,12] (knot spacing 1/2), tapered to zero at the edges
    for (unsigned seed = 1; seed <= 20; ++seed) {
        std::mt19937 gen(seed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        auto knots = std::make_shared<std::vector<double>>(49);
        for (auto& k : *knots) k = unif(gen);
        (*knots)[0] = (*knots)[48] = 0.0;
        battery.emplace_back([knots](double v) {
            if (std::abs(v) >= 12.0) return 0.0;
            const double s = (v + 12.0) * 2.0;  // knot coordinate
            const long i = static_cast<long>(std::floor(s));
            const double t = s - static_cast<double>(i);
            const double raw = (*knots)[i] * (1.0 - t) + (*knots)[i + 1] * t;
            const double window = std::cos(M_PI * v / 24.0);
            return raw * window * window;
        });
    }
    battery.emplace_back([](double v) { return std::abs(v) <= 0.26 ? 1.0 : 0.0; });            // spike
    battery.emplace_back([](double v) { return std::abs(v) <= 5.0 ? 1.0 : 0.0; });             // step
    battery.emplace_back([](double v) { return std::exp(-v * v); });                           // Gaussian
    battery.emplace_back([](double v) { return std::abs(v) <= 12.0 ? 1.0 / (1.0 + v * v) : 0.0; });
    battery.emplace_back([](double v) { return std::abs(v) <= 12.0 ? std::sin(2.0 * v) * std::exp(-v * v / 8.0) : 0.0; });
    return battery;
}

namespace {

Vector sample_profile(const std::function<double(double)>& fn, double h, long S) {
    Vector f(2 * S + 1);
    for (long j = -S; j <= S; ++j) f[S + j] = fn(static_cast<double>(j) * h);
    return f;
}

}  // namespace

ProbeRatios run_probe_suite(const std::string& suite, const AlphaParam& alpha, double h,
                            const DensityOptions& opt) {
    const auto battery = test_battery();
    ProbeRatios out;
    out.ratio_h.resize(battery.size());
    out.ratio_h2.resize(battery.size());

    for (int half = 0; half < 2; ++half) {
        const double hh = half ? h / 2.0 : h;
        const long S = static_cast<long>(std::ceil(12.0 / hh)) + 4;
        const long K = 2 * S + 9;
        std::optional<FullLineWindow> win;
        if (suite == "poincare" || suite == "commutator") win.emplace(alpha, hh, S, K, opt);

        for (std::size_t b = 0; b < battery.size(); ++b) {
            const Vector f = sample_profile(battery[b], hh, S);
            double r = 0.0;
            if (suite == "poincare") {
                const long WM = S + win->K + 1;
                const Vector Mcore = win->M.segment(WM - S, 2 * S + 1);
                const Vector d = f - project_equilibrium(f, Mcore, hh);
                const double num = weighted_l2_norm(d, Mcore.cwiseInverse(), hh);
                r = (num <= 1e-14) ? 0.0 : num * num / win->S(f, f);
            } else if (suite == "interp") {
                const double s = alpha.value() / 2.0;
                const double eps = 0.1;
                const Vector ones = Vector::Ones(f.size());
                const Vector df = diff(f, DiffMode::Forward, hh);
                const Vector dc = diff(f, DiffMode::Centered, hh);
                const double lhs = weighted_l2_norm(df, ones, hh);
                const double semi_dc = frac_sobolev_seminorm(dc, s, ones, hh, 2 * S);
                const double l2 = weighted_l2_norm(f, ones, hh);
                const double semi_f = frac_sobolev_seminorm(f, s, ones, hh, 2 * S);
                r = (lhs * lhs - eps * semi_dc * semi_dc) / (l2 * l2 + semi_f * semi_f);
            } else if (suite == "commutator") {
                const Vector g = sample_profile(battery[(b + 1) % battery.size()], hh, S);
                const Vector comm = diff(win->apply_L(f), DiffMode::Centered, hh) -
                                    win->apply_L(diff(f, DiffMode::Centered, hh));
                const double num = std::abs(win->inner_Minv(comm, g));
                const Vector df = diff(f, DiffMode::Centered, hh);
                const double nf = std::sqrt(win->inner_Minv(f, f));
                const double ng = std::sqrt(win->inner_Minv(g, g));
                const double ndf = std::sqrt(win->inner_Minv(df, df));
                r = num / (nf * ng + ndf * ng + 1e-300);
            } else {
                throw std::invalid_argument("run_probe_suite: unknown suite `" + suite + "`");
            }
            (half ? out.ratio_h2 : out.ratio_h)[b] = r;
        }
    }
    return out;
}

}  // namespace levyfp
