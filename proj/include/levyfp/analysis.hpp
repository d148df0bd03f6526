#pragma once

#include <functional>
#include <vector>

#include "levyfp/grid.hpp"
#include "levyfp/operators.hpp"
#include "levyfp/weights.hpp"

namespace levyfp {

enum class DiffMode { Forward, Centered, SecondCentered };

/// Hypocoercivity energy coefficients; requires c^2 < a b.
struct EnergyCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    EnergyCoefficients(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
        if (!(a > 0.0) || !(b > 0.0) || !(c * c < a * b))
            throw std::invalid_argument("EnergyCoefficients: need a,b > 0 and c^2 < a*b");
    }
};

/// sqrt( sum_j f_j^2 gamma_j h )
double weighted_l2_norm(const Vector& f, const Vector& gamma, double h);

/// Weighted discrete fractional Sobolev seminorm
///   sqrt( sum_j sum_{0<|k|<=k_max} (f_j - f_{j+k})^2 / |hk|^{1+2s} gamma_j h^2 )
/// with zero extension of f outside its index range; gamma must cover the same range as f.
double frac_sobolev_seminorm(const Vector& f, double s, const Vector& gamma, double h, long k_max);

/// Finite difference operators with zero extension at the ends.
Vector diff(const Vector& f, DiffMode mode, double h);

/// Symmetric bilinear form
///   S(f,g) = (1/2) sum_{j} sum_{0<|k|<=k_max} beta_k (F_j - F_{j+k})(G_j - G_{j+k}) M_j h^2,
/// F = f/M, G = g/M, with zero extension of F,G outside the f,g index range.
/// M must cover the range extended by k_max on both sides; f and g are indexed
/// so that entry i of f corresponds to entry i + k_max of M.
double sym_form(const Vector& f, const Vector& g, const WeightTable& w, const Vector& M, double h, long k_max);

/// Skew-symmetric bilinear form: the beta double sum plus the (VM) single sum.
/// vm[m] is the flux at half-point (lo + m + 1/2) where lo is the first velocity
/// index of f's range.
double skew_form(const Vector& f, const Vector& g, const WeightTable& w, const Vector& M, const Vector& vm,
                 double h, long k_max);

/// Mass-preserving projection onto span{M}: (Pi f)_j = M_j (sum f h)/(sum M h).
Vector project_equilibrium(const Vector& f, const Vector& M, double h);

/// Twisted H^1 energy of an (x,v) field in the M^{-1}-weighted spaces:
///   H = |f|^2 + a |Dx f|^2 + b |Dv f|^2 + 2c <Dx f, Dv f>,
/// centered differences, periodic in x, zero extension in v.
double hypocoercivity_energy(const Matrix& f, const EnergyCoefficients& coeffs, const PhaseGrid& pg,
                             const Vector& M);

/// Diagnostic Poincare ratio |f - Pi f|^2_{l2(M^{-1})} / S(f,f) on a full-line
/// window; returns 0 when f is proportional to M.
double poincare_ratio(const Vector& f, const AlphaParam& alpha, double h, long k_max,
                      const DensityOptions& opt = {});

/// Deterministic test battery: 20 seeded pseudo-random compactly supported
/// profiles plus 5 structured ones (spike, step, Gaussian, Cauchy-like,
/// windowed sinusoid), all defined as functions of v so the same profile can be
/// sampled on any mesh. Support is contained in [-12, 12].
std::vector<std::function<double(double)>> test_battery();

/// Per-battery-function probe ratios at mesh h and h/2. Suites:
///  - poincare:   |f - Pi f|^2_{l2(M^{-1})} / S(f,f)
///  - interp:     (|D+ f|^2 - eps |D f|^2_{Hdot^s}) / |f|^2_{H^s},  s = alpha/2, eps = 0.1
///  - commutator: |<[D,L] f, g>_{M^{-1}}| / (|f| |g| + |Df| |g|)_{M^{-1}}
struct ProbeRatios {
    std::vector<double> ratio_h;
    std::vector<double> ratio_h2;
};
ProbeRatios run_probe_suite(const std::string& suite, const AlphaParam& alpha, double h,
                            const DensityOptions& opt = {});

/// Full-line operator applied on a window around compactly supported data:
/// returns (L^h f) on the same index range as f, with M extended by fresh
/// equilibrium evaluations. Window bookkeeping shared by the probes.
struct FullLineWindow {
    AlphaParam alpha;
    double h;
    long support;       ///< f lives on indices -support..support
    long K;             ///< weight truncation used by Lambda
    WeightTable w;
    Vector M;           ///< equilibrium on -(support+2K)..(support+2K)
    Vector lambda_M;    ///< Lambda M on -(support+K)..(support+K)
    Vector vm;          ///< half-point fluxes on the lambda_M range

    FullLineWindow(const AlphaParam& a, double h_, long support_, long K_, const DensityOptions& opt = {});

    long m_offset(long j) const { return j + support + 2 * K; }
    /// L^h f on f's own range; f indexed -support..support
    Vector apply_L(const Vector& f) const;
    /// <u, v>_{l2(M^{-1})} over f's range
    double inner_Minv(const Vector& u, const Vector& v) const;
    /// S and A forms with the window's equilibrium and fluxes
    double S(const Vector& f, const Vector& g) const;
    double A(const Vector& f, const Vector& g) const;
};

}  // namespace levyfp
