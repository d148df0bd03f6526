#include "levyfp/operators.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "levyfp/hypergeometric.hpp"

namespace levyfp {

namespace {
std::atomic<long> g_clamp_count{0};
}

Matrix assemble_lambda_truncated(const AlphaParam& alpha, const VelocityGrid& grid, double gamma_decay,
                                 const WeightTable& w) {
    if (!(gamma_decay > 0.0)) throw std::invalid_argument("assemble_lambda_truncated: gamma_decay must be > 0");
    const double a = alpha.value();
    if (a >= 2.0) throw std::invalid_argument("assemble_lambda_truncated: alpha must be < 2");
    const long J = grid.J, K = grid.K, n = grid.size();
    const double h = grid.h;
    const double C = alpha.c1();
    const double gam = gamma_decay;

    // beta with the boundary value at |k| = K
    auto beta = [&](long k) {
        k = std::labs(k);
        return (k == K) ? w.beta_boundary : w.at(k);
    };

    double beta_sum = 0.0;  // sum_{k=-K..K, k != 0} beta_k h
    for (long k = 1; k <= K; ++k) beta_sum += 2.0 * beta(k) * h;
    const double diag = -(2.0 * C / (a * std::pow(grid.LW(), a)) + beta_sum);

    const double qscale = C * std::pow(grid.L(), gam) / (std::pow(grid.LW(), a + gam) * (a + gam));

    Matrix Lam = Matrix::Zero(n, n);
    // rows j >= 0 assembled directly, rows j < 0 mirrored so that the matrix
    // satisfies Lam(j,k) = Lam(-j,-k) bit-exactly
    for (long j = 0; j <= J; ++j) {
        const long r = grid.idx(j);
        Lam(r, r) += diag;
        for (long l = -J + 1; l <= J - 1; ++l) {
            if (l == j) continue;  // beta_0 cancels against the diagonal sum
            Lam(r, grid.idx(l)) += beta(j - l) * h;
        }
        // column +J: in-domain coupling plus the algebraically decaying extension
        double cJ = 0.0;
        for (long l = J; l <= j + K; ++l) {
            if (l == j) continue;
            cJ += beta(j - l) * std::pow(static_cast<double>(J) / static_cast<double>(l), gam);
        }
        Lam(r, grid.idx(J)) += cJ * h;
        // column -J
        double cmJ = 0.0;
        for (long l = j - K; l <= -J; ++l) {
            if (l == j) continue;
            cmJ += beta(j - l) * std::pow(static_cast<double>(J) / static_cast<double>(-l), gam);
        }
        Lam(r, grid.idx(-J)) += cmJ * h;
        // hypergeometric far-field correction, columns +-J only
        Lam(r, grid.idx(J)) += qscale * gauss_2f1(gam, a + gam, 1.0 + a + gam,
                                                  -static_cast<double>(j) / static_cast<double>(K));
        Lam(r, grid.idx(-J)) += qscale * gauss_2f1(gam, a + gam, 1.0 + a + gam,
                                                   static_cast<double>(j) / static_cast<double>(K));
    }
    for (long j = 1; j <= J; ++j)
        for (long k = -J; k <= J; ++k) Lam(grid.idx(-j), grid.idx(-k)) = Lam(grid.idx(j), grid.idx(k));
    return Lam;
}

Matrix assemble_lambda_truncated(const AlphaParam& alpha, const VelocityGrid& grid, double gamma_decay) {
    return assemble_lambda_truncated(alpha, grid, gamma_decay, build_weights(alpha, grid.h, grid.K));
}

Vector compute_vm(const Vector& lambda_M, double h) {
    const long n = lambda_M.size();
    const long J = (n - 1) / 2;
    Vector vm(2 * J);
    // partial sums S_j = sum_{k=-j..j} (Lambda M)_k h, built incrementally so that
    // consecutive fluxes telescope exactly: vm_{j+1/2} - vm_{j-1/2} = -(increment)/2
    double S = lambda_M[J] * h;  // k = 0
    vm[J] = -0.5 * S;            // half-point 1/2
    for (long j = 1; j <= J - 1; ++j) {
        S += (lambda_M[J + j] + lambda_M[J - j]) * h;
        vm[J + j] = -0.5 * S;  // half-point j+1/2
    }
    for (long j = 0; j <= J - 1; ++j) vm[J - 1 - j] = -vm[J + j];  // antisymmetry
    return vm;
}

double exterior_mass(const Vector& M, double h) {
    const long n = M.size();
    const double MJ = M[n - 1];
    if (!(MJ > 0.0)) throw std::domain_error("exterior_mass: M_J must be positive");
    const double bracket = 1.0 - M.sum() * h;
    if (bracket < 0.0) {
        ++g_clamp_count;
        return 0.0;
    }
    return bracket / (2.0 * MJ);
}

double exterior_mass(const AlphaParam& alpha, const VelocityGrid& grid, const DensityOptions& opt) {
    const Vector M = [&] {
        if (alpha.is_gaussian()) {
            // sample directly; entries may underflow to zero far out, which is fine here
            Vector m(grid.size());
            for (long j = -grid.J; j <= grid.J; ++j)
                m[grid.idx(j)] = std::exp(-grid.v(j) * grid.v(j) / 2.0) / std::sqrt(2.0 * M_PI);
            return m;
        }
        return sample_equilibrium(alpha, grid, opt);
    }();
    const double MJ = M[grid.size() - 1];
    const double bracket = 1.0 - M.sum() * grid.h;
    if (alpha.is_gaussian() && (MJ <= 0.0 || bracket <= 1e2 * std::numeric_limits<double>::epsilon())) {
        // discrete bracket is pure rounding noise: Gaussian Mills ratio
        // int_L^inf mu_2 / mu_2(L) = sqrt(pi/2) erfcx(L/sqrt(2))
        const double L = grid.L();
        return std::sqrt(M_PI / 2.0) * std::exp(L * L / 2.0) * std::erfc(L / std::sqrt(2.0));
    }
    return exterior_mass(M, grid.h);
}

long exterior_mass_clamp_count() { return g_clamp_count.load(); }

Matrix assemble_gamma_truncated(const Vector& vm, const Vector& M, double I_L, const Matrix& lambda_mat,
                                const VelocityGrid& grid) {
    const long J = grid.J, n = grid.size();
    const double h = grid.h;
    Matrix G = Matrix::Zero(n, n);

    auto vm_at = [&](long j) { return vm[J + j]; };  // flux at half-point j+1/2, j = -J..J-1

    // interior rows: centered flux differences
    for (long j = -J + 1; j <= J - 1; ++j) {
        const long r = grid.idx(j);
        const double vp = vm_at(j), vmn = vm_at(j - 1);
        G(r, grid.idx(j + 1)) += vp / (2.0 * h * M[grid.idx(j + 1)]);
        G(r, grid.idx(j)) += vp / (2.0 * h * M[grid.idx(j)]);
        G(r, grid.idx(j)) -= vmn / (2.0 * h * M[grid.idx(j)]);
        G(r, grid.idx(j - 1)) -= vmn / (2.0 * h * M[grid.idx(j - 1)]);
    }

    // row sums of Lambda over the interior band, needed by the boundary fluxes
    Eigen::RowVectorXd lam_interior_sum = Eigen::RowVectorXd::Zero(n);
    for (long l = -J + 1; l <= J - 1; ++l) lam_interior_sum += lambda_mat.row(grid.idx(l));

    const double denom = 2.0 * (h + I_L);

    // row +J: (F_{J+1/2}(f) - (1/2) vm_{J-1/2} (f_J/M_J + f_{J-1}/M_{J-1})) / h
    {
        const long r = grid.idx(J);
        Eigen::RowVectorXd FJ = -h * lambda_mat.row(r) - (h * h / denom) * lam_interior_sum;
        const double c = (I_L / denom) * vm_at(J - 1);
        FJ(grid.idx(J)) += c / M[grid.idx(J)];
        FJ(grid.idx(J - 1)) += c / M[grid.idx(J - 1)];
        Eigen::RowVectorXd row = FJ;
        row(grid.idx(J)) -= 0.5 * vm_at(J - 1) / M[grid.idx(J)];
        row(grid.idx(J - 1)) -= 0.5 * vm_at(J - 1) / M[grid.idx(J - 1)];
        G.row(r) = row / h;
    }
    // row -J: ((1/2) vm_{-J+1/2} (f_{-J+1}/M_{-J+1} + f_{-J}/M_{-J}) - F_{-J-1/2}(f)) / h
    {
        const long r = grid.idx(-J);
        Eigen::RowVectorXd FmJ = h * lambda_mat.row(r) + (h * h / denom) * lam_interior_sum;
        const double c = (I_L / denom) * vm_at(-J);
        FmJ(grid.idx(-J + 1)) += c / M[grid.idx(-J + 1)];
        FmJ(grid.idx(-J)) += c / M[grid.idx(-J)];
        Eigen::RowVectorXd row = -FmJ;
        row(grid.idx(-J + 1)) += 0.5 * vm_at(-J) / M[grid.idx(-J + 1)];
        row(grid.idx(-J)) += 0.5 * vm_at(-J) / M[grid.idx(-J)];
        G.row(r) = row / h;
    }
    return G;
}

double LfpOperator::weighted_mass(const Vector& f) const {
    const long n = grid.size();
    double s = 0.0;
    for (long i = 1; i < n - 1; ++i) s += f[i];
    return s * grid.h + (grid.h + I_L) * (f[0] + f[n - 1]);
}

double LfpOperator::mass(const Vector& f) const { return f.sum() * grid.h; }

double LfpOperator::norm_l2Minv(const Vector& f) const {
    double s = 0.0;
    for (long i = 0; i < f.size(); ++i) s += f[i] * f[i] / M[i];
    return std::sqrt(s * grid.h);
}

LfpOperator assemble_lfp(const AlphaParam& alpha, const VelocityGrid& grid, std::optional<double> gamma_decay,
                         const DensityOptions& opt) {
    if (alpha.is_gaussian()) return assemble_lfp_gaussian_limit(grid, opt);

    LfpOperator op{grid, alpha.value(), gamma_decay.value_or(1.0 + alpha.value()), {}, {}, {}, {}, 0.0};
    op.M = sample_equilibrium(alpha, grid, opt);
    op.lambda_mat = assemble_lambda_truncated(alpha, grid, op.gamma_decay);
    op.vm = compute_vm(op.lambda_mat * op.M, grid.h);
    op.I_L = exterior_mass(op.M, grid.h);
    const Matrix G = assemble_gamma_truncated(op.vm, op.M, op.I_L, op.lambda_mat, grid);
    op.L_mat = G + op.lambda_mat;
    return op;
}

LfpOperator assemble_lfp_gaussian_limit(const VelocityGrid& grid, const DensityOptions& opt) {
    const long J = grid.J, n = grid.size();
    const double h = grid.h;
    LfpOperator op{grid, 2.0, 0.0, {}, {}, {}, {}, 0.0};
    op.M = sample_equilibrium(AlphaParam(2.0), grid, opt);

    op.vm = Vector(2 * J);
    for (long j = -J; j <= J - 1; ++j) op.vm[J + j] = (op.M[grid.idx(j)] - op.M[grid.idx(j + 1)]) / h;

    // conservative flux form with zero boundary fluxes; L M = 0 by telescoping
    Matrix L = Matrix::Zero(n, n);
    for (long j = -J; j <= J; ++j) {
        const long r = grid.idx(j);
        if (j < J) {
            const double c = (op.M[grid.idx(j)] + op.M[grid.idx(j + 1)]) / (2.0 * h * h);
            L(r, grid.idx(j + 1)) += c / op.M[grid.idx(j + 1)];
            L(r, grid.idx(j)) -= c / op.M[grid.idx(j)];
        }
        if (j > -J) {
            const double c = (op.M[grid.idx(j - 1)] + op.M[grid.idx(j)]) / (2.0 * h * h);
            L(r, grid.idx(j)) -= c / op.M[grid.idx(j)];
            L(r, grid.idx(j - 1)) += c / op.M[grid.idx(j - 1)];
        }
    }
    op.L_mat = L;

    // classical three-point Laplacian with zero extension, the alpha -> 2^- limit stencil
    Matrix Lam = Matrix::Zero(n, n);
    for (long i = 0; i < n; ++i) {
        Lam(i, i) = -2.0 / (h * h);
        if (i > 0) Lam(i, i - 1) = 1.0 / (h * h);
        if (i + 1 < n) Lam(i, i + 1) = 1.0 / (h * h);
    }
    op.lambda_mat = Lam;
    op.I_L = 0.0;  // Gaussian exterior mass is below resolution; plain mass is conserved
    return op;
}

}  // namespace levyfp
