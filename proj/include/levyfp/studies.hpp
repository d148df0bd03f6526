#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levyfp/analysis.hpp"
#include "levyfp/grid.hpp"
#include "levyfp/integrators.hpp"
#include "levyfp/operators.hpp"
#include "levyfp/reference.hpp"

namespace levyfp {

/// Frozen hypocoercivity-energy coefficients used by the run traces (c^2 < ab).
EnergyCoefficients trace_energy_coefficients();

/// Aggregated validation failure: carries every violation, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

struct RunConfig {
    std::string model = "homogeneous";  ///< homogeneous | kinetic
    std::string scheme = "euler";       ///< euler | sl
    double alpha = 1.0;
    double L = 16.0;        ///< velocity half-width
    long J = 64;            ///< half point count; h = L/J
    std::optional<double> h;       ///< alternative to J
    double k_ratio = 10.0;  ///< K = k_ratio J + 1, rounded up to odd and >= 2J+1
    std::optional<long> K;  ///< explicit integral truncation index
    std::optional<double> gamma_decay;  ///< far-field decay exponent, default 1+alpha
    long nx = 129;
    double period = 1.0;
    double dt = 1e-2;
    double T = 1.0;
    std::string init = "equilibrium";  ///< preset name or file:<path>
    std::string out = "run_";          ///< output prefix
    unsigned long seed = 0;
    long snapshot_stride = 10;  ///< trace/reference comparison stride, in steps
    double fit_lo = 5.0;        ///< decay-fit window
    double fit_hi = 30.0;
    double tail_lo = 10.0;      ///< tail-fit window lower bound
    std::vector<double> tail_times{0.5, 1.0, 2.0};

    VelocityGrid velocity_grid() const;
    PhaseGrid phase_grid() const;
};

/// Parses the flat key-value document (one `key = value` per line, '#' comments).
/// Unknown keys and every constraint violation are reported together.
RunConfig parse_config(const std::string& text);

/// Resolved config rendered back as key-value lines (embedded in CSV comments).
std::string render_config(const RunConfig& cfg);

/// Initial data presets.
Vector initial_homogeneous(const RunConfig& cfg, const LfpOperator& op);
Matrix initial_kinetic(const RunConfig& cfg, const PhaseGrid& pg);

struct RunResult {
    Vector final_v;         ///< homogeneous final state
    Matrix final_xv;        ///< kinetic final state
    double mass_drift = 0.0;        ///< relative drift of the conserved functional
    double min_density = 0.0;       ///< smallest value seen (non-negativity monitor)
    bool l2_monotone = true;        ///< l2(M^{-1}) never increased
    double runtime_seconds = 0.0;
};

/// Runs the configured simulation, writing <out>trace.csv, periodic
/// <out>snapshot_t*.csv files and a <out>success marker (only when the
/// model's conservation law holds to tolerance).
RunResult run_simulation(const RunConfig& cfg);

struct StudyRow {
    double meshsize = 0.0;
    long points = 0;
    double error_linf = 0.0;
    double error_l2mu = 0.0;
    double order_linf = 0.0;  ///< NaN when undefined
    double order_l2mu = 0.0;
    double mass_drift = 0.0;
    double runtime_seconds = 0.0;
};

struct StudyReport {
    std::vector<StudyRow> rows;
    void write_csv(const std::string& path, const RunConfig& cfg) const;
};

/// Mesh-refinement study against the analytic reference (tc1 for the homogeneous
/// model, tc3 for the kinetic one); dt is refined proportionally to h^2.
StudyReport run_convergence_study(const RunConfig& base, int levels);

struct DecayStudy {
    std::vector<double> times;
    std::vector<double> dist_num;
    std::vector<double> dist_ref;
    double rate_num = 0.0;
    double rate_ref = 0.0;
    double r2_num = 0.0;
    double r2_ref = 0.0;
};

/// Distance to equilibrium along a kinetic run plus log-linear fits over
/// [fit_lo, fit_hi]; writes <out>decay.csv.
DecayStudy run_decay_study(const RunConfig& cfg);

struct TailFit {
    double time = 0.0;
    double slope = 0.0;
    long points = 0;
    bool valid = false;
};

/// Log-log tail slopes of the homogeneous solution over v in [tail_lo, L]
/// at the configured times; writes <out>tails.csv and per-time profiles.
std::vector<TailFit> run_tail_study(const RunConfig& cfg);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace levyfp
