#include "levyfp/studies.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

namespace levyfp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double wall_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

EnergyCoefficients trace_energy_coefficients() { return EnergyCoefficients(1.0, 1.0, 0.2); }

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error([&issues] {
          std::string msg = "invalid configuration:";
          for (const auto& s : issues) msg += "\n  - " + s;
          return msg;
      }()),
      issues_(std::move(issues)) {}

VelocityGrid RunConfig::velocity_grid() const {
    long Kv;
    if (K) {
        Kv = *K;
        if (Kv < 2 * J + 1) Kv = 2 * J + 1;
        if (Kv % 2 == 0) ++Kv;
    } else {
        Kv = static_cast<long>(std::ceil(k_ratio * static_cast<double>(J))) + 1;
        if (Kv < 2 * J + 1) Kv = 2 * J + 1;
        if (Kv % 2 == 0) ++Kv;
    }
    return VelocityGrid(L / static_cast<double>(J), J, Kv);
}

PhaseGrid RunConfig::phase_grid() const { return PhaseGrid(nx, period, velocity_grid()); }

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::vector<std::string> issues;
    std::map<std::string, std::string> kv;

    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(lineno) + ": expected `key = value`");
            continue;
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto get_double = [&](const std::string& key, double& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        try {
            std::size_t pos = 0;
            dst = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
        } catch (...) {
            issues.push_back(key + ": cannot parse `" + it->second + "` as a number");
        }
        kv.erase(it);
    };
    auto get_long = [&](const std::string& key, long& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        try {
            std::size_t pos = 0;
            dst = std::stol(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
        } catch (...) {
            issues.push_back(key + ": cannot parse `" + it->second + "` as an integer");
        }
        kv.erase(it);
    };
    auto get_string = [&](const std::string& key, std::string& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        dst = it->second;
        kv.erase(it);
    };

    get_string("model", cfg.model);
    get_string("scheme", cfg.scheme);
    get_double("alpha", cfg.alpha);
    get_double("L", cfg.L);
    bool has_J = kv.count("J") > 0, has_h = kv.count("h") > 0;
    get_long("J", cfg.J);
    if (has_h) {
        double hv = 0.0;
        get_double("h", hv);
        if (has_J) {
            issues.push_back("give either J or h, not both");
        } else if (hv > 0.0) {
            cfg.J = std::max<long>(1, static_cast<long>(std::llround(cfg.L / hv)));
            cfg.h = hv;
        } else {
            issues.push_back("h: must be positive");
        }
    }
    get_double("k_ratio", cfg.k_ratio);
    if (kv.count("K")) {
        long Kv = 0;
        get_long("K", Kv);
        cfg.K = Kv;
    }
    if (kv.count("gamma")) {
        double g = 0.0;
        get_double("gamma", g);
        cfg.gamma_decay = g;
    }
    get_long("nx", cfg.nx);
    get_double("period", cfg.period);
    get_double("dt", cfg.dt);
    get_double("T", cfg.T);
    get_string("init", cfg.init);
    get_string("out", cfg.out);
    if (kv.count("seed")) {
        long s = 0;
        get_long("seed", s);
        cfg.seed = static_cast<unsigned long>(s);
    }
    get_long("snapshot_stride", cfg.snapshot_stride);
    get_double("fit_lo", cfg.fit_lo);
    get_double("fit_hi", cfg.fit_hi);
    get_double("tail_lo", cfg.tail_lo);
    if (kv.count("tail_times")) {
        std::string s;
        get_string("tail_times", s);
        cfg.tail_times.clear();
        std::istringstream ts(s);
        std::string tok;
        while (std::getline(ts, tok, ','))
            try {
                cfg.tail_times.push_back(std::stod(trim(tok)));
            } catch (...) {
                issues.push_back("tail_times: cannot parse `" + tok + "`");
            }
    }

    if (!kv.empty()) {
        std::string unknown = "unknown keys:";
        for (const auto& [k, v] : kv) unknown += " " + k;
        issues.push_back(unknown);
    }

    // constraint validation, aggregated
    if (cfg.model != "homogeneous" && cfg.model != "kinetic")
        issues.push_back("model: must be `homogeneous` or `kinetic`");
    if (cfg.scheme != "euler" && cfg.scheme != "sl") issues.push_back("scheme: must be `euler` or `sl`");
    if (!(cfg.alpha > 0.0) || !(cfg.alpha <= 2.0)) issues.push_back("alpha: must satisfy 0 < alpha <= 2");
    if (!(cfg.L > 0.0)) issues.push_back("L: must be positive");
    if (cfg.J < 1) issues.push_back("J: must be >= 1");
    if (cfg.model == "kinetic") {
        if (cfg.nx < 3 || cfg.nx % 2 == 0)
            issues.push_back("nx: must be odd and >= 3 (odd N_x is required for the kinetic scheme)");
        if (!(cfg.period > 0.0)) issues.push_back("period: must be positive");
    }
    if (!(cfg.dt > 0.0)) issues.push_back("dt: must be positive");
    if (!(cfg.T >= 0.0)) issues.push_back("T: must be >= 0");
    if (!(cfg.k_ratio >= 2.0) && !cfg.K) issues.push_back("k_ratio: must be >= 2 (L_W >= 2L)");
    if (cfg.gamma_decay && !(*cfg.gamma_decay > 0.0)) issues.push_back("gamma: must be positive");
    if (cfg.snapshot_stride < 1) issues.push_back("snapshot_stride: must be >= 1");

    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "model=" << cfg.model << " scheme=" << cfg.scheme << " alpha=" << fmt(cfg.alpha)
       << " L=" << fmt(cfg.L) << " J=" << cfg.J;
    const VelocityGrid g = cfg.velocity_grid();
    os << " h=" << fmt(g.h) << " K=" << g.K << " gamma=" << fmt(cfg.gamma_decay.value_or(1.0 + cfg.alpha));
    if (cfg.model == "kinetic") os << " nx=" << cfg.nx << " period=" << fmt(cfg.period);
    os << " dt=" << fmt(cfg.dt) << " T=" << fmt(cfg.T) << " init=" << cfg.init << " seed=" << cfg.seed
       << " snapshot_stride=" << cfg.snapshot_stride;
    return os.str();
}

namespace {

Vector read_profile_csv(const std::string& path, long expected) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open initial data file " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        const auto comma = line.find_last_of(',');
        vals.push_back(std::stod(comma == std::string::npos ? line : line.substr(comma + 1)));
    }
    if (static_cast<long>(vals.size()) != expected)
        throw std::runtime_error("initial data file has " + std::to_string(vals.size()) + " rows, expected " +
                                 std::to_string(expected));
    Vector f(expected);
    for (long i = 0; i < expected; ++i) f[i] = vals[static_cast<std::size_t>(i)];
    return f;
}

}  // namespace

Vector initial_homogeneous(const RunConfig& cfg, const LfpOperator& op) {
    const VelocityGrid& g = op.grid;
    Vector f(g.size());
    if (cfg.init == "equilibrium") {
        f = op.M;
    } else if (cfg.init == "tc1") {
        Tc1Params p;
        p.alpha = cfg.alpha;
        for (long j = -g.J; j <= g.J; ++j) f[g.idx(j)] = exact_homogeneous(p, 0.0, g.v(j));
    } else if (cfg.init == "tc2") {
        for (long j = -g.J; j <= g.J; ++j) {
            const double v = g.v(j);
            f[g.idx(j)] = 0.5 * (v >= -3.0 && v <= -1.0 ? 1.0 : 0.0) + 0.25 * (v >= 0.0 && v <= 4.0 ? 1.0 : 0.0);
        }
    } else if (cfg.init.rfind("file:", 0) == 0) {
        f = read_profile_csv(cfg.init.substr(5), g.size());
    } else {
        throw std::runtime_error("unknown homogeneous init preset `" + cfg.init + "`");
    }
    return f;
}

Matrix initial_kinetic(const RunConfig& cfg, const PhaseGrid& pg) {
    Matrix f(pg.Nx, pg.vgrid.size());
    if (cfg.init == "equilibrium") {
        const Vector M = sample_equilibrium(AlphaParam(cfg.alpha), pg.vgrid);
        for (long i = 0; i < pg.Nx; ++i) f.row(i) = M.transpose();
    } else if (cfg.init == "tc3") {
        f = exact_kinetic_grid(Tc3Params{}, 0.0, pg);
    } else if (cfg.init.rfind("file:", 0) == 0) {
        const Vector flat = read_profile_csv(cfg.init.substr(5), pg.Nx * pg.vgrid.size());
        for (long i = 0; i < pg.Nx; ++i)
            for (long j = 0; j < pg.vgrid.size(); ++j) f(i, j) = flat[i * pg.vgrid.size() + j];
    } else {
        throw std::runtime_error("unknown kinetic init preset `" + cfg.init + "`");
    }
    return f;
}

namespace {

struct TraceWriter {
    std::ofstream out;
    TraceWriter(const std::string& path, const RunConfig& cfg) : out(path) {
        if (!out) throw std::runtime_error("cannot open " + path);
        out << "# config: " << render_config(cfg) << "\n";
        out << "t,mass,weighted_mass,l2M,Henergy,min_f\n";
    }
    void row(double t, double mass, double wmass, double l2, double H, double mn) {
        out << fmt(t) << ',' << fmt(mass) << ',' << fmt(wmass) << ',' << fmt(l2) << ',' << fmt(H) << ','
            << fmt(mn) << '\n';
    }
};

void write_snapshot_v(const std::string& path, const RunConfig& cfg, const VelocityGrid& g, const Vector& f) {
    std::ofstream out(path);
    out << "# config: " << render_config(cfg) << "\n";
    out << "v,f\n";
    for (long j = -g.J; j <= g.J; ++j) out << fmt(g.v(j)) << ',' << fmt(f[g.idx(j)]) << '\n';
}

void write_snapshot_xv(const std::string& path, const RunConfig& cfg, const PhaseGrid& pg, const Matrix& f) {
    std::ofstream out(path);
    out << "# config: " << render_config(cfg) << "\n";
    out << "x,v,f\n";
    for (long i = 0; i < pg.Nx; ++i)
        for (long j = 0; j < pg.vgrid.size(); ++j)
            out << fmt(pg.x(i)) << ',' << fmt(pg.vgrid.v(pg.vgrid.vel(j))) << ',' << fmt(f(i, j)) << '\n';
}

std::string snapshot_name(const RunConfig& cfg, double t) {
    std::ostringstream os;
    os << cfg.out << "snapshot_t" << t << ".csv";
    return os.str();
}

/// kinetic weighted mass: dx sum_i [ h sum_{|j|<J} f + (h+I_L)(f_J + f_{-J}) ]
double kinetic_weighted_mass(const LfpOperator& op, const PhaseGrid& pg, const Matrix& f) {
    double s = 0.0;
    for (long i = 0; i < pg.Nx; ++i) s += op.weighted_mass(f.row(i).transpose());
    return s * pg.dx();
}

double kinetic_l2Minv(const LfpOperator& op, const PhaseGrid& pg, const Matrix& f) {
    double s = 0.0;
    for (long i = 0; i < pg.Nx; ++i)
        for (long j = 0; j < f.cols(); ++j) s += f(i, j) * f(i, j) / op.M[j];
    return std::sqrt(s * pg.dx() * pg.vgrid.h);
}

}  // namespace

RunResult run_simulation(const RunConfig& cfg) {
    const double t_start = wall_seconds();
    RunResult res;
    const AlphaParam alpha(cfg.alpha);
    const VelocityGrid vg = cfg.velocity_grid();
    const LfpOperator op = assemble_lfp(alpha, vg, cfg.gamma_decay);
    const long nsteps = static_cast<long>(std::llround(cfg.T / cfg.dt));
    const EnergyCoefficients ec = trace_energy_coefficients();

    TraceWriter trace(cfg.out + "trace.csv", cfg);

    if (cfg.model == "homogeneous") {
        Vector f = initial_homogeneous(cfg, op);
        const double w0 = op.weighted_mass(f);
        const Vector finf = (w0 / op.weighted_mass(op.M)) * op.M;
        HomogeneousStepper stepper(op, cfg.dt);
        double prev_l2 = op.norm_l2Minv(f);
        res.min_density = f.minCoeff();

        auto emit = [&](long n, const Vector& fv) {
            const double t = static_cast<double>(n) * cfg.dt;
            const Vector d = fv - finf;
            Vector dv = diff(d, DiffMode::Centered, vg.h);
            double H = 0.0;
            for (long j = 0; j < fv.size(); ++j)
                H += (d[j] * d[j] + ec.b * dv[j] * dv[j]) / op.M[j];
            trace.row(t, op.mass(fv), op.weighted_mass(fv), op.norm_l2Minv(fv), H * vg.h, fv.minCoeff());
        };
        emit(0, f);
        write_snapshot_v(snapshot_name(cfg, 0.0), cfg, vg, f);
        for (long n = 1; n <= nsteps; ++n) {
            f = stepper.step(f);
            const double l2 = op.norm_l2Minv(f);
            if (l2 > prev_l2 * (1.0 + 1e-12)) res.l2_monotone = false;
            prev_l2 = l2;
            res.min_density = std::min(res.min_density, f.minCoeff());
            if (n % cfg.snapshot_stride == 0 || n == nsteps) emit(n, f);
        }
        write_snapshot_v(snapshot_name(cfg, cfg.T), cfg, vg, f);
        res.mass_drift = std::abs(op.weighted_mass(f) - w0) / (std::abs(w0) + 1e-300);
        res.final_v = f;
    } else {
        const PhaseGrid pg = cfg.phase_grid();
        Matrix f = initial_kinetic(cfg, pg);
        const double w0 = kinetic_weighted_mass(op, pg, f);
        const double cinf = w0 / (cfg.period * op.weighted_mass(op.M));
        Matrix finf(pg.Nx, vg.size());
        for (long i = 0; i < pg.Nx; ++i) finf.row(i) = (cinf * op.M).transpose();

        std::unique_ptr<KineticEulerStepper> euler;
        std::unique_ptr<SemiLagrangianStepper> sl;
        if (cfg.scheme == "euler")
            euler = std::make_unique<KineticEulerStepper>(op, pg, cfg.dt);
        else
            sl = std::make_unique<SemiLagrangianStepper>(op, pg, cfg.dt);

        double prev_l2 = kinetic_l2Minv(op, pg, f);
        res.min_density = f.minCoeff();
        auto emit = [&](long n, const Matrix& fv) {
            const double t = static_cast<double>(n) * cfg.dt;
            const double H = hypocoercivity_energy(fv - finf, ec, pg, op.M);
            trace.row(t, fv.sum() * pg.dx() * vg.h, kinetic_weighted_mass(op, pg, fv),
                      kinetic_l2Minv(op, pg, fv), H, fv.minCoeff());
        };
        emit(0, f);
        write_snapshot_xv(snapshot_name(cfg, 0.0), cfg, pg, f);
        for (long n = 1; n <= nsteps; ++n) {
            f = euler ? euler->step(f) : sl->step(f);
            const double l2 = kinetic_l2Minv(op, pg, f);
            if (l2 > prev_l2 * (1.0 + 1e-12)) res.l2_monotone = false;
            prev_l2 = l2;
            res.min_density = std::min(res.min_density, f.minCoeff());
            if (n % cfg.snapshot_stride == 0 || n == nsteps) emit(n, f);
        }
        write_snapshot_xv(snapshot_name(cfg, cfg.T), cfg, pg, f);
        res.mass_drift = std::abs(kinetic_weighted_mass(op, pg, f) - w0) / (std::abs(w0) + 1e-300);
        res.final_xv = f;
    }

    res.runtime_seconds = wall_seconds() - t_start;

    // conservation assertion gates the success marker
    const double tol = (cfg.scheme == "sl") ? 1e-8 : 1e-10;
    if (res.mass_drift > tol)
        throw std::runtime_error("conservation assertion failed: relative drift " + fmt(res.mass_drift) +
                                 " exceeds " + fmt(tol));
    std::ofstream marker(cfg.out + "success");
    marker << "ok\n";
    return res;
}

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("linear_fit: need two samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double N = static_cast<double>(n);
    const double den = N * sxx - sx * sx;
    LinFit fit;
    fit.slope = (N * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / N;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / N;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.slope * x[i] + fit.intercept;
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

void StudyReport::write_csv(const std::string& path, const RunConfig& cfg) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "# config: " << render_config(cfg) << "\n";
    out << "meshsize,points,error_linf,error_l2mu,order_linf,order_l2mu,mass_drift,runtime_seconds\n";
    for (const auto& r : rows) {
        auto ord = [](double o) { return std::isnan(o) ? std::string("\xE2\x80\x94") : fmt(o); };
        out << fmt(r.meshsize) << ',' << r.points << ',' << fmt(r.error_linf) << ',' << fmt(r.error_l2mu)
            << ',' << ord(r.order_linf) << ',' << ord(r.order_l2mu) << ',' << fmt(r.mass_drift) << ','
            << fmt(r.runtime_seconds) << '\n';
    }
}

StudyReport run_convergence_study(const RunConfig& base, int levels) {
    if (levels < 1) throw std::invalid_argument("run_convergence_study: levels must be >= 1");
    StudyReport report;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    // one shared density table for all levels; arguments (v - c)/sigma(t) stay
    // within (L + |centers|max) / sigma(0)
    std::optional<DensityTable> table;
    if (base.model == "homogeneous" && base.alpha != 1.0 && base.alpha != 2.0) {
        const double sigma0 = std::pow(-std::expm1(-base.alpha), 1.0 / base.alpha);
        table.emplace(AlphaParam(base.alpha), (base.L + 8.0) / sigma0, 0.01);
    }

    for (int lev = 0; lev < levels; ++lev) {
        const double t0 = wall_seconds();
        RunConfig cfg = base;
        cfg.J = base.J << lev;
        cfg.h.reset();
        const double href = base.L / static_cast<double>(base.J);
        const double hl = base.L / static_cast<double>(cfg.J);
        cfg.dt = base.dt * (hl / href) * (hl / href);  // dt refined with the mesh
        const long nsteps = std::max<long>(1, static_cast<long>(std::llround(cfg.T / cfg.dt)));
        cfg.dt = cfg.T / static_cast<double>(nsteps);

        const AlphaParam alpha(cfg.alpha);
        const VelocityGrid vg = cfg.velocity_grid();
        const LfpOperator op = assemble_lfp(alpha, vg, cfg.gamma_decay);

        StudyRow row;
        row.meshsize = vg.h;
        row.points = vg.size();

        if (cfg.model == "homogeneous") {
            // table-backed reference evaluations, exact to ~1e-9
            const Tc1Params p{cfg.alpha, {0.75, 0.25}, {2.0, -6.0}};
            auto ref_at = [&](double t, double v) {
                return table ? exact_homogeneous(p, t, v, *table) : exact_homogeneous(p, t, v);
            };
            Vector f(vg.size());
            for (long j = -vg.J; j <= vg.J; ++j) f[vg.idx(j)] = ref_at(0.0, vg.v(j));
            const double w0 = op.weighted_mass(f);
            HomogeneousStepper stepper(op, cfg.dt);
            ErrorNorms worst;
            Vector fref(vg.size());
            for (long n = 1; n <= nsteps; ++n) {
                f = stepper.step(f);
                if (n % cfg.snapshot_stride == 0 || n == nsteps) {
                    const double t = static_cast<double>(n) * cfg.dt;
                    for (long j = -vg.J; j <= vg.J; ++j) fref[vg.idx(j)] = ref_at(t, vg.v(j));
                    const ErrorNorms e = error_norms(f, fref, vg.h, op.M);
                    worst.linf = std::max(worst.linf, e.linf);
                    worst.l2mu = std::max(worst.l2mu, e.l2mu);
                }
            }
            row.error_linf = worst.linf;
            row.error_l2mu = worst.l2mu;
            row.mass_drift = std::abs(op.weighted_mass(f) - w0) / std::abs(w0);
        } else {
            const PhaseGrid pg = cfg.phase_grid();
            const Tc3Params p;
            Matrix f = exact_kinetic_grid(p, 0.0, pg);
            const double w0 = kinetic_weighted_mass(op, pg, f);
            std::unique_ptr<KineticEulerStepper> euler;
            std::unique_ptr<SemiLagrangianStepper> sl;
            if (cfg.scheme == "euler")
                euler = std::make_unique<KineticEulerStepper>(op, pg, cfg.dt);
            else
                sl = std::make_unique<SemiLagrangianStepper>(op, pg, cfg.dt);
            ErrorNorms worst;
            for (long n = 1; n <= nsteps; ++n) {
                f = euler ? euler->step(f) : sl->step(f);
                if (n % cfg.snapshot_stride == 0 || n == nsteps) {
                    const double t = static_cast<double>(n) * cfg.dt;
                    const Matrix fref = exact_kinetic_grid(p, t, pg);
                    const ErrorNorms e = error_norms(f, fref, pg.dx(), vg.h, op.M);
                    worst.linf = std::max(worst.linf, e.linf);
                    worst.l2mu = std::max(worst.l2mu, e.l2mu);
                }
            }
            row.error_linf = worst.linf;
            row.error_l2mu = worst.l2mu;
            row.mass_drift = std::abs(kinetic_weighted_mass(op, pg, f) - w0) / std::abs(w0);
        }

        row.runtime_seconds = wall_seconds() - t0;
        row.order_linf = nan;
        row.order_l2mu = nan;
        if (!report.rows.empty()) {
            const StudyRow& prev = report.rows.back();
            if (row.error_linf > 1e-11 && prev.error_linf > 1e-11)
                row.order_linf = std::log2(prev.error_linf / row.error_linf);
            if (row.error_l2mu > 1e-11 && prev.error_l2mu > 1e-11)
                row.order_l2mu = std::log2(prev.error_l2mu / row.error_l2mu);
        }
        report.rows.push_back(row);
    }
    report.write_csv(base.out + "convergence.csv", base);
    return report;
}

DecayStudy run_decay_study(const RunConfig& cfg) {
    if (cfg.model != "kinetic") throw std::invalid_argument("run_decay_study: kinetic model required");
    const AlphaParam alpha(cfg.alpha);
    const VelocityGrid vg = cfg.velocity_grid();
    const PhaseGrid pg = cfg.phase_grid();
    const LfpOperator op = assemble_lfp(alpha, vg, cfg.gamma_decay);

    Matrix f = initial_kinetic(cfg, pg);
    // the scheme's exact invariant fixes the equilibrium coefficient
    const double cinf = kinetic_weighted_mass(op, pg, f) / (cfg.period * op.weighted_mass(op.M));
    Matrix finf(pg.Nx, vg.size());
    for (long i = 0; i < pg.Nx; ++i) finf.row(i) = (cinf * op.M).transpose();
    // the reference's own limit is exactly M
    Matrix Mrow(pg.Nx, vg.size());
    for (long i = 0; i < pg.Nx; ++i) Mrow.row(i) = op.M.transpose();

    std::unique_ptr<KineticEulerStepper> euler;
    std::unique_ptr<SemiLagrangianStepper> sl;
    if (cfg.scheme == "euler")
        euler = std::make_unique<KineticEulerStepper>(op, pg, cfg.dt);
    else
        sl = std::make_unique<SemiLagrangianStepper>(op, pg, cfg.dt);

    const bool with_ref = cfg.init == "tc3";
    const long nsteps = static_cast<long>(std::llround(cfg.T / cfg.dt));
    DecayStudy st;
    auto record = [&](long n) {
        const double t = static_cast<double>(n) * cfg.dt;
        st.times.push_back(t);
        st.dist_num.push_back(kinetic_l2Minv(op, pg, f - finf));
        if (with_ref) st.dist_ref.push_back(kinetic_l2Minv(op, pg, exact_kinetic_grid(Tc3Params{}, t, pg) - Mrow));
    };
    record(0);
    for (long n = 1; n <= nsteps; ++n) {
        f = euler ? euler->step(f) : sl->step(f);
        if (n % cfg.snapshot_stride == 0 || n == nsteps) record(n);
    }

    auto fit_window = [&](const std::vector<double>& d) {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < st.times.size(); ++i)
            if (st.times[i] >= cfg.fit_lo && st.times[i] <= cfg.fit_hi && d[i] > 0.0) {
                xs.push_back(st.times[i]);
                ys.push_back(std::log(d[i]));
            }
        return linear_fit(xs, ys);
    };
    const LinFit fn = fit_window(st.dist_num);
    st.rate_num = -fn.slope;
    st.r2_num = fn.r2;
    if (with_ref) {
        const LinFit fr = fit_window(st.dist_ref);
        st.rate_ref = -fr.slope;
        st.r2_ref = fr.r2;
    }

    std::ofstream out(cfg.out + "decay.csv");
    out << "# config: " << render_config(cfg) << "\n";
    out << "# rate_num=" << fmt(st.rate_num) << " r2_num=" << fmt(st.r2_num);
    if (with_ref) out << " rate_ref=" << fmt(st.rate_ref) << " r2_ref=" << fmt(st.r2_ref);
    out << "\nt,dist_num" << (with_ref ? ",dist_ref" : "") << "\n";
    for (std::size_t i = 0; i < st.times.size(); ++i) {
        out << fmt(st.times[i]) << ',' << fmt(st.dist_num[i]);
        if (with_ref) out << ',' << fmt(st.dist_ref[i]);
        out << '\n';
    }
    return st;
}

std::vector<TailFit> run_tail_study(const RunConfig& cfg) {
    if (cfg.model != "homogeneous") throw std::invalid_argument("run_tail_study: homogeneous model required");
    const AlphaParam alpha(cfg.alpha);
    const VelocityGrid vg = cfg.velocity_grid();
    const LfpOperator op = assemble_lfp(alpha, vg, cfg.gamma_decay);
    Vector f = initial_homogeneous(cfg, op);
    HomogeneousStepper stepper(op, cfg.dt);

    auto fit_tail = [&](double t, const Vector& fv) {
        TailFit tf;
        tf.time = t;
        std::vector<double> xs, ys;
        bool nonpositive = false;
        for (long j = 0; j <= vg.J; ++j) {
            const double v = vg.v(j);
            if (v < cfg.tail_lo || v > vg.L()) continue;
            const double val = fv[vg.idx(j)];
            if (val <= 0.0) {
                nonpositive = true;
                continue;
            }
            xs.push_back(std::log(v));
            ys.push_back(std::log(val));
        }
        tf.points = static_cast<long>(xs.size());
        if (nonpositive || xs.size() < 3) return tf;  // fit skipped, valid stays false
        tf.slope = linear_fit(xs, ys).slope;
        tf.valid = true;
        return tf;
    };

    std::vector<double> times = cfg.tail_times;
    std::sort(times.begin(), times.end());
    std::vector<TailFit> fits;
    double t = 0.0;
    std::size_t next = 0;
    while (next < times.size() && times[next] <= 1e-12) {
        fits.push_back(fit_tail(0.0, f));
        write_snapshot_v(snapshot_name(cfg, 0.0), cfg, vg, f);
        ++next;
    }
    const long nsteps = static_cast<long>(std::llround((times.empty() ? cfg.T : times.back()) / cfg.dt));
    for (long n = 1; n <= nsteps; ++n) {
        f = stepper.step(f);
        t = static_cast<double>(n) * cfg.dt;
        while (next < times.size() && t >= times[next] - cfg.dt / 2.0) {
            fits.push_back(fit_tail(times[next], f));
            write_snapshot_v(snapshot_name(cfg, times[next]), cfg, vg, f);
            ++next;
        }
    }

    std::ofstream out(cfg.out + "tails.csv");
    out << "# config: " << render_config(cfg) << "\n";
    out << "t,slope,points,valid\n";
    for (const auto& tf : fits)
        out << fmt(tf.time) << ',' << (tf.valid ? fmt(tf.slope) : "skipped") << ',' << tf.points << ','
            << (tf.valid ? 1 : 0) << '\n';
    return fits;
}

}  // namespace levyfp
