#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "levyfp/analysis.hpp"
#include "levyfp/integrators.hpp"
#include "levyfp/operators.hpp"
#include "levyfp/reference.hpp"
#include "levyfp/stable_density.hpp"
#include "levyfp/studies.hpp"
#include "levyfp/weights.hpp"

using namespace levyfp;

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// layered configuration: file first, explicit flags override
struct ConfigSource {
    std::string config_path;
    std::vector<std::string> overrides;  // "key=value" pairs collected from flags

    RunConfig resolve() const {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config file " + config_path);
            std::stringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        for (const auto& kv : overrides) text += "\n" + kv;
        return parse_config(text);
    }
};

void add_run_options(CLI::App* cmd, ConfigSource& src) {
    cmd->add_option("--config", src.config_path, "flat key-value config file");
    auto push = [&src](const std::string& key) {
        return [&src, key](const std::string& v) { src.overrides.push_back(key + " = " + v); };
    };
    cmd->add_option_function<std::string>("--model", push("model"), "homogeneous | kinetic");
    cmd->add_option_function<std::string>("--scheme", push("scheme"), "euler | sl");
    cmd->add_option_function<std::string>("--alpha", push("alpha"), "stability index in (0,2]");
    cmd->add_option_function<std::string>("--L", push("L"), "velocity half-width");
    cmd->add_option_function<std::string>("--J", push("J"), "velocity half point count");
    cmd->add_option_function<std::string>("--h", push("h"), "velocity mesh size (alternative to --J)");
    cmd->add_option_function<std::string>("--K", push("K"), "integral truncation index");
    cmd->add_option_function<std::string>("--k-ratio", push("k_ratio"), "K = k_ratio*J + 1 (default 10)");
    cmd->add_option_function<std::string>("--gamma", push("gamma"), "far-field decay exponent (default 1+alpha)");
    cmd->add_option_function<std::string>("--nx", push("nx"), "space points (odd)");
    cmd->add_option_function<std::string>("--period", push("period"), "space period");
    cmd->add_option_function<std::string>("--dt", push("dt"), "time step");
    cmd->add_option_function<std::string>("--T", push("T"), "final time");
    cmd->add_option_function<std::string>("--init", push("init"), "preset (equilibrium|tc1|tc2|tc3) or file:<path>");
    cmd->add_option_function<std::string>("--out", push("out"), "output prefix");
    cmd->add_option_function<std::string>("--seed", push("seed"), "run seed (recorded in outputs)");
    cmd->add_option_function<std::string>("--snapshot-stride", push("snapshot_stride"), "steps between trace rows");
    cmd->add_option_function<std::string>("--fit-lo", push("fit_lo"), "decay fit window start");
    cmd->add_option_function<std::string>("--fit-hi", push("fit_hi"), "decay fit window end");
    cmd->add_option_function<std::string>("--tail-lo", push("tail_lo"), "tail fit lower velocity");
    cmd->add_option_function<std::string>("--tail-times", push("tail_times"), "comma-separated fit times");
}

int cmd_density(double a, double vmin, double vmax, long n, const std::string& out) {
    const AlphaParam alpha(a);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    os << "v,mu\n";
    for (long i = 0; i < n; ++i) {
        const double v = (n == 1) ? vmin : vmin + (vmax - vmin) * static_cast<double>(i) / static_cast<double>(n - 1);
        os << fmt(v) << ',' << fmt(eval_density(alpha, v)) << '\n';
    }
    return 0;
}

int cmd_weights(double a, double h, long K, const std::string& out) {
    const AlphaParam alpha(a);
    const WeightTable w = build_weights(alpha, h, K);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    os << "k,beta_k,beta_scaled\n";
    for (long k = 1; k <= w.K; ++k) {
        const double b = w.at(k);
        os << k << ',' << fmt(b) << ',' << fmt(b * std::pow(h * static_cast<double>(k), 1.0 + a)) << '\n';
    }
    os << "# boundary beta_K = " << fmt(w.beta_boundary) << "\n";
    return 0;
}

int cmd_operator(double a, double h, long J, long K, const std::string& prefix) {
    const AlphaParam alpha(a);
    const VelocityGrid grid = (K > 0) ? VelocityGrid(h, J, K) : VelocityGrid::with_default_K(h, J);
    const LfpOperator op = assemble_lfp(alpha, grid);
    {
        std::ofstream os(prefix + "L.csv");
        for (long i = 0; i < op.L_mat.rows(); ++i) {
            for (long j = 0; j < op.L_mat.cols(); ++j) os << (j ? "," : "") << fmt(op.L_mat(i, j));
            os << '\n';
        }
    }
    {
        std::ofstream os(prefix + "M.csv");
        os << "v,M\n";
        for (long j = -grid.J; j <= grid.J; ++j) os << fmt(grid.v(j)) << ',' << fmt(op.M[grid.idx(j)]) << '\n';
    }
    {
        std::ofstream os(prefix + "VM.csv");
        os << "v_half,VM\n";
        for (long m = 0; m < op.vm.size(); ++m)
            os << fmt(grid.v(-grid.J + m) + grid.h / 2.0) << ',' << fmt(op.vm[m]) << '\n';
    }
    {
        std::ofstream os(prefix + "IL.csv");
        os << "I_L\n" << fmt(op.I_L) << '\n';
    }
    std::cout << "wrote " << prefix << "{L,M,VM,IL}.csv  (|L M|_inf = "
              << fmt((op.L_mat * op.M).cwiseAbs().maxCoeff()) << ")\n";
    return 0;
}

int cmd_probe(double a, double h, long J, const std::string& suite, const std::string& out) {
    (void)J;
    const ProbeRatios pr = run_probe_suite(suite, AlphaParam(a), h);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    os << "test_id,ratio_h,ratio_h2\n";
    int rc = 0;
    for (std::size_t b = 0; b < pr.ratio_h.size(); ++b) {
        os << b << ',' << fmt(pr.ratio_h[b]) << ',' << fmt(pr.ratio_h2[b]) << '\n';
        if (!std::isfinite(pr.ratio_h[b]) || !std::isfinite(pr.ratio_h2[b])) rc = 1;
    }
    return rc;
}

int cmd_reference(const std::string& tcase, double t, double a, double L, long J, long nx, double period,
                  const std::string& out) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    if (tcase == "tc1") {
        const VelocityGrid g(L / static_cast<double>(J), J, 2 * J + 1);
        Tc1Params p;
        p.alpha = a;
        os << "v,f\n";
        for (long j = -g.J; j <= g.J; ++j)
            os << fmt(g.v(j)) << ',' << fmt(exact_homogeneous(p, t, g.v(j))) << '\n';
    } else if (tcase == "tc3") {
        const PhaseGrid pg(nx, period, VelocityGrid(L / static_cast<double>(J), J, 2 * J + 1));
        const Matrix f = exact_kinetic_grid(Tc3Params{}, t, pg);
        os << "x,v,f\n";
        for (long i = 0; i < pg.Nx; ++i)
            for (long j = 0; j < pg.vgrid.size(); ++j)
                os << fmt(pg.x(i)) << ',' << fmt(pg.vgrid.v(pg.vgrid.vel(j))) << ',' << fmt(f(i, j)) << '\n';
    } else {
        throw std::runtime_error("unknown case `" + tcase + "` (tc1|tc3)");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structure-preserving solver for the 1D Levy-Fokker-Planck equations"};
    app.require_subcommand(1);
    // --h is a mesh-size flag throughout; keep only the long help name
    app.set_help_flag("--help", "print help");

    // density
    double d_alpha = 1.0, d_vmin = -10.0, d_vmax = 10.0;
    long d_n = 201;
    std::string d_out = "density.csv";
    auto* density = app.add_subcommand("density", "sample the stable density mu_alpha");
    density->add_option("--alpha", d_alpha)->required();
    density->add_option("--vmin", d_vmin);
    density->add_option("--vmax", d_vmax);
    density->add_option("--n", d_n);
    density->add_option("--out", d_out);

    // weights
    double w_alpha = 1.0, w_h = 1.0;
    long w_K = 641;
    std::string w_out = "weights.csv";
    auto* weights = app.add_subcommand("weights", "quadrature weights beta_k^h");
    weights->add_option("--alpha", w_alpha)->required();
    weights->add_option("--h", w_h)->required();
    weights->add_option("--K", w_K)->required();
    weights->add_option("--out", w_out);

    // operator
    double o_alpha = 1.0, o_h = 0.25;
    long o_J = 64, o_K = 0;
    std::string o_out = "operator_";
    auto* op = app.add_subcommand("operator", "assemble and dump the truncated operator");
    op->add_option("--alpha", o_alpha)->required();
    op->add_option("--h", o_h)->required();
    op->add_option("--J", o_J)->required();
    op->add_option("--K", o_K);
    op->add_option("--out", o_out);

    // probe
    double p_alpha = 1.0, p_h = 0.5;
    long p_J = 0;
    std::string p_suite = "poincare", p_out = "probe.csv";
    auto* probe = app.add_subcommand("probe", "functional-inequality probes on the test battery");
    probe->add_option("--alpha", p_alpha)->required();
    probe->add_option("--h", p_h)->required();
    probe->add_option("--J", p_J);
    probe->add_option("--suite", p_suite)->check(CLI::IsMember({"poincare", "interp", "commutator"}));
    probe->add_option("--out", p_out);

    // run / convergence / decay / tails share the config surface
    ConfigSource run_src, conv_src, decay_src, tails_src;
    auto* run = app.add_subcommand("run", "time-step a configured model");
    add_run_options(run, run_src);
    auto* conv = app.add_subcommand("convergence", "mesh-refinement study against the analytic reference");
    add_run_options(conv, conv_src);
    int conv_levels = 6;
    conv->add_option("--levels", conv_levels, "number of refinement levels");
    auto* decay = app.add_subcommand("decay", "distance-to-equilibrium study (kinetic)");
    add_run_options(decay, decay_src);
    auto* tails = app.add_subcommand("tails", "heavy-tail slope study (homogeneous)");
    add_run_options(tails, tails_src);

    // reference
    std::string r_case = "tc1", r_out = "reference.csv";
    double r_t = 0.0, r_alpha = 1.0, r_L = 16.0, r_period = 2.0 * M_PI;
    long r_J = 32, r_nx = 129;
    auto* reference = app.add_subcommand("reference", "sample an analytic reference solution");
    reference->add_option("--case", r_case)->check(CLI::IsMember({"tc1", "tc3"}));
    reference->add_option("--t", r_t);
    reference->add_option("--alpha", r_alpha);
    reference->add_option("--L", r_L);
    reference->add_option("--J", r_J);
    reference->add_option("--nx", r_nx);
    reference->add_option("--period", r_period);
    reference->add_option("--out", r_out);

    for (auto* sub : app.get_subcommands({})) sub->set_help_flag("--help", "print help");

    CLI11_PARSE(app, argc, argv);

    try {
        if (density->parsed()) return cmd_density(d_alpha, d_vmin, d_vmax, d_n, d_out);
        if (weights->parsed()) return cmd_weights(w_alpha, w_h, w_K, w_out);
        if (op->parsed()) return cmd_operator(o_alpha, o_h, o_J, o_K, o_out);
        if (probe->parsed()) return cmd_probe(p_alpha, p_h, p_J, p_suite, p_out);
        if (reference->parsed()) return cmd_reference(r_case, r_t, r_alpha, r_L, r_J, r_nx, r_period, r_out);
        if (run->parsed()) {
            const RunConfig cfg = run_src.resolve();
            const RunResult res = run_simulation(cfg);
            std::cout << "done: drift=" << fmt(res.mass_drift) << " min_f=" << fmt(res.min_density)
                      << " l2_monotone=" << (res.l2_monotone ? "yes" : "no") << " ("
                      << fmt(res.runtime_seconds) << " s)\n";
            return 0;
        }
        if (conv->parsed()) {
            const RunConfig cfg = conv_src.resolve();
            const StudyReport rep = run_convergence_study(cfg, conv_levels);
            for (const auto& r : rep.rows)
                std::cout << "h=" << fmt(r.meshsize) << "  linf=" << fmt(r.error_linf)
                          << "  l2mu=" << fmt(r.error_l2mu) << "  order_l2mu="
                          << (std::isnan(r.order_l2mu) ? std::string("-") : fmt(r.order_l2mu)) << "\n";
            return 0;
        }
        if (decay->parsed()) {
            const RunConfig cfg = decay_src.resolve();
            const DecayStudy st = run_decay_study(cfg);
            std::cout << "rate_num=" << fmt(st.rate_num) << " r2=" << fmt(st.r2_num);
            if (!st.dist_ref.empty()) std::cout << "  rate_ref=" << fmt(st.rate_ref) << " r2=" << fmt(st.r2_ref);
            std::cout << "\n";
            return 0;
        }
        if (tails->parsed()) {
            const RunConfig cfg = tails_src.resolve();
            const auto fits = run_tail_study(cfg);
            for (const auto& tf : fits) {
                std::cout << "t=" << fmt(tf.time) << "  ";
                if (tf.valid)
                    std::cout << "slope=" << fmt(tf.slope) << " (" << tf.points << " points)\n";
                else
                    std::cout << "fit skipped (" << tf.points << " usable points)\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
