#include "dnls/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace dnls {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CSV with a schema comment line and a column header.
class Csv {
public:
    Csv(const fs::path& path, const std::string& schema, const std::vector<std::string>& cols) : os_(path) {
        if (!os_) throw ConfigError("cannot write " + path.string());
        os_ << "# dnls " << schema << " v1\n";
        for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
        os_ << "\n";
    }
    void row(std::initializer_list<double> vals) {
        bool first = true;
        for (double v : vals) {
            os_ << (first ? "" : ",") << g17(v);
            first = false;
        }
        os_ << "\n";
    }

private:
    std::ofstream os_;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << text;
}

std::string solve_plot_script() {
    return "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set logscale xy\n"
           "set xlabel 't'\n"
           "set terminal pngcairo size 900,600\n"
           "set output 'norms.png'\n"
           "plot 'norms.csv' using 1:3 with linespoints title '||u||_inf'\n"
           "set output 'ledger.png'\n"
           "plot 'ledger.csv' using 1:4 with linespoints title 'ledger defect'\n"
           "set output 'vf_report.png'\n"
           "plot 'vf_report.csv' using 1:3 with lines title '||L u||_2', "
           "'vf_report.csv' using 1:4 with lines title '||L^2 u||_2'\n";
}

std::string asymptotics_plot_script() {
    return "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set terminal pngcairo size 900,600\n"
           "set output 'profile.png'\n"
           "set xlabel 'y'\n"
           "plot 'profile.csv' using 1:2 with lines title 'Re z+', 'profile.csv' using 1:3 with lines title 'Im z+', "
           "'profile.csv' using 1:4 with lines title 'psi+'\n"
           "set logscale xy\n"
           "set xlabel 't'\n"
           "set output 'remainder.png'\n"
           "plot 'remainder.csv' using 1:2 with linespoints title '||v_Lc||_inf', "
           "'remainder.csv' using 1:4 with linespoints title 'R proxy'\n"
           "set output 'residuals.png'\n"
           "plot 'residuals.csv' using 1:2 with linespoints title 'r_inf t^(1/2)', "
           "'residuals.csv' using 1:4 with linespoints title 'scattering L2'\n";
}

cplx probe(double x) { return std::exp(-0.5 * (x - 0.3) * (x - 0.3)) * std::polar(1.0, 0.2 * x); }

double rel_err(const CVec& a, const CVec& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num += std::norm(a[j] - ref[j]);
        den += std::norm(ref[j]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Config: return kExitConfig;
        case ErrorKind::Precondition: return kExitConfig;
        case ErrorKind::Numerical: return kExitNumerical;
        case ErrorKind::NonConvergence: return kExitNonConvergence;
    }
    return 1;
}

SolveResult cmd_solve(const ExperimentConfig& cfg, const SolveOptions& opt) {
    cfg.validate();
    SolveResult res;
    res.out_dir = opt.out_dir.empty() ? cfg.output.dir : opt.out_dir;
    const fs::path dir(res.out_dir);
    if (opt.write_files) {
        fs::create_directories(dir);
        save_config((dir / "config.txt").string(), cfg);
        if (cfg.output.write_fields) fs::create_directories(dir / "fields");
    }

    Field u0;
    EvolveOptions eo;
    eo.test_mode = cfg.test_mode;
    eo.keep_fields = opt.keep_fields;
    if (!opt.resume_path.empty()) {
        const CheckpointFile ck = read_checkpoint(opt.resume_path);
        if (ck.params.alpha != cfg.model.alpha || ck.params.lambda1 != cfg.model.lambda1 ||
            ck.params.lambda2 != cfg.model.lambda2 || ck.symbol.c2 != cfg.symbol.c2 ||
            ck.symbol.c1 != cfg.symbol.c1 || ck.symbol.c0 != cfg.symbol.c0)
            throw ConfigError("resume: checkpoint parameters differ from the config");
        if (!(ck.u.grid == cfg.grid())) throw ConfigError("resume: checkpoint grid differs from the config");
        u0 = ck.u;
        eo.resume_initial_mass = ck.initial_mass;
        eo.resume_dissipation = ck.cumulative_dissipation;
    } else {
        u0 = make_initial(cfg.initial.to_spec(), cfg.grid());
    }

    std::vector<VFRow> vf;
    std::vector<std::pair<double, std::string>> field_index;
    std::size_t counter = 0;
    Field last_field;
    eo.on_checkpoint = [&](const Checkpoint& ck, const DissipationLedger&) {
        last_field = ck.u;
        if (cfg.pipeline.vf_report) vf.push_back(vf_row(ck.u, cfg.symbol));
        if (opt.write_files && cfg.output.write_fields) {
            char name[32];
            std::snprintf(name, sizeof name, "u_%05zu.bin", counter);
            write_field_binary((dir / "fields" / name).string(), ck.u);
            field_index.emplace_back(ck.t, name);
        }
        ++counter;
        if (!opt.quiet) std::cerr << "t = " << ck.t << "  ||u||_inf = " << ck.norms.linf << "\n";
    };

    res.traj = strang_evolve(u0, cfg.time, cfg.model, cfg.symbol, eo);
    if (!opt.resume_path.empty()) res.traj.x_norm0 = 0.0;

    if (opt.write_files) {
        {
            Csv c(dir / "ledger.csv", "ledger", {"t", "mass", "dissipation", "defect"});
            for (const auto& e : res.traj.ledger.series) c.row({e.t, e.mass, e.dissipation, e.defect});
        }
        {
            Csv c(dir / "norms.csv", "norms", {"t", "l2", "linf"});
            for (const auto& ck : res.traj.checkpoints) c.row({ck.t, ck.norms.l2, ck.norms.linf});
        }
        if (cfg.pipeline.vf_report) {
            Csv c(dir / "vf_report.csv", "vf_report", {"t", "l2", "Lnorm", "L2norm", "linf", "r1", "r4"});
            for (const auto& r : vf) c.row({r.t, r.l2, r.Lnorm, r.L2norm, r.linf, r.r1, r.r4});
        }
        if (cfg.output.write_fields) {
            std::ofstream idx(dir / "fields" / "index.csv");
            idx << "# dnls field_index v1\nt,file\n";
            for (const auto& [t, f] : field_index) idx << g17(t) << "," << f << "\n";
        }
        if (cfg.output.write_checkpoint && !res.traj.checkpoints.empty()) {
            CheckpointFile ck;
            ck.u = last_field;
            ck.params = cfg.model;
            ck.symbol = cfg.symbol;
            ck.initial_mass = res.traj.ledger.initial_mass;
            ck.cumulative_dissipation = res.traj.ledger.series.back().dissipation;
            write_checkpoint((dir / "state.ckp").string(), ck);
        }
        std::ostringstream w;
        w << "x_norm0 = " << g17(res.traj.x_norm0) << "\nsteps = " << res.traj.steps << "\n";
        for (const auto& s : res.traj.warnings) w << "warning = " << s << "\n";
        write_text(dir / "summary.txt", w.str());
        write_text(dir / "plot.gp", solve_plot_script());
    }
    return res;
}

double identity4_defect(const PhaseAccumulator& phi, const std::vector<CVec>& z, const ModelParams& p,
                        const std::vector<bool>& mask) {
    const std::size_t n = phi.t.size();
    if (n == 0 || z.size() != n) throw PreconditionError("identity4_defect: series mismatch");
    const std::size_t ny = z[0].size();
    const double a = p.alpha, al = p.alpha * p.lambda2;
    RVec integral(ny, 0.0), prev(ny);
    auto g = [&](std::size_t m, std::size_t j) { return al * std::pow(phi.t[m], -0.5 * a) * std::pow(std::abs(z[m][j]), a); };
    for (std::size_t j = 0; j < ny; ++j) integral[j] = (phi.t[0] - 1.0) * g(0, j);
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t j = 0; j < ny; ++j)
            integral[j] += 0.5 * (phi.t[m] - phi.t[m - 1]) * (g(m - 1, j) + g(m, j));
    double worst = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        if (!mask[j]) continue;
        const double e = std::exp(al * phi.phi.back()[j]);
        worst = std::max(worst, std::abs(e - 1.0 - integral[j]) / e);
    }
    return worst;
}

AsymptoticsReport analyze_trajectory(const Trajectory& traj, const ExperimentConfig& cfg) {
    if (traj.checkpoints.empty()) throw PreconditionError("asymptotics: empty trajectory");
    AsymptoticsReport rep;
    rep.params = traj.params;
    rep.symbol = traj.symbol;
    const ModelParams& p = traj.params;
    const SymbolF& F = traj.symbol;
    const double T = traj.checkpoints.back().t;
    rep.ygrid = cfg.scaled.m ? Grid1D(cfg.scaled.m, cfg.scaled.Y) : make_ygrid(cfg.scaled.Y, T, F);

    double worst_tail = 0.0;
    std::vector<const Checkpoint*> late;
    for (const auto& ck : traj.checkpoints) {
        if (ck.t < 1.0 - 1e-12) continue;
        if (ck.u.values.empty()) throw PreconditionError("asymptotics: trajectory has no stored fields");
        FrameInfo fi;
        const ScaledField v = to_v_frame(ck.u, rep.ygrid, &fi);
        worst_tail = std::max(worst_tail, fi.tail_fraction);
        ScaledCheckpoint sc = split_v(v, F, cfg.cutoff, cfg.filter);
        sc.v.values = CVec();
        sc.vlamc.values = CVec();
        rep.scaled.push_back(std::move(sc));
        late.push_back(&ck);
    }
    if (rep.scaled.empty()) throw PreconditionError("asymptotics: no checkpoints with t >= 1");
    if (worst_tail > 1e-10) rep.warnings.push_back("spectral tail fraction up to " + g17(worst_tail));

    rep.remainder = remainder_rates(rep.scaled, p, F, cfg.pipeline.fit_t_min);
    rep.phi = phi_accumulate(rep.scaled, p);
    for (std::size_t m = 0; m < rep.scaled.size(); ++m) rep.z.push_back(z_of(rep.scaled[m].vlam, rep.phi.phi[m], F, p));
    rep.profile = extract_zplus(rep.ygrid, rep.phi.t, rep.z, cfg.pipeline.fit_t_min);
    const auto mask = support_mask(rep.profile.zplus, cfg.tol.support_threshold);
    rep.identity4_defect = identity4_defect(rep.phi, rep.z, p, mask);

    if (rep.profile.converged) {
        try {
            rep.psi = psi_plus(rep.phi, rep.z, rep.profile, p, cfg.tol.support_threshold);
            rep.profile.psi_plus = rep.psi->primary;
        } catch (const NonConvergence& e) {
            rep.psi_error = e.what();
        }
    }
    if (!rep.psi) {
        // Endpoint estimator only, so the residual series can still be reported.
        const RVec K = K_of(T, rep.profile.zplus, p);
        const double al = p.alpha * p.lambda2;
        for (std::size_t j = 0; j < K.size(); ++j)
            rep.profile.psi_plus[j] = K[j] * std::expm1(al * rep.phi.phi.back()[j] - std::log(K[j]));
    }

    if (rep.profile.final_dyads.size() == 3) {
        const auto& fd = rep.profile.final_dyads;
        rep.dyadic_times = {fd[1].t1, fd[2].t1, fd[2].t2};
    }

    std::optional<Field> uplus;
    try {
        uplus = u_plus(rep.profile.zplus, rep.ygrid, F, traj.grid);
    } catch (const PreconditionError& e) {
        rep.warnings.push_back(std::string("u_plus: ") + e.what());
    }
    const double target = universal_limit_target(p);
    for (const Checkpoint* ck : late) {
        if (ck->t < cfg.pipeline.fit_t_min * (1.0 - 1e-12)) continue;
        ResidualRow row;
        row.t = ck->t;
        row.limit_probe = std::pow(ck->t, 1.0 / p.alpha) * ck->norms.linf;
        row.target = target;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        try {
            const ProfileResidual r = profile_residuals(ck->u, rep.profile, F, p, cfg.tol.coverage);
            row.r_inf_scaled = r.r_inf * std::sqrt(ck->t);
            row.r_l2 = r.r_l2;
        } catch (const Error& e) {
            row.r_inf_scaled = row.r_l2 = nan;
            rep.warnings.push_back("profile residual at t = " + g17(ck->t) + ": " + e.what());
        }
        try {
            row.scat_l2 = uplus ? scattering_residual(ck->u, rep.profile, *uplus, F, p) : nan;
        } catch (const Error& e) {
            row.scat_l2 = nan;
            rep.warnings.push_back("scattering residual at t = " + g17(ck->t) + ": " + e.what());
        }
        rep.residuals.push_back(row);
    }
    if (rep.dyadic_times.size() == 3) {
        std::vector<const ResidualRow*> at;
        for (double t : rep.dyadic_times)
            for (const auto& r : rep.residuals)
                if (std::abs(r.t - t) <= 1e-9 * t) at.push_back(&r);
        if (at.size() == 3) {
            rep.r_inf_nonincreasing = at[0]->r_inf_scaled >= at[1]->r_inf_scaled && at[1]->r_inf_scaled >= at[2]->r_inf_scaled;
            rep.scat_nonincreasing = at[0]->scat_l2 >= at[1]->scat_l2 && at[1]->scat_l2 >= at[2]->scat_l2;
        }
    }

    rep.limit = universal_limit_probe(traj, cfg.tol.limit);

    if (T > cfg.pipeline.ode_t0) {
        std::size_t i0 = 0;
        for (std::size_t m = 0; m < rep.scaled.size(); ++m)
            if (std::abs(rep.scaled[m].t - cfg.pipeline.ode_t0) < std::abs(rep.scaled[i0].t - cfg.pipeline.ode_t0)) i0 = m;
        const ScaledField ref = ode_reference(rep.scaled[i0].vlam, T, p, F);
        OdeComparison oc;
        oc.t0 = rep.scaled[i0].t;
        oc.T = T;
        const CVec& vT = rep.scaled.back().vlam.values;
        for (std::size_t j = 0; j < vT.size(); ++j) {
            if (!mask[j]) continue;
            const double r = std::abs(ref.values[j]);
            if (r > 0.0) oc.max_rel_err = std::max(oc.max_rel_err, std::abs(std::abs(vT[j]) - r) / r);
        }
        oc.ok = oc.max_rel_err <= cfg.tol.ode_rel;
        rep.ode = oc;
    }

    std::vector<double> tt, yy;
    for (const auto& ck : traj.checkpoints)
        if (ck.t > 0.0 && ck.norms.linf > 0.0) {
            tt.push_back(ck.t);
            yy.push_back(ck.norms.linf);
        }
    try {
        rep.decay = loglog_fit_window(tt, yy, 50.0, T, 8);
        rep.decay_fitted = true;
    } catch (const PreconditionError&) {
        rep.decay_fitted = false;
    }
    return rep;
}

std::string verdict_text(const AsymptoticsReport& rep) {
    std::ostringstream os;
    auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
    auto kd = [&](const std::string& k, double v) { kv(k, g17(v)); };
    auto kb = [&](const std::string& k, bool v) { kv(k, v ? "true" : "false"); };
    const auto& pr = rep.profile;
    kv("profile", pr.verdict);
    kb("converged", pr.converged);
    kd("T_max", pr.T_max);
    kd("kappa_est", pr.kappa_est);
    kd("kappa_fit_t_lo", pr.fit_t_lo);
    kd("kappa_fit_t_hi", pr.fit_t_hi);
    for (std::size_t i = 0; i < pr.final_dyads.size(); ++i) {
        const auto& d = pr.final_dyads[i];
        kv("cauchy_dyad_" + std::to_string(i + 1), g17(d.t1) + " " + g17(d.t2) + " " + g17(d.diff));
    }
    if (rep.psi) {
        kd("psi_max_discrepancy", rep.psi->max_discrepancy);
        kd("psi_budget_ratio", rep.psi->max_ratio);
        kb("psi_agree", rep.psi->agree);
        kd("psi_truncation_estimate", rep.psi->truncation);
    } else {
        kv("psi_agree", rep.psi_error.empty() ? "not evaluated" : "false (" + rep.psi_error + ")");
    }
    kd("identity4_defect", rep.identity4_defect);
    const auto& rm = rep.remainder;
    kd("slope_vlamc_inf", rm.slope_inf.slope);
    kd("bound_vlamc_inf", rm.bound_inf);
    kb("vlamc_inf_ok", rm.inf_ok);
    kd("slope_vlamc_l2", rm.slope_l2.slope);
    kd("bound_vlamc_l2", rm.bound_l2);
    kb("vlamc_l2_ok", rm.l2_ok);
    kd("slope_R_proxy", rm.slope_R.slope);
    kd("bound_R_h01", rm.bound_R);
    kd("bound_R_h02", rm.bound_R_h02);
    kb("R_ok", rm.R_ok);
    kd("slope_ratio_final_decade", rm.slope_ratio_final_decade.slope);
    kb("ratio_to_zero", rm.ratio_to_zero);
    kd("limit_probe", rep.limit.final_value);
    kd("target", rep.limit.target);
    kd("limit_rel_err", rep.limit.final_rel_err);
    kd("limit_max_rel_err_final_decade", rep.limit.max_rel_err_final_decade);
    kb("limit_within_tol", rep.limit.within_tol);
    kb("limit_monotone", rep.limit.monotone);
    kb("alpha_above_alpha0", rep.limit.alpha_in_range);
    if (rep.decay_fitted) {
        kd("decay_slope", rep.decay.slope);
        kd("decay_slope_theil_sen", rep.decay.theil_sen);
        kd("decay_expected", -1.0 / rep.params.alpha);
    }
    if (rep.ode) {
        kd("ode_t0", rep.ode->t0);
        kd("ode_max_rel_err", rep.ode->max_rel_err);
        kb("ode_ok", rep.ode->ok);
    }
    kb("r_inf_scaled_nonincreasing", rep.r_inf_nonincreasing);
    kb("scattering_nonincreasing", rep.scat_nonincreasing);
    for (const auto& w : rep.warnings) kv("warning", w);
    return os.str();
}

Trajectory load_trajectory(const std::string& dir, const ExperimentConfig& cfg) {
    const fs::path idx = fs::path(dir) / "fields" / "index.csv";
    std::ifstream in(idx);
    if (!in) throw PreconditionError("asymptotics: no field index at " + idx.string());
    Trajectory traj;
    traj.params = cfg.model;
    traj.symbol = cfg.symbol;
    traj.grid = cfg.grid();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line == "t,file") continue;
        const auto c = line.find(',');
        if (c == std::string::npos) throw PreconditionError("asymptotics: malformed index line '" + line + "'");
        Checkpoint ck;
        ck.u = read_field((fs::path(dir) / "fields" / line.substr(c + 1)).string());
        ck.t = ck.u.t;
        ck.norms = norms(ck.u);
        if (!(ck.u.grid == traj.grid)) throw PreconditionError("asymptotics: stored field grid differs from the config");
        if (traj.checkpoints.empty() && ck.t == 0.0) traj.x_norm0 = weighted_l2(ck.u, 1);
        traj.checkpoints.push_back(std::move(ck));
    }
    if (traj.checkpoints.empty()) throw PreconditionError("asymptotics: empty trajectory in " + dir);
    return traj;
}

AsymptoticsReport cmd_asymptotics(const ExperimentConfig& cfg, const std::string& from_dir,
                                  const std::string& out_dir) {
    cfg.validate();
    const std::string dir = out_dir.empty() ? (from_dir.empty() ? cfg.output.dir : from_dir) : out_dir;
    Trajectory traj;
    if (from_dir.empty()) {
        SolveOptions so;
        so.keep_fields = true;
        so.out_dir = dir;
        traj = cmd_solve(cfg, so).traj;
    } else {
        traj = load_trajectory(from_dir, cfg);
    }
    AsymptoticsReport rep = analyze_trajectory(traj, cfg);

    const fs::path d(dir);
    fs::create_directories(d);
    {
        Csv c(d / "profile.csv", "profile", {"y", "re_zplus", "im_zplus", "psi_plus"});
        for (std::size_t j = 0; j < rep.profile.zplus.size(); ++j)
            c.row({rep.ygrid.x(j), rep.profile.zplus[j].real(), rep.profile.zplus[j].imag(), rep.profile.psi_plus[j]});
    }
    {
        Csv c(d / "residuals.csv", "residuals", {"t", "r_inf_scaled", "r_l2", "scat_l2", "limit_probe", "target"});
        for (const auto& r : rep.residuals) c.row({r.t, r.r_inf_scaled, r.r_l2, r.scat_l2, r.limit_probe, r.target});
    }
    {
        Csv c(d / "remainder.csv", "remainder", {"t", "vlamc_inf", "vlamc_l2", "R_inf_proxy", "ratio"});
        for (const auto& r : rep.remainder.rows) c.row({r.t, r.vlamc_inf, r.vlamc_l2, r.R_inf_proxy, r.ratio});
    }
    write_text(d / "verdict.txt", verdict_text(rep));
    write_text(d / "plot_asymptotics.gp", asymptotics_plot_script());
    return rep;
}

bool OracleReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const OracleRow& r) { return r.pass; });
}

OracleReport run_oracle(const ExperimentConfig& cfg) {
    const auto& oc = cfg.oracle;
    if (oc.n > oc.cap) throw PreconditionError("oracle: n = " + std::to_string(oc.n) + " exceeds the cap " + std::to_string(oc.cap));
    const Grid1D g(oc.n, oc.half_width);
    const SymbolF& F = cfg.symbol;
    const double tol = cfg.tol.oracle, tol_id = cfg.tol.identity;
    DenseOptions dop;
    dop.cap = oc.cap;
    dop.xi_oversample = oc.xi_oversample;

    CVec pv(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) pv[j] = probe(g.x(j));

    OracleReport rep;
    auto add = [&](const std::string& name, double h, double value, double t) {
        rep.rows.push_back({name, h, value, t, std::isfinite(value) && value <= t});
    };

    for (double h : oc.h) {
        // Quantization of 1 is the identity.
        {
            const DenseOperator I = weyl_dense([](double, double) { return cplx(1.0); }, h, g, dop);
            double num = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j)
                for (std::size_t l = 0; l < g.size(); ++l) num += std::norm(I(j, l) - (j == l ? 1.0 : 0.0));
            add("identity_a1", h, std::sqrt(num / static_cast<double>(g.size())), tol_id);
        }
        {
            const CVec got = weyl_dense([](double x, double) { return cplx(x); }, h, g, dop).apply(pv);
            CVec ref(g.size());
            for (std::size_t j = 0; j < g.size(); ++j) ref[j] = g.x(j) * pv[j];
            add("symbol_x", h, rel_err(got, ref), tol_id);
        }
        {
            const CVec got = weyl_dense([](double, double xi) { return cplx(xi); }, h, g, dop).apply(pv);
            CVec ref = apply_D(g, pv);
            for (auto& z : ref) z *= h;
            add("symbol_xi", h, rel_err(got, ref), tol);
        }

        const Symbol Gam = lambda_cutoff_symbol(cfg.cutoff, F, h);
        const double sh = std::sqrt(h);
        const Symbol ell = [F, sh](double x, double xi) { return cplx((x + F.Fprime(xi)) / sh); };
        const DenseOperator A = weyl_dense(Gam, h, g, dop);
        {
            ScaledField v(g, 1.0 / h);
            v.values = pv;
            FilterOptions fo = cfg.filter;
            fo.padding = oc.padding;
            fo.chirp_scale = oc.chirp_scale;
            // Refine until the chirp is resolved on the whole box.
            double value = std::numeric_limits<double>::infinity();
            for (fo.oversample = 1; fo.oversample <= 64 && !std::isfinite(value); fo.oversample *= 2) {
                try {
                    value = rel_err(filter_fast(v, h, F, cfg.cutoff, fo).values, A.apply(pv));
                } catch (const NumericalError&) {
                }
            }
            add("filter_vs_dense", h, value, tol);
        }
        const DenseOperator B = weyl_dense(ell, h, g, dop);
        const DenseOperator C = weyl_dense([&](double x, double xi) { return Gam(x, xi) * ell(x, xi); }, h, g, dop);
        const CVec Cp = C.apply(pv);
        add("lemma_left", h, rel_err(A.apply(B.apply(pv)), Cp), tol);
        add("lemma_right", h, rel_err(B.apply(A.apply(pv)), Cp), tol);
        const DenseOperator C2 = weyl_dense([&](double x, double xi) { return Gam(x, xi) * ell(x, xi) * ell(x, xi); }, h, g, dop);
        add("lemma_second", h, rel_err(A.apply(B.apply(B.apply(pv))), C2.apply(pv)), tol);

        const DenseOperator X = weyl_dense([](double x, double) { return cplx(x); }, h, g, dop);
        const DenseOperator Xi = weyl_dense([](double, double xi) { return cplx(xi); }, h, g, dop);
        const DenseOperator M = weyl_dense([h](double x, double xi) { return cplx(x * xi, 0.5 * h); }, h, g, dop);
        add("moyal_x_xi", h, rel_err(X.apply(Xi.apply(pv)), M.apply(pv)), tol);

        {
            Field u(g, 1.0 / h);
            u.values = pv;
            add("chirp_identity", h, rel_err(L_apply_chirp(u, 1.0 / h, F).values, L_apply_direct(u, 1.0 / h, F).values), 1e-10);
        }
    }
    return rep;
}

OracleReport cmd_oracle(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    OracleReport rep = run_oracle(cfg);
    const fs::path d(out_dir.empty() ? cfg.output.dir : out_dir);
    fs::create_directories(d);
    std::ofstream os(d / "oracle.csv");
    os << "# dnls oracle v1\nname,h,value,tol,pass\n";
    for (const auto& r : rep.rows)
        os << r.name << "," << g17(r.h) << "," << g17(r.value) << "," << g17(r.tol) << "," << (r.pass ? "PASS" : "FAIL") << "\n";
    return rep;
}

std::vector<int> sweep(const std::vector<ExperimentConfig>& cfgs, unsigned max_parallel) {
    std::vector<int> codes(cfgs.size(), 0);
    if (max_parallel == 0) max_parallel = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfgs.size(); i = next++) {
            try {
                if (cfgs[i].pipeline.asymptotics) {
                    const auto rep = cmd_asymptotics(cfgs[i]);
                    codes[i] = rep.profile.converged ? kExitOk : kExitNonConvergence;
                } else {
                    SolveOptions so;
                    cmd_solve(cfgs[i], so);
                    codes[i] = kExitOk;
                }
            } catch (const Error& e) {
                codes[i] = exit_code_for(e);
            } catch (const std::exception&) {
                codes[i] = 1;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(max_parallel, static_cast<unsigned>(cfgs.size()));
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return codes;
}

}  // namespace dnls
