#include "dnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dnls/fft.hpp"

namespace dnls {

void StepConfig::validate() const {
    auto bad_dt = [](double d) { return !(d > 0.0) || d > 0.5; };
    if (bad_dt(dt)) throw ConfigError("time: dt must lie in (0, 0.5]");
    for (const auto& s : schedule)
        if (bad_dt(s.dt)) throw ConfigError("time: schedule dt must lie in (0, 0.5]");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i].t_start > schedule[i - 1].t_start))
            throw ConfigError("time: schedule must be sorted by strictly increasing t_start");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("time: t_max must be positive");
    if (!(checkpoint_ratio > 1.0 && checkpoint_ratio <= 2.0))
        throw ConfigError("time: checkpoint_ratio must lie in (1, 2]");
    if (!(boundary_budget >= 0.0)) throw ConfigError("time: boundary_budget must be >= 0");
    if (!(sponge_strength >= 0.0)) throw ConfigError("time: sponge_strength must be >= 0");
}

double StepConfig::dt_at(double t) const {
    double d = dt;
    for (const auto& s : schedule) {
        if (t + 1e-12 * std::max(1.0, std::abs(t)) >= s.t_start)
            d = s.dt;
        else
            break;
    }
    return d;
}

namespace {

class Stepper {
public:
    Stepper(const Grid1D& g, const SymbolF& F, const ModelParams& p)
        : g_(g), F_(F), p_(p), plan_(fft_plan(g.size())) {}

    void linear(CVec& u, double dt) {
        if (dt != mult_dt_) {
            mult_.resize(g_.size());
            const double inv = 1.0 / static_cast<double>(g_.size());
            for (std::size_t j = 0; j < g_.size(); ++j)
                mult_[j] = std::polar(inv, std::fmod(F_.F(g_.k(j)) * dt, 2.0 * kPi));
            mult_dt_ = dt;
        }
        plan_.forward(u);
        for (std::size_t j = 0; j < u.size(); ++j) u[j] *= mult_[j];
        plan_.inverse(u);
    }

    // Applies the exact nonlinear flow over dt; returns sum |u|^{a+2} dx of the input.
    double nonlinear(CVec& u, double dt) const {
        const double a = p_.alpha, l1 = p_.lambda1, l2 = p_.lambda2;
        const double half_a = 0.5 * a;
        const double c = a * l2 * dt;
        double acc = 0.0;
        for (auto& z : u) {
            const double a2 = std::norm(z);
            if (a2 == 0.0) continue;
            const double Aa = std::exp(half_a * std::log(a2));
            acc += Aa * a2;
            double ratio = 1.0, dth = 0.0;
            if (l2 > 0.0) {
                const double lg = std::log1p(c * Aa);
                ratio = std::exp(-lg / a);
                dth = l1 / (a * l2) * lg;
            } else {
                dth = l1 * Aa * dt;
            }
            z *= (dth == 0.0) ? cplx(ratio, 0.0) : std::polar(ratio, dth);
        }
        return acc * g_.dx();
    }

private:
    Grid1D g_;
    SymbolF F_;
    ModelParams p_;
    const FftPlan& plan_;
    CVec mult_;
    double mult_dt_ = -1.0;
};

double mass_of(const CVec& u, double dx) {
    double s = 0.0;
    for (const auto& z : u) s += std::norm(z);
    return s * dx;
}

// Mass in |x| > 0.9 L and total mass.
std::pair<double, double> boundary_mass(const CVec& u, const Grid1D& g) {
    double outer = 0.0, total = 0.0;
    const double cut = 0.9 * g.half_width();
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double e = std::norm(u[j]);
        total += e;
        if (std::abs(g.x(j)) > cut) outer += e;
    }
    return {outer * g.dx(), total * g.dx()};
}

void check_params(const ModelParams& p, bool test_mode) {
    if (validate_params(p) != Dissipativity::Invalid) return;
    if (test_mode && p.lambda2 == 0.0 && p.alpha > 0.0 && p.alpha < 2.0) return;
    std::ostringstream os;
    os << "model parameters invalid (alpha=" << p.alpha << ", lambda=(" << p.lambda1 << ", "
       << p.lambda2 << "))";
    throw ConfigError(os.str());
}

}  // namespace

Field linear_step(const Field& u, double dt, const SymbolF& F) {
    Field out = u;
    Stepper st(u.grid, F, ModelParams{});
    st.linear(out.values, dt);
    out.t = u.t + dt;
    return out;
}

Field nonlinear_step_exact(const Field& u, double dt, const ModelParams& p) {
    if (p.lambda2 < 0.0) throw PreconditionError("nonlinear_step_exact: lambda2 must be >= 0");
    if (dt < 0.0) throw PreconditionError("nonlinear_step_exact: dt must be >= 0");
    Field out = u;
    Stepper st(u.grid, SymbolF{}, p);
    st.nonlinear(out.values, dt);
    out.t = u.t + dt;
    return out;
}

std::vector<double> checkpoint_times(double t0, const StepConfig& cfg) {
    std::vector<double> times;
    for (int m = 0;; ++m) {
        const double tm = std::pow(cfg.checkpoint_ratio, m);
        if (tm > cfg.t_max * (1.0 + 1e-12)) break;
        if (tm > t0 * (1.0 + 1e-12)) times.push_back(tm);
    }
    for (double e : cfg.extra_checkpoints)
        if (e > t0 && e <= cfg.t_max) times.push_back(e);
    if (cfg.t_max > t0) times.push_back(cfg.t_max);
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    for (double tm : times)
        if (out.empty() || tm > out.back() * (1.0 + 1e-12)) out.push_back(tm);
        else out.back() = std::max(out.back(), tm);
    return out;
}

double recommended_half_width(const Field& u0, double t_max, const SymbolF& F) {
    const double k99 = energy_bandwidth(u0, 0.999);
    return 1.5 * t_max * (2.0 * F.c2 * k99 + std::abs(F.c1));
}

Trajectory strang_evolve(const Field& u0, const StepConfig& cfg, const ModelParams& p,
                         const SymbolF& F, const EvolveOptions& opt) {
    cfg.validate();
    F.validate();
    check_params(p, opt.test_mode);
    if (u0.values.size() != u0.grid.size()) throw PreconditionError("evolve: field size mismatch");
    if (!all_finite(u0.values)) throw NumericalError("evolve: initial data not finite", u0.t);
    if (!(cfg.t_max > u0.t)) throw ConfigError("time: t_max must exceed the start time");

    const Grid1D& g = u0.grid;
    const bool resumed = opt.resume_initial_mass >= 0.0;

    Trajectory traj;
    traj.params = p;
    traj.symbol = F;
    traj.grid = g;
    if (!resumed) {
        traj.x_norm0 = weighted_l2(u0, 1);
        const double Lrec = recommended_half_width(u0, cfg.t_max, F);
        if (g.half_width() < Lrec) {
            std::ostringstream os;
            os << "box half-width " << g.half_width() << " is below the sizing heuristic " << Lrec
               << " for t_max=" << cfg.t_max;
            traj.warnings.push_back(os.str());
        }
    }

    CVec u = u0.values;
    double t = u0.t;
    const double dx = g.dx();
    DissipationLedger& ledger = traj.ledger;
    ledger.initial_mass = resumed ? opt.resume_initial_mass : mass_of(u, dx);
    ledger.cumulative_dissipation = resumed ? opt.resume_dissipation : 0.0;

    Stepper st(g, F, p);
    const double two_l2 = 2.0 * p.lambda2;

    RVec sponge;
    double sponge_dt = -1.0;
    CVec sponge_mask;
    if (cfg.sponge_strength > 0.0) {
        sponge.resize(g.size());
        const double cut = 0.9 * g.half_width();
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double s = std::clamp((std::abs(g.x(j)) - cut) / (0.1 * g.half_width()), 0.0, 1.0);
            sponge[j] = s * s;
        }
    }

    auto record = [&](double time, double dissipation) {
        Checkpoint ck;
        ck.t = time;
        ck.norms = norms(std::span<const cplx>(u), dx);
        const double mass = ck.norms.l2 * ck.norms.l2;
        LedgerEntry le{time, mass, dissipation, 0.0};
        le.defect = ledger.initial_mass > 0.0
                        ? std::abs(mass + dissipation - ledger.initial_mass) / ledger.initial_mass
                        : std::abs(mass + dissipation);
        ledger.series.push_back(le);
        ck.u = Field(g, time);
        ck.u.values = u;
        if (opt.on_checkpoint) opt.on_checkpoint(ck, ledger);
        if (!opt.keep_fields) ck.u.values.clear();
        traj.checkpoints.push_back(std::move(ck));
    };

    if (!resumed) record(t, 0.0);

    double f_prev = 0.0, dt_prev = 0.0;
    const auto stops = checkpoint_times(t, cfg);
    for (double stop : stops) {
        while (t < stop) {
            double h = cfg.dt_at(t);
            const double rem = stop - t;
            if (rem <= h * (1.0 + 1e-9)) h = rem;

            const double f_n = two_l2 * st.nonlinear(u, 0.5 * h);
            if (dt_prev > 0.0) ledger.cumulative_dissipation += 0.5 * dt_prev * (f_prev + f_n);
            f_prev = f_n;
            dt_prev = h;
            st.linear(u, h);
            st.nonlinear(u, 0.5 * h);

            if (!sponge.empty()) {
                if (h != sponge_dt) {
                    sponge_mask.resize(g.size());
                    for (std::size_t j = 0; j < g.size(); ++j)
                        sponge_mask[j] = std::exp(-cfg.sponge_strength * h * sponge[j]);
                    sponge_dt = h;
                }
                for (std::size_t j = 0; j < g.size(); ++j) u[j] *= sponge_mask[j];
            }

            t = (h == rem) ? stop : t + h;
            ++traj.steps;

            const auto [outer, total] = boundary_mass(u, g);
            if (!std::isfinite(total)) throw NumericalError("evolve: non-finite values", t);
            if (sponge.empty() && total > 0.0 && outer / total > cfg.boundary_budget) {
                std::ostringstream os;
                os << "boundary monitor: mass fraction " << outer / total
                   << " in the outer 10% exceeds budget " << cfg.boundary_budget << " at t=" << t
                   << "; enlarge the box half-width";
                throw BoundaryTrip(os.str(), t, outer / total);
            }
            if (opt.on_step) opt.on_step(StepInfo{t, h, total});
        }
        if (!all_finite(u)) throw NumericalError("evolve: non-finite values at checkpoint", t);
        double dissipation = ledger.cumulative_dissipation;
        if (dt_prev > 0.0) {
            const double f_now = two_l2 * lp_power(u, dx, p.alpha + 2.0);
            dissipation += 0.5 * dt_prev * (f_prev + f_now);
        }
        record(t, dissipation);
    }
    return traj;
}

std::vector<LedgerEntry> ledger_defect(const Trajectory& traj) {
    if (traj.ledger.series.empty()) throw PreconditionError("ledger_defect: empty trajectory");
    return traj.ledger.series;
}

namespace {
constexpr char kCkMagic[8] = {'D', 'N', 'L', 'S', 'C', 'K', 'P', '1'};
}

void write_checkpoint(const std::string& path, const CheckpointFile& ck) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("checkpoint: cannot open " + path + " for writing");
    const std::uint64_t n = ck.u.grid.size();
    const double head[10] = {ck.u.grid.half_width(), ck.u.t,         ck.params.alpha,
                             ck.params.lambda1,      ck.params.lambda2, ck.symbol.c2,
                             ck.symbol.c1,           ck.symbol.c0,      ck.initial_mass,
                             ck.cumulative_dissipation};
    os.write(kCkMagic, sizeof kCkMagic);
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(head), sizeof head);
    os.write(reinterpret_cast<const char*>(ck.u.values.data()),
             static_cast<std::streamsize>(n * sizeof(cplx)));
    if (!os) throw ConfigError("checkpoint: write failed for " + path);
}

CheckpointFile read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("checkpoint: cannot open " + path);
    char magic[8] = {};
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kCkMagic, sizeof kCkMagic) != 0)
        throw ConfigError("checkpoint: bad magic in " + path);
    std::uint64_t n = 0;
    double head[10] = {};
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    is.read(reinterpret_cast<char*>(head), sizeof head);
    if (!is) throw ConfigError("checkpoint: truncated header in " + path);
    CheckpointFile ck;
    ck.u = Field(Grid1D(static_cast<std::size_t>(n), head[0]), head[1]);
    ck.params = ModelParams{head[2], head[3], head[4]};
    ck.symbol = SymbolF{head[5], head[6], head[7]};
    ck.initial_mass = head[8];
    ck.cumulative_dissipation = head[9];
    is.read(reinterpret_cast<char*>(ck.u.values.data()),
            static_cast<std::streamsize>(n * sizeof(cplx)));
    if (!is) throw ConfigError("checkpoint: shape mismatch in " + path);
    return ck;
}

}  // namespace dnls
