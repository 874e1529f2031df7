#include "dnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dnls {

namespace {

double vf_phase(double x, double t, const SymbolF& F) {
    return (x * x + 2.0 * F.c1 * t * x) / (4.0 * F.c2 * t);
}

double rel_l2_diff(const CVec& a, const CVec& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num += std::norm(a[j] - b[j]);
        den += std::norm(a[j]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

bool vf_chirp_resolved(const Field& u, double t, const SymbolF& F, double margin) {
    if (!(t > 0.0)) return false;
    double umax = 0.0;
    for (const auto& z : u.values) umax = std::max(umax, std::abs(z));
    if (umax == 0.0) return true;
    const double thr = 1e-12 * umax;
    const Grid1D& g = u.grid;
    for (std::size_t j = 0; j + 1 < g.size(); ++j) {
        if (std::abs(u.values[j]) <= thr && std::abs(u.values[j + 1]) <= thr) continue;
        const double inc = std::abs(vf_phase(g.x(j + 1), t, F) - vf_phase(g.x(j), t, F));
        if (inc >= margin * kPi) return false;
    }
    return true;
}

Field L_apply_direct(const Field& u, double t, const SymbolF& F) {
    const Grid1D& g = u.grid;
    const CVec d = apply_D(g, u.values);
    Field out(g, u.t);
    for (std::size_t j = 0; j < g.size(); ++j)
        out.values[j] = (g.x(j) + F.c1 * t) * u.values[j] + 2.0 * F.c2 * t * d[j];
    return out;
}

Field L_apply_chirp(const Field& u, double t, const SymbolF& F) {
    if (!(t > 0.0)) throw PreconditionError("L_apply: chirp form needs t > 0");
    const Grid1D& g = u.grid;
    const std::size_t n = g.size();
    CVec chirp(n), w(n);
    for (std::size_t j = 0; j < n; ++j) {
        chirp[j] = std::polar(1.0, std::fmod(vf_phase(g.x(j), t, F), 2.0 * kPi));
        w[j] = chirp[j] * u.values[j];
    }
    const CVec d = apply_D(g, w);
    Field out(g, u.t);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = 2.0 * F.c2 * t * std::conj(chirp[j]) * d[j];
    return out;
}

Field L_apply(const Field& u, double t, const SymbolF& F, VfForm form, FormCheck* check, double tol) {
    if (t < 0.0) throw PreconditionError("L_apply: t must be >= 0");
    const bool resolved = t > 0.0 && vf_chirp_resolved(u, t, F, 0.5);
    bool use_chirp = false;
    switch (form) {
        case VfForm::Direct: use_chirp = false; break;
        case VfForm::Chirp: use_chirp = true; break;
        case VfForm::Auto: use_chirp = t >= 1.0 && resolved; break;
    }
    Field out = use_chirp ? L_apply_chirp(u, t, F) : L_apply_direct(u, t, F);
    if (check) {
        *check = FormCheck{};
        if (resolved) {
            const Field alt = use_chirp ? L_apply_direct(u, t, F) : L_apply_chirp(u, t, F);
            check->performed = true;
            check->rel_diff = rel_l2_diff(out.values, alt.values);
            if (check->rel_diff > tol) {
                std::ostringstream os;
                os << "L_apply: direct and chirp forms differ by " << check->rel_diff << " at t=" << t;
                throw NumericalError(os.str(), t);
            }
        }
    }
    return out;
}

GnRatios gn_ratios(const Field& u, double t, const SymbolF& F) {
    if (t < 1.0) throw PreconditionError("gn_ratios: t must be >= 1");
    const Norms n0 = norms(u);
    if (n0.l2 == 0.0) throw PreconditionError("gn_ratios: zero field");
    const Field Lu = L_apply(u, t, F);
    const Field L2u = L_apply(Lu, t, F);
    const double Ln = norms(Lu).l2;
    const double L2n = norms(L2u).l2;
    if (Ln == 0.0 || L2n == 0.0) throw PreconditionError("gn_ratios: vanishing vector-field norm");
    GnRatios r;
    r.r1 = n0.linf / (std::sqrt(n0.l2 * Ln / t));
    r.r4 = lp_norm(Lu.values, u.grid.dx(), 4.0) / std::sqrt(n0.linf * L2n);
    return r;
}

VFRow vf_row(const Field& u, const SymbolF& F) {
    VFRow row;
    row.t = u.t;
    const Norms n0 = norms(u);
    row.l2 = n0.l2;
    row.linf = n0.linf;
    const Field Lu = L_apply(u, u.t, F);
    const Field L2u = L_apply(Lu, u.t, F);
    row.Lnorm = norms(Lu).l2;
    row.L2norm = norms(L2u).l2;
    if (row.L2norm > 0.0 && row.linf > 0.0)
        row.r4 = lp_norm(Lu.values, u.grid.dx(), 4.0) / std::sqrt(row.linf * row.L2norm);
    if (u.t >= 1.0 && row.l2 > 0.0 && row.Lnorm > 0.0)
        row.r1 = row.linf / std::sqrt(row.l2 * row.Lnorm / u.t);
    return row;
}

VFReport vf_report(const Trajectory& traj) {
    VFReport rep;
    for (const auto& ck : traj.checkpoints) {
        if (ck.u.values.empty()) throw PreconditionError("vf_report: trajectory has no stored fields");
        rep.rows.push_back(vf_row(ck.u, traj.symbol));
    }
    return rep;
}

MonotonicityVerdict vf_monotonicity(const VFReport& rep, double x_norm0, const ModelParams& p,
                                    double tol) {
    MonotonicityVerdict v;
    v.x_norm0 = x_norm0;
    v.tol = tol;
    v.asserted = validate_params(p) == Dissipativity::StrictlyDissipative;
    v.max_violation = -1.0;
    for (const auto& r : rep.rows) {
        v.series.emplace_back(r.t, r.Lnorm);
        const double viol = x_norm0 > 0.0 ? r.Lnorm / x_norm0 - 1.0 : (r.Lnorm > 0.0 ? 1.0 : -1.0);
        v.max_violation = std::max(v.max_violation, viol);
    }
    if (x_norm0 == 0.0 && v.max_violation < 0.0) v.max_violation = 0.0;
    v.passed = v.max_violation <= tol;
    return v;
}

GrowthVerdict vf_growth_L2sq(const VFReport& rep, const ModelParams& p) {
    if (p.alpha < 1.0) throw PreconditionError("vf_growth_L2sq: needs alpha >= 1");
    if (rep.rows.empty()) throw PreconditionError("vf_growth_L2sq: empty report");
    GrowthVerdict v;
    v.bound = 2.0 - p.alpha + 0.15;
    const double T = rep.rows.back().t;
    std::vector<double> t, y;
    for (const auto& r : rep.rows)
        if (r.t >= T / 10.0 * (1.0 - 1e-12)) {
            t.push_back(r.t);
            y.push_back(r.L2norm);
        }
    if (t.size() < 8)
        throw PreconditionError("vf_growth_L2sq: fewer than 8 checkpoints in the last decade");
    if (std::all_of(y.begin(), y.end(), [](double a) { return a == 0.0; })) {
        v.degenerate = true;
        return v;
    }
    v.fit = loglog_fit(t, y);
    v.passed = v.fit.slope <= v.bound;
    return v;
}

}  // namespace dnls
