#include "dnls/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dnls/czt.hpp"

namespace dnls {

namespace {

void require_dissipative(const ModelParams& p, const char* who) {
    if (!(p.lambda2 > 0.0) || !(p.alpha > 0.0 && p.alpha < 2.0)) {
        std::ostringstream os;
        os << who << ": needs lambda2 > 0 and 0 < alpha < 2";
        throw PreconditionError(os.str());
    }
}

void check_schedule(const std::vector<double>& t) {
    if (t.empty()) throw PreconditionError("phi_accumulate: no checkpoints");
    if (t[0] < 1.0 - 1e-12 || t[0] > 1.05)
        throw PreconditionError("phi_accumulate: first checkpoint must lie in [1, 1.05]");
    for (std::size_t m = 1; m < t.size(); ++m) {
        if (!(t[m] > t[m - 1])) throw PreconditionError("phi_accumulate: times must increase");
        if (t[m] / t[m - 1] > 1.1 * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "phi_accumulate: schedule gap " << t[m - 1] << " -> " << t[m] << " exceeds ratio 1.1";
            throw PreconditionError(os.str());
        }
    }
}

// Trapezoid of samples f_m(y) in t from 1, together with the schedule that skips
// every second node; returns (full, richardson error) per node.
void trapezoid_with_error(const std::vector<double>& t, const std::vector<RVec>& f,
                          std::vector<RVec>& full, std::vector<RVec>& err) {
    const std::size_t n = t.size();
    const std::size_t ny = f[0].size();
    full.assign(n, RVec(ny));
    err.assign(n, RVec(ny));
    for (std::size_t j = 0; j < ny; ++j) full[0][j] = (t[0] - 1.0) * f[0][j];
    std::vector<RVec> half(n, RVec(ny));
    half[0] = full[0];
    for (std::size_t m = 1; m < n; ++m) {
        const double d = t[m] - t[m - 1];
        for (std::size_t j = 0; j < ny; ++j) full[m][j] = full[m - 1][j] + 0.5 * d * (f[m - 1][j] + f[m][j]);
        if (m % 2 == 0) {
            const double d2 = t[m] - t[m - 2];
            for (std::size_t j = 0; j < ny; ++j) half[m][j] = half[m - 2][j] + 0.5 * d2 * (f[m - 2][j] + f[m][j]);
        } else {
            for (std::size_t j = 0; j < ny; ++j) half[m][j] = half[m - 1][j] + 0.5 * d * (f[m - 1][j] + f[m][j]);
        }
        for (std::size_t j = 0; j < ny; ++j) err[m][j] = std::abs(full[m][j] - half[m][j]) / 3.0;
    }
}

double max_abs(std::span<const cplx> v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

std::ptrdiff_t find_time(const std::vector<double>& t, double target) {
    for (std::size_t i = 0; i < t.size(); ++i)
        if (std::abs(t[i] - target) <= 1e-9 * target) return static_cast<std::ptrdiff_t>(i);
    return -1;
}

double sup_diff(const CVec& a, const CVec& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

// Samples of g on the y-grid evaluated at y = x_j / t for every x_j of xgrid;
// `outside` where x_j / t leaves [-Y, Y).
CVec sample_at_x_over_t(const Grid1D& ygrid, std::span<const cplx> g, const Grid1D& xgrid, double t,
                        cplx outside) {
    const std::size_t n = xgrid.size();
    CVec vals = trig_interp_uniform(ygrid, g, xgrid.x(0) / t, xgrid.dx() / t, n);
    const double Y = ygrid.half_width();
    for (std::size_t j = 0; j < n; ++j) {
        const double y = xgrid.x(j) / t;
        if (y < -Y || y >= Y) vals[j] = outside;
    }
    return vals;
}

}  // namespace

PhaseAccumulator phi_accumulate(const Grid1D& ygrid, const std::vector<double>& t,
                                const std::vector<CVec>& vlam, const ModelParams& p) {
    check_schedule(t);
    if (vlam.size() != t.size()) throw PreconditionError("phi_accumulate: size mismatch");
    const double a = p.alpha;
    std::vector<RVec> f(t.size(), RVec(ygrid.size()));
    for (std::size_t m = 0; m < t.size(); ++m) {
        if (vlam[m].size() != ygrid.size()) throw PreconditionError("phi_accumulate: grid mismatch");
        const double s = std::pow(t[m], -0.5 * a);
        for (std::size_t j = 0; j < ygrid.size(); ++j) f[m][j] = s * std::pow(std::abs(vlam[m][j]), a);
    }
    PhaseAccumulator acc;
    acc.ygrid = ygrid;
    acc.t = t;
    trapezoid_with_error(t, f, acc.phi, acc.err);
    return acc;
}

PhaseAccumulator phi_accumulate(const std::vector<ScaledCheckpoint>& cks, const ModelParams& p) {
    if (cks.empty()) throw PreconditionError("phi_accumulate: no checkpoints");
    std::vector<double> t;
    std::vector<CVec> v;
    for (const auto& c : cks) {
        if (!(c.vlam.ygrid == cks[0].vlam.ygrid)) throw PreconditionError("phi_accumulate: grid mismatch");
        t.push_back(c.t);
        v.push_back(c.vlam.values);
    }
    return phi_accumulate(cks[0].vlam.ygrid, t, v, p);
}

CVec z_of(const ScaledField& vlam, std::span<const double> phi, const SymbolF& F, const ModelParams& p) {
    if (phi.size() != vlam.values.size()) throw PreconditionError("z_of: grid mismatch");
    const double t = vlam.t;
    CVec z(phi.size());
    double worst = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        if (p.lambda2 * phi[j] > 700.0) {
            std::ostringstream os;
            os << "z_of: lambda2 Phi = " << p.lambda2 * phi[j] << " > 700 at y = " << vlam.ygrid.x(j)
               << "; rescale the amplitude or shorten the run";
            throw NumericalError(os.str(), t);
        }
        const double y = vlam.ygrid.x(j);
        const double ph = -std::fmod(F.w(y) * t, 2.0 * kPi) - p.lambda1 * phi[j];
        const double g = std::exp(p.lambda2 * phi[j]);
        z[j] = vlam.values[j] * std::polar(g, ph);
        const double ref = std::abs(vlam.values[j]) * g;
        if (ref > 0.0) worst = std::max(worst, std::abs(std::abs(z[j]) - ref) / ref);
    }
    if (worst > 1e-12) {
        std::ostringstream os;
        os << "z_of: modulus identity off by " << worst;
        throw NumericalError(os.str(), t);
    }
    return z;
}

AsymptoticProfile extract_zplus(const Grid1D& ygrid, const std::vector<double>& t,
                                const std::vector<CVec>& z, double t_min) {
    if (t.size() != z.size() || t.empty()) throw PreconditionError("extract_zplus: empty or mismatched series");
    const auto n_late = std::count_if(t.begin(), t.end(), [&](double s) { return s >= t_min * (1.0 - 1e-12); });
    if (n_late < 10) throw PreconditionError("extract_zplus: fewer than 10 checkpoints with t >= t_min");

    AsymptoticProfile prof;
    prof.ygrid = ygrid;
    prof.zplus = z.back();
    prof.T_max = t.back();
    prof.psi_plus.assign(ygrid.size(), 0.0);

    double zmax = 0.0;
    for (const auto& zz : z) zmax = std::max(zmax, max_abs(zz));
    const double floor = 1e-13 * std::max(zmax, std::numeric_limits<double>::min());

    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_min * (1.0 - 1e-12)) continue;
        const auto j = find_time(t, 2.0 * t[i]);
        if (j < 0) continue;
        prof.dyads.push_back({t[i], t[j], sup_diff(z[j], z[i])});
    }

    for (std::size_t e = t.size(); e-- > 0;) {
        const auto a = find_time(t, t[e] / 2.0), b = find_time(t, t[e] / 4.0), c = find_time(t, t[e] / 8.0);
        if (a < 0 || b < 0 || c < 0) continue;
        prof.final_dyads = {{t[c], t[b], sup_diff(z[b], z[c])},
                            {t[b], t[a], sup_diff(z[a], z[b])},
                            {t[a], t[e], sup_diff(z[e], z[a])}};
        break;
    }

    std::vector<double> ft, fd;
    for (const auto& d : prof.dyads)
        if (d.diff > floor) {
            ft.push_back(d.t1);
            fd.push_back(d.diff);
        }
    if (ft.size() >= 2) {
        const SlopeFit fit = loglog_fit(ft, fd);
        prof.kappa_est = -fit.slope;
        prof.fit_t_lo = ft.front();
        prof.fit_t_hi = ft.back();
    }

    if (prof.final_dyads.empty()) {
        prof.verdict = "not converged: no dyadic chain t/8, t/4, t/2, t in the schedule";
        return prof;
    }
    const auto& fd3 = prof.final_dyads;
    const bool at_floor = std::all_of(fd3.begin(), fd3.end(), [&](const Dyad& d) { return d.diff <= floor; });
    const bool decreasing = fd3[0].diff > fd3[1].diff && fd3[1].diff > fd3[2].diff;
    prof.converged = at_floor || decreasing;
    if (prof.converged) {
        prof.verdict = "converged";
    } else {
        std::ostringstream os;
        os << "not converged: Cauchy differences " << fd3[0].diff << ", " << fd3[1].diff << ", " << fd3[2].diff;
        prof.verdict = os.str();
    }
    return prof;
}

PsiPlus psi_plus(const PhaseAccumulator& phi, const std::vector<CVec>& z, const AsymptoticProfile& prof,
                 const ModelParams& p, double threshold) {
    require_dissipative(p, "psi_plus");
    if (!prof.converged) throw PreconditionError("psi_plus: profile not converged");
    if (z.size() != phi.t.size() || z.empty()) throw PreconditionError("psi_plus: series mismatch");
    const std::size_t n = z.size(), ny = prof.zplus.size();
    const double a = p.alpha, al = p.alpha * p.lambda2;
    const double T = phi.t.back();

    RVec zpa(ny);
    for (std::size_t j = 0; j < ny; ++j) zpa[j] = std::pow(std::abs(prof.zplus[j]), a);
    std::vector<RVec> g(n, RVec(ny));
    for (std::size_t m = 0; m < n; ++m) {
        const double s = al * std::pow(phi.t[m], -0.5 * a);
        for (std::size_t j = 0; j < ny; ++j) g[m][j] = s * (std::pow(std::abs(z[m][j]), a) - zpa[j]);
    }
    std::vector<RVec> sec, sec_err;
    trapezoid_with_error(phi.t, g, sec, sec_err);

    const RVec K = K_of(T, prof.zplus, p);
    PsiPlus out;
    out.primary.resize(ny);
    out.secondary = sec.back();
    out.budget.resize(ny);
    const auto mask = support_mask(prof.zplus, threshold);
    for (std::size_t j = 0; j < ny; ++j) {
        const double x = al * phi.phi.back()[j];
        const double e = std::exp(x);
        out.primary[j] = K[j] * std::expm1(x - std::log(K[j]));
        out.budget[j] = al * e * phi.err.back()[j] + sec_err.back()[j] + 1e-12 * (e + K[j]);
        if (!mask[j]) continue;
        const double disc = std::abs(out.primary[j] - out.secondary[j]);
        out.max_discrepancy = std::max(out.max_discrepancy, disc);
        out.max_ratio = std::max(out.max_ratio, disc / out.budget[j]);
    }
    out.agree = out.max_ratio <= 1.0;

    // Tail beyond T assuming |z(s) - z_+| decays like the last dyad difference times (s/T)^{-kappa}.
    if (!prof.final_dyads.empty()) {
        const double d = prof.final_dyads.back().diff;
        const double zmax = max_abs(prof.zplus);
        const double q = prof.kappa_est + 0.5 * a - 1.0;
        out.truncation = q > 0.0 ? al * a * std::pow(zmax, a - 1.0) * d * std::pow(T, 1.0 - 0.5 * a) / q
                                 : std::numeric_limits<double>::infinity();
    }
    if (out.max_ratio > 10.0) {
        std::ostringstream os;
        os << "psi_plus: estimators differ by " << out.max_ratio << "x the quadrature budget";
        throw NonConvergence(os.str());
    }
    return out;
}

RVec K_of(double t, std::span<const cplx> zplus, const ModelParams& p) {
    require_dissipative(p, "K_of");
    const double a = p.alpha;
    const double c = 2.0 * a * p.lambda2 / (2.0 - a) * (std::pow(t, 1.0 - 0.5 * a) - 1.0);
    RVec K(zplus.size());
    for (std::size_t j = 0; j < K.size(); ++j) K[j] = 1.0 + c * std::pow(std::abs(zplus[j]), a);
    return K;
}

RVec S_of(double t, std::span<const cplx> zplus, std::span<const double> psi, const ModelParams& p,
          const Grid1D* ygrid) {
    if (psi.size() != zplus.size()) throw PreconditionError("S_of: size mismatch");
    const RVec K = K_of(t, zplus, p);
    RVec S(K.size());
    for (std::size_t j = 0; j < K.size(); ++j) {
        const double s = K[j] + psi[j];
        if (!(s > 0.0)) {
            std::ostringstream os;
            os << "S_of: K + psi_+ = " << s << " <= 0 at ";
            if (ygrid) os << "y = " << ygrid->x(j);
            else os << "index " << j;
            throw PreconditionError(os.str());
        }
        S[j] = std::log(s) / (p.alpha * p.lambda2);
    }
    return S;
}

CVec modification_factor(double t, std::span<const cplx> zplus, std::span<const double> psi,
                         const ModelParams& p, const Grid1D* ygrid) {
    const RVec S = S_of(t, zplus, psi, p, ygrid);
    const RVec K = K_of(t, zplus, p);
    const cplx lam(p.lambda1, p.lambda2);
    CVec mf(S.size());
    for (std::size_t j = 0; j < S.size(); ++j) {
        mf[j] = std::polar(std::pow(K[j] + psi[j], -1.0 / p.alpha), p.lambda1 * S[j]);
        const cplx direct = std::exp(cplx(0.0, 1.0) * lam * S[j]);
        if (std::abs(mf[j] - direct) > 1e-12 * std::abs(direct)) {
            std::ostringstream os;
            os << "modification_factor: identity off by " << std::abs(mf[j] - direct) / std::abs(direct);
            throw NumericalError(os.str(), t);
        }
    }
    return mf;
}

std::vector<bool> support_mask(std::span<const cplx> zplus, double threshold) {
    const double m = threshold * max_abs(zplus);
    std::vector<bool> mask(zplus.size());
    for (std::size_t j = 0; j < zplus.size(); ++j) mask[j] = std::abs(zplus[j]) >= m;
    return mask;
}

Field profile_model(const Grid1D& xgrid, double t, const AsymptoticProfile& prof, const SymbolF& F,
                    const ModelParams& p) {
    const CVec mf = modification_factor(t, prof.zplus, prof.psi_plus, p, &prof.ygrid);
    CVec g(mf.size());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = mf[j] * prof.zplus[j];
    const CVec gx = sample_at_x_over_t(prof.ygrid, g, xgrid, t, cplx(0.0));
    Field out(xgrid, t);
    const double s = 1.0 / std::sqrt(t);
    for (std::size_t j = 0; j < xgrid.size(); ++j) {
        const double y = xgrid.x(j) / t;
        out.values[j] = s * std::polar(1.0, std::fmod(F.w(y) * t, 2.0 * kPi)) * gx[j];
    }
    return out;
}

ProfileResidual profile_residuals(const Field& u, const AsymptoticProfile& prof, const SymbolF& F,
                                  const ModelParams& p, double coverage_tol) {
    const double t = u.t;
    const double reach = t * prof.ygrid.half_width();
    double total = 0.0, outside = 0.0;
    for (std::size_t j = 0; j < u.grid.size(); ++j) {
        const double m = std::norm(u.values[j]);
        total += m;
        if (std::abs(u.grid.x(j)) >= reach) outside += m;
    }
    if (total > 0.0 && outside > coverage_tol * total) {
        std::ostringstream os;
        os << "profile_residuals: " << outside / total << " of the mass lies outside |x| < t Y = " << reach;
        throw PreconditionError(os.str());
    }
    const Field model = profile_model(u.grid, t, prof, F, p);
    CVec d(u.values.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = u.values[j] - model.values[j];
    const Norms n = norms(d, u.grid.dx());
    return {n.linf, n.l2};
}

Field u_plus(const CVec& zplus, const Grid1D& ygrid, const SymbolF& F, const Grid1D& xgrid) {
    if (zplus.size() != ygrid.size()) throw PreconditionError("u_plus: z_+ does not match the y-grid");
    const double c2 = F.c2;
    const double band = (ygrid.half_width() + std::abs(F.c1)) / (2.0 * c2);
    if (band > kPi / xgrid.dx()) {
        std::ostringstream os;
        os << "u_plus: x-grid spacing " << xgrid.dx() << " does not resolve frequencies up to " << band;
        throw PreconditionError(os.str());
    }
    if (xgrid.half_width() / (2.0 * c2) > kPi / ygrid.dx()) {
        std::ostringstream os;
        os << "u_plus: x extent " << xgrid.half_width() << " aliases the y-grid (need L <= 2 c2 pi / dy)";
        throw PreconditionError(os.str());
    }
    const CVec s = dft_uniform(ygrid, zplus, xgrid.x(0) / (2.0 * c2), xgrid.dx() / (2.0 * c2), xgrid.size());
    const cplx pre = std::polar(ygrid.dx() / std::sqrt(4.0 * kPi * c2), -0.25 * kPi);
    Field out(xgrid, 0.0);
    for (std::size_t j = 0; j < xgrid.size(); ++j)
        out.values[j] = pre * std::polar(1.0, -F.c1 * xgrid.x(j) / (2.0 * c2)) * s[j];
    return out;
}

double scattering_residual(const Field& u, const AsymptoticProfile& prof, const Field& uplus,
                           const SymbolF& F, const ModelParams& p) {
    if (!(u.grid == uplus.grid)) throw PreconditionError("scattering_residual: grid mismatch");
    const double t = u.t;
    const Field free = linear_step(uplus, t, F);
    const CVec mf = modification_factor(t, prof.zplus, prof.psi_plus, p, &prof.ygrid);
    const CVec mx = sample_at_x_over_t(prof.ygrid, mf, u.grid, t, cplx(1.0));
    CVec d(u.values.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = u.values[j] - mx[j] * free.values[j];
    return norms(d, u.grid.dx()).l2;
}

double universal_limit_target(const ModelParams& p) {
    require_dissipative(p, "universal_limit_target");
    return std::pow((2.0 - p.alpha) / (2.0 * p.alpha * p.lambda2), 1.0 / p.alpha);
}

double alpha_zero() { return (5.0 + std::sqrt(89.0)) / 8.0; }

LimitProbe universal_limit_probe(const std::vector<std::pair<double, double>>& linf_series,
                                 const ModelParams& p, double tol) {
    LimitProbe out;
    out.tol = tol;
    out.target = universal_limit_target(p);
    out.alpha0 = alpha_zero();
    out.alpha_in_range = p.alpha > out.alpha0 && p.alpha < 2.0;
    for (const auto& [t, linf] : linf_series)
        if (t > 0.0) out.series.emplace_back(t, std::pow(t, 1.0 / p.alpha) * linf);
    if (out.series.empty()) return out;
    const double T = out.series.back().first;
    out.final_value = out.series.back().second;
    out.final_rel_err = std::abs(out.final_value - out.target) / out.target;
    out.monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [t, v] : out.series) {
        if (t < T / 10.0 * (1.0 - 1e-12)) continue;
        const double e = std::abs(v - out.target);
        out.max_rel_err_final_decade = std::max(out.max_rel_err_final_decade, e / out.target);
        if (e > prev * (1.0 + 1e-12)) out.monotone = false;
        prev = e;
    }
    out.within_tol = out.max_rel_err_final_decade <= tol;
    return out;
}

LimitProbe universal_limit_probe(const Trajectory& traj, double tol) {
    std::vector<std::pair<double, double>> s;
    for (const auto& c : traj.checkpoints) s.emplace_back(c.t, c.norms.linf);
    return universal_limit_probe(s, traj.params, tol);
}

double probe_agreement(const LimitProbe& a, const LimitProbe& b) {
    const double m = 0.5 * (a.final_value + b.final_value);
    return m > 0.0 ? std::abs(a.final_value - b.final_value) / m : 0.0;
}

ScaledField ode_reference(const ScaledField& v0, double t, const ModelParams& p, const SymbolF& F) {
    ScaledField out(v0.ygrid, t);
    for (std::size_t j = 0; j < v0.values.size(); ++j)
        out.values[j] = ode_flow(v0.values[j], v0.ygrid.x(j), v0.t, t, p, F);
    return out;
}

}  // namespace dnls
