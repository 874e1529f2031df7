#include "dnls/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnls/czt.hpp"
#include "dnls/fft.hpp"

namespace dnls {

ScaledField to_v_frame(const Field& u, const Grid1D& ygrid, FrameInfo* info, double tail_threshold) {
    const double t = u.t;
    if (t < 1.0) throw PreconditionError("to_v_frame: needs t >= 1");
    const double Y = ygrid.half_width();
    if (t * Y > u.grid.half_width() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "to_v_frame: t*Y = " << t * Y << " exceeds the box half-width " << u.grid.half_width();
        throw PreconditionError(os.str());
    }
    CVec uhat = u.values;
    fft_plan(u.grid.size()).forward(uhat);
    const double tail = spectral_tail_fraction(u.grid, uhat);
    if (info) {
        info->tail_fraction = tail;
        info->tail_warning = tail > tail_threshold;
    }
    CVec vals = trig_interp_uniform_hat(u.grid, uhat, t * ygrid.x(0), t * ygrid.dx(), ygrid.size());
    ScaledField v(ygrid, t);
    const double s = std::sqrt(t);
    for (std::size_t j = 0; j < vals.size(); ++j) v.values[j] = s * vals[j];
    return v;
}

Grid1D make_ygrid(double Y, double t_max, const SymbolF& F) {
    // increment ~ t_max (Y + |c1|) dy / (2 c2) <= pi/2
    const double ymax = Y + std::abs(F.c1);
    const double dy_max = kPi * F.c2 / (t_max * ymax);
    const auto n = next_pow2(static_cast<std::size_t>(std::ceil(2.0 * Y / dy_max)));
    return Grid1D(std::max<std::size_t>(n, 64), Y);
}

ScaledCheckpoint split_v(const ScaledField& v, const SymbolF& F, const CutoffSpec& g,
                         const FilterOptions& opt) {
    ScaledCheckpoint ck;
    ck.t = v.t;
    ck.v = v;
    ck.vlam = filter_fast(v, v.h(), F, g, opt);
    ck.vlamc = ScaledField(v.ygrid, v.t);
    for (std::size_t j = 0; j < v.values.size(); ++j) ck.vlamc.values[j] = v.values[j] - ck.vlam.values[j];
    ck.nv = norms(ck.v);
    ck.nlam = norms(ck.vlam);
    ck.nlamc = norms(ck.vlamc);
    return ck;
}

namespace {

// Amplitude ratio |v(t)| / |v(t0)| and the accumulated phase integral for the reduced ODE.
std::pair<double, double> ode_amplitude(double a0, double t0, double t, const ModelParams& p) {
    if (a0 == 0.0) return {1.0, 0.0};
    const double a = p.alpha;
    const double K = 2.0 * a * p.lambda2 / (2.0 - a);
    const double e = 1.0 - 0.5 * a;
    const double arg = std::pow(a0, a) * K * (std::pow(t, e) - std::pow(t0, e));
    const double lg = std::log1p(arg);
    return {std::exp(-lg / a), lg / (a * p.lambda2)};
}

cplx ode_flow_zeta(cplx z0, double t0, double t, const ModelParams& p) {
    const auto [rho, dphi] = ode_amplitude(std::abs(z0), t0, t, p);
    return z0 * std::polar(rho, p.lambda1 * dphi);
}

}  // namespace

cplx ode_flow(cplx v0, double y, double t0, double t, const ModelParams& p, const SymbolF& F) {
    if (!(p.lambda2 > 0.0) || !(p.alpha < 2.0)) throw PreconditionError("ode_flow: needs lambda2 > 0, alpha < 2");
    const auto [rho, dphi] = ode_amplitude(std::abs(v0), t0, t, p);
    const double phase = std::fmod(F.w(y) * (t - t0), 2.0 * kPi) + p.lambda1 * dphi;
    return v0 * std::polar(rho, phase);
}

RemainderSeries remainder_rates(const std::vector<ScaledCheckpoint>& cks, const ModelParams& p,
                                const SymbolF& F, double t_min) {
    std::vector<const ScaledCheckpoint*> win;
    for (const auto& c : cks)
        if (c.t >= t_min * (1.0 - 1e-12)) win.push_back(&c);
    if (win.size() < 8) throw PreconditionError("remainder_rates: fewer than 8 checkpoints with t >= t_min");

    RemainderSeries out;
    const double a = p.alpha;
    out.bound_R = -(1.25 - 0.5 * a) + 0.15;
    out.bound_R_h02 = (0.25 - 0.5 * a) + 0.15;

    const std::size_t n = win.size();
    const std::size_t ny = win[0]->vlam.values.size();
    // zeta = v_Lambda e^{-i w t}
    std::vector<CVec> zeta(n, CVec(ny));
    for (std::size_t m = 0; m < n; ++m) {
        const auto& ck = *win[m];
        for (std::size_t j = 0; j < ny; ++j) {
            const double ph = std::fmod(F.w(ck.vlam.ygrid.x(j)) * ck.t, 2.0 * kPi);
            zeta[m][j] = ck.vlam.values[j] * std::polar(1.0, -ph);
        }
    }
    const bool has_flow = p.lambda2 > 0.0 && a < 2.0;
    for (std::size_t m = 0; m < n; ++m) {
        const auto& ck = *win[m];
        RemainderRow row;
        row.t = ck.t;
        row.vlamc_inf = ck.nlamc.linf;
        row.vlamc_l2 = ck.nlamc.l2;
        row.ratio = ck.nv.linf > 0.0 ? ck.nlamc.linf / ck.nv.linf : 0.0;
        const std::size_t lo = m == 0 ? 0 : m - 1;
        const std::size_t hi = m + 1 == n ? m : m + 1;
        const double t0 = win[lo]->t, t1 = win[hi]->t;
        double dmax = 0.0;
        for (std::size_t j = 0; j < ny; ++j) {
            const cplx pred = has_flow ? ode_flow_zeta(zeta[lo][j], t0, t1, p) : zeta[lo][j];
            dmax = std::max(dmax, std::abs(zeta[hi][j] - pred));
        }
        row.R_inf_proxy = std::pow(ck.t, 0.5 * a) * dmax / (t1 - t0);
        out.rows.push_back(row);
    }

    std::vector<double> t, yi, yl, yr;
    for (const auto& r : out.rows) {
        t.push_back(r.t);
        yi.push_back(r.vlamc_inf);
        yl.push_back(r.vlamc_l2);
        yr.push_back(r.R_inf_proxy);
    }
    auto all_pos = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
    };
    if (all_pos(yi)) {
        out.slope_inf = loglog_fit(t, yi);
        out.inf_ok = out.slope_inf.slope <= out.bound_inf;
    }
    if (all_pos(yl)) {
        out.slope_l2 = loglog_fit(t, yl);
        out.l2_ok = out.slope_l2.slope <= out.bound_l2;
    }
    if (all_pos(yr)) {
        out.slope_R = loglog_fit(t, yr);
        out.R_ok = out.slope_R.slope <= out.bound_R;
    }
    const double T = out.rows.back().t;
    std::vector<double> tr, yrat;
    for (const auto& r : out.rows)
        if (r.t >= T / 10.0 * (1.0 - 1e-12) && r.ratio > 0.0) {
            tr.push_back(r.t);
            yrat.push_back(r.ratio);
        }
    if (tr.size() >= 2) {
        out.slope_ratio_final_decade = loglog_fit(tr, yrat);
        out.ratio_to_zero = out.slope_ratio_final_decade.slope < 0.0 && yrat.back() < yrat.front();
    }
    return out;
}

}  // namespace dnls
